use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::channels::is_cp;
use crate::matcore::{cnot, cnot_reversed, herm_eigvals, kron, pauli_x, pauli_z};
use crate::random::{random_bloch, random_consistent_assignment, random_density, random_unitary};
use crate::search::SearchConfig;
use crate::states::{from_bloch, BlochVector};

fn half_identity() -> DensityMatrix {
    DensityMatrix::maximally_mixed(2)
}

fn ket0() -> DensityMatrix {
    from_bloch(BlochVector::Z_PLUS).unwrap()
}

fn ket1() -> DensityMatrix {
    from_bloch(BlochVector::Z_MINUS).unwrap()
}

/// Lowest eigenvalue of `Φ_c(ρ(r))` from the block spectrum
/// `¼(1 ± sqrt(r_⊥² + (r_z + c t)²))`, `t = ±1`.
fn correlated_lmin_oracle(r: BlochVector, c: f64) -> f64 {
    let [x, y, z] = r.0;
    0.25 * (1.0 - (x * x + y * y + (z.abs() + c.abs()).powi(2)).sqrt())
}

fn lmin(m: &CMatrix) -> f64 {
    herm_eigvals(m).unwrap()[0]
}

fn four_state_table(psi_plus: &DensityMatrix, psi_minus: &DensityMatrix, phi: &DensityMatrix) -> TabulatedAssignment {
    let pair = |b: BlochVector, r: &DensityMatrix| {
        let s = from_bloch(b).unwrap();
        TablePair { joint: s.tensor(r), system: s }
    };
    TabulatedAssignment::new(
        2,
        2,
        vec![
            pair(BlochVector::X_PLUS, psi_plus),
            pair(BlochVector::X_MINUS, psi_minus),
            pair(BlochVector::Z_PLUS, phi),
            pair(BlochVector::Z_MINUS, phi),
        ],
        false,
    )
    .unwrap()
}

#[test]
fn correlated_spectra_at_center_and_pole() {
    let phi = AssignmentMap::correlated(0.5);
    let center = herm_eigvals(&assign(&phi, &half_identity()).unwrap()).unwrap();
    for (got, want) in center.iter().zip([0.125, 0.125, 0.375, 0.375]) {
        assert!((got - want).abs() < 1e-12);
    }
    let pole = herm_eigvals(&assign(&phi, &ket0()).unwrap()).unwrap();
    for (got, want) in pole.iter().zip([-0.125, 0.125, 0.375, 0.625]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn correlated_lmin_matches_block_formula() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for c in [0.0, 0.3, 0.5, 1.0] {
        let phi = AssignmentMap::correlated(c);
        for _ in 0..200 {
            let r = random_bloch(&mut rng);
            let got = lmin(&assign(&phi, &from_bloch(r).unwrap()).unwrap());
            assert!((got - correlated_lmin_oracle(r, c)).abs() < 1e-12);
        }
    }
}

#[test]
fn product_assignment_is_exact_tensor() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let tau = random_density(3, &mut rng);
    let phi = AssignmentMap::product(2, tau.clone());
    let rho = random_density(2, &mut rng);
    assert_eq!(assign(&phi, &rho).unwrap(), kron(rho.matrix(), tau.matrix()));
    assert!(matches!(assign(&phi, &half_identity().tensor(&tau)), Err(Error::DimensionMismatch(_))));
}

#[test]
fn consistency_examples() {
    let probes = probe_states(2, 20, 5);
    let product = AssignmentMap::product(2, half_identity());
    assert!(check_consistency(&product, &probes).unwrap().max_residual < 1e-12);
    for c in [0.2, 0.5, 1.0] {
        let r = check_consistency(&AssignmentMap::correlated(c), &probes).unwrap();
        assert!(r.consistent && r.max_residual < 1e-12);
    }
    let dephased = AssignmentMap::dephased_product(half_identity());
    let r = check_consistency(&dephased, &probes).unwrap();
    assert!(!r.consistent);
    // x₊ loses its full coherence: ‖σ_x/2‖₁ = 1.
    let x = from_bloch(BlochVector::X_PLUS).unwrap();
    let single = check_consistency(&dephased, std::slice::from_ref(&x)).unwrap();
    assert!((single.max_residual - 1.0).abs() < 1e-12);
}

#[test]
fn linearity_examples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let probes: Vec<LinearityProbe> = (0..30)
        .map(|k| LinearityProbe {
            first: random_density(2, &mut rng),
            second: from_bloch(random_bloch(&mut rng)).unwrap(),
            weight: k as f64 / 29.0,
        })
        .collect();
    for phi in [AssignmentMap::product(2, ket1()), AssignmentMap::correlated(0.5)] {
        let r = check_linearity(&phi, &probes).unwrap();
        assert!(r.linear && r.max_residual < 1e-10 && r.undefined == 0);
    }

    let table = AssignmentMap::Tabulated(four_state_table(&ket0(), &ket1(), &half_identity()));
    let probe = LinearityProbe {
        first: from_bloch(BlochVector::X_PLUS).unwrap(),
        second: from_bloch(BlochVector::X_MINUS).unwrap(),
        weight: 0.5,
    };
    let r = check_linearity(&table, &[probe]).unwrap();
    assert_eq!(r.outcomes, vec![LinearityOutcome::Undefined]);
    assert!(r.linear);
}

#[test]
fn tabulated_lookup_and_miss() {
    let table = AssignmentMap::Tabulated(four_state_table(&ket0(), &ket1(), &half_identity()));
    let x = from_bloch(BlochVector::X_PLUS).unwrap();
    assert_eq!(assign(&table, &x).unwrap(), kron(x.matrix(), ket0().matrix()));
    assert_eq!(assign(&table, &half_identity()), Err(Error::TableMiss));
    assert!(!table.is_totally_defined());
    assert!(matches!(table.homogenized(), Err(Error::NotTotallyDefined)));
}

#[test]
fn inconsistent_table_requires_flag() {
    let x = from_bloch(BlochVector::X_PLUS).unwrap();
    let bad = TablePair { system: x, joint: ket0().tensor(&ket0()) };
    assert!(TabulatedAssignment::new(2, 2, vec![bad.clone()], false).is_err());
    assert!(TabulatedAssignment::new(2, 2, vec![bad], true).unwrap().is_flagged_inconsistent());
}

#[test]
fn affine_validation_rejects_bad_parts() {
    let half = CMatrix::identity(2).scale_real(0.5);
    let linear = Superoperator::from_fn(2, 4, |m| kron(m, &half));
    // Constant with nonzero trace breaks the unit-trace condition.
    assert!(AffineAssignment::new(2, 2, linear.clone(), CMatrix::identity(4).scale_real(0.1)).is_err());
    let skew = CMatrix::from_fn(4, 4, |i, j| if i < j { Complex64::new(0.0, 1.0) } else { Complex64::new(0.0, 0.0) });
    assert!(AffineAssignment::new(2, 2, linear.clone(), skew).is_err());
    assert!(AffineAssignment::new(2, 3, linear, CMatrix::zeros(4, 4)).is_err());
}

#[test]
fn four_state_table_conflicts() {
    let table = four_state_table(&ket0(), &ket1(), &half_identity());
    let ExtensionResult::Conflict(w) = extend_linearly(&table) else {
        panic!("expected a conflict");
    };
    let weights = |parts: &[(usize, f64)]| {
        let mut v = [0.0; 4];
        for (i, x) in parts {
            v[*i] = *x;
        }
        v
    };
    let a = weights(&w.first);
    let b = weights(&w.second);
    assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    // Both halves are the two equal mixtures, in some order.
    let xs = [0.5, 0.5, 0.0, 0.0];
    let zs = [0.0, 0.0, 0.5, 0.5];
    let close = |u: &[f64; 4], v: &[f64; 4]| u.iter().zip(v).all(|(p, q)| (p - q).abs() < 1e-12);
    assert!((close(&a, &xs) && close(&b, &zs)) || (close(&a, &zs) && close(&b, &xs)));
    assert!(w.state.matrix().max_abs_diff(half_identity().matrix()) < 1e-12);

    // Direct construction of both sides.
    let x_side = &kron(from_bloch(BlochVector::X_PLUS).unwrap().matrix(), ket0().matrix()).scale_real(0.5)
        + &kron(from_bloch(BlochVector::X_MINUS).unwrap().matrix(), ket1().matrix()).scale_real(0.5);
    let z_side = kron(half_identity().matrix(), half_identity().matrix());
    let oracle = (&x_side - &z_side).trace_norm();
    assert!((oracle - 1.0).abs() < 1e-12);
    assert!((w.image_distance - oracle).abs() < 1e-9);
    assert!(w.residual > 1e3 * tol());
}

#[test]
fn equal_reservoirs_extend_to_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tau = random_density(2, &mut rng);
    let table = four_state_table(&tau, &tau, &tau);
    let ExtensionResult::Extension(ext) = extend_linearly(&table) else {
        panic!("expected an extension");
    };
    let product = AssignmentMap::product(2, tau);
    let diff = ext.homogenized().unwrap().max_abs_diff(&product.homogenized().unwrap());
    assert!(diff < 1e-10, "{diff}");
}

#[test]
fn affinely_independent_table_extends() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let pairs: Vec<TablePair> = [BlochVector::X_PLUS, BlochVector::X_MINUS, BlochVector::Z_PLUS, BlochVector::Y_PLUS]
        .into_iter()
        .map(|b| {
            let s = from_bloch(b).unwrap();
            TablePair { joint: s.tensor(&random_density(2, &mut rng)), system: s }
        })
        .collect();
    let table = TabulatedAssignment::new(2, 2, pairs.clone(), false).unwrap();
    let ExtensionResult::Extension(ext) = extend_linearly(&table) else {
        panic!("expected an extension");
    };
    for p in &pairs {
        let got = assign(&ext, &p.system).unwrap();
        assert!(got.max_abs_diff(p.joint.matrix()) < 1e-10);
    }
}

#[test]
fn reduced_map_orientation_of_cnot() {
    let phi = AssignmentMap::correlated(0.5);
    // System as control: the correlation averages out and Λ is a dephasing.
    let rd = ReducedDynamics::new(phi.clone(), Generator::Unitary(cnot())).unwrap();
    let lam = reduced_map(&rd, 0.0).unwrap();
    assert!(is_cp(&lam).is_cp);
    let deph = Superoperator::from_fn(2, 2, |m| &m.scale_real(0.5) + &m.conjugate_by(&pauli_z()).scale_real(0.5));
    assert!(lam.max_abs_diff(&deph) < 1e-12);

    // Reservoir as control: Λ(X) = ½(X + σ_x X σ_x) + (c/2) tr(X) σ_z.
    let rd = ReducedDynamics::new(phi, Generator::Unitary(cnot_reversed())).unwrap();
    let lam = reduced_map(&rd, 0.0).unwrap();
    let oracle = Superoperator::from_fn(2, 2, |m| {
        let flip = &m.scale_real(0.5) + &m.conjugate_by(&pauli_x()).scale_real(0.5);
        &flip + &pauli_z().scale(m.trace() * 0.25)
    });
    assert!(lam.max_abs_diff(&oracle) < 1e-12);
    let report = is_cp(&lam);
    assert!(!report.is_cp);
    assert!((report.min_choi_eigenvalue - (1.0 - 1.25f64.sqrt()) / 2.0).abs() < 1e-12);
    assert!(lam.trace_preservation_residual() < 1e-12);
}

#[test]
fn reduced_map_at_zero_is_identity_for_consistent_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let h = crate::random::random_hermitian(4, &mut rng);
    for phi in [
        AssignmentMap::correlated(0.7),
        AssignmentMap::product(2, random_density(2, &mut rng)),
        random_consistent_assignment(0.01, &mut rng),
    ] {
        let rd = ReducedDynamics::new(phi, Generator::Hamiltonian(h.clone())).unwrap();
        let lam = reduced_map(&rd, 0.0).unwrap();
        assert!(lam.max_abs_diff(&Superoperator::identity(2)) < 1e-10);
    }
}

#[test]
fn product_reduced_maps_are_cptp() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..25 {
        let phi = AssignmentMap::product(2, random_density(3, &mut rng));
        let rd = ReducedDynamics::new(phi, Generator::Unitary(random_unitary(6, &mut rng))).unwrap();
        let lam = reduced_map(&rd, 1.0).unwrap();
        assert!(is_cp(&lam).min_choi_eigenvalue >= -1e-9);
        assert!(lam.trace_preservation_residual() <= 1e-9);
    }
}

#[test]
fn linear_extension_agrees_with_direct_evolution() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let h = crate::random::random_hermitian(4, &mut rng);
    let phi = AssignmentMap::correlated(0.5);
    let rd = ReducedDynamics::new(phi.clone(), Generator::Hamiltonian(h)).unwrap();
    let lam = reduced_map(&rd, 0.8).unwrap();
    let mut checked = 0;
    while checked < 100 {
        let rho = from_bloch(random_bloch(&mut rng)).unwrap();
        if lmin(&assign(&phi, &rho).unwrap()) < 0.0 {
            continue;
        }
        let direct = evolve(&rd, &rho, 0.8).unwrap();
        assert!(lam.apply(rho.matrix()).unwrap().max_abs_diff(&direct) < 1e-10);
        checked += 1;
    }
}

#[test]
fn generator_validation() {
    let phi = AssignmentMap::correlated(0.5);
    let bad = CMatrix::identity(4).scale_real(2.0);
    assert!(matches!(
        ReducedDynamics::new(phi.clone(), Generator::Unitary(bad)),
        Err(Error::InvalidGenerator(_))
    ));
    let skew = CMatrix::from_fn(4, 4, |i, j| if i == 0 && j == 1 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    assert!(ReducedDynamics::new(phi.clone(), Generator::Hamiltonian(skew)).is_err());
    assert!(matches!(
        ReducedDynamics::new(phi, Generator::Unitary(CMatrix::identity(2))),
        Err(Error::DimensionMismatch(_))
    ));
}

#[test]
fn pechukas_witness_for_correlated_family() {
    for (c, want) in [(0.5, -0.125), (1.0, -0.25)] {
        let out = pechukas_witness(&AssignmentMap::correlated(c), SearchConfig::default()).unwrap();
        let w = out.witness.expect("witness");
        assert!((out.min_eigenvalue - want).abs() < 1e-9);
        let r = w.bloch().unwrap();
        assert!(r.norm() >= 0.99 && r.0[2].abs() >= 0.99);
    }
    // At c = 1 the center sits on the boundary.
    let center = herm_eigvals(&assign(&AssignmentMap::correlated(1.0), &half_identity()).unwrap()).unwrap();
    for (got, want) in center.iter().zip([0.0, 0.0, 0.5, 0.5]) {
        assert!((got - want).abs() < 1e-12);
    }
}

#[test]
fn pechukas_product_and_bad_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let out = pechukas_witness(&AssignmentMap::product(2, random_density(2, &mut rng)), SearchConfig::default()).unwrap();
    assert!(out.witness.is_none());
    assert!(out.min_eigenvalue >= -1e-12);
    let dephased = AssignmentMap::dephased_product(half_identity());
    assert!(matches!(pechukas_witness(&dephased, SearchConfig::default()), Err(Error::Inconsistent(_))));
    let table = AssignmentMap::Tabulated(four_state_table(&ket0(), &ket1(), &half_identity()));
    assert!(matches!(pechukas_witness(&table, SearchConfig::default()), Err(Error::NotTotallyDefined)));
}

#[test]
fn pechukas_witness_for_random_consistent_maps() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let phi = random_consistent_assignment(0.01, &mut rng);
        assert!(lmin(&assign(&phi, &half_identity()).unwrap()) >= 0.01 - 1e-12);
        let out = pechukas_witness(&phi, SearchConfig::default()).unwrap();
        let w = out.witness.expect("non-product consistent map has a witness");
        assert!(lmin(&assign(&phi, &w).unwrap()) < -tol());
    }
}

#[test]
fn trajectory_for_consistent_assignment_vanishes() {
    let phi = AssignmentMap::correlated(0.5);
    let rho = from_bloch(BlochVector::new(0.3, 0.1, -0.2)).unwrap();
    let joint = DensityMatrix::new(assign(&phi, &rho).unwrap()).unwrap();
    let h = kron(&pauli_x(), &pauli_z());
    let times: Vec<f64> = (0..11).map(|k| k as f64 * 0.2).collect();
    let r = inconsistency_analysis(&phi, &rho, &joint, &Generator::Hamiltonian(h), &times).unwrap();
    assert!(r.fixed_point_offset < 1e-12);
    assert!(r.deviation.iter().all(|d| *d < 1e-12));
}

#[test]
fn trajectory_for_dephasing_assignment() {
    let phi = AssignmentMap::dephased_product(half_identity());
    let x = from_bloch(BlochVector::X_PLUS).unwrap();
    let joint = x.tensor(&half_identity());
    let times = [0.0, 0.5, 1.0];
    let r = inconsistency_analysis(&phi, &x, &joint, &Generator::Hamiltonian(kron(&pauli_z(), &pauli_x())), &times).unwrap();
    assert!((r.fixed_point_offset - 1.0).abs() < 1e-9);
    assert!((r.deviation[0] - r.fixed_point_offset).abs() < 1e-12);
    assert!(r.deviation.iter().all(|d| *d >= 0.0));
}

#[test]
fn weak_coupling_trajectories() {
    let c = 0.1;
    let rho = from_bloch(BlochVector::new(0.5, 0.0, 0.2)).unwrap();
    let joint = DensityMatrix::new(assign(&AssignmentMap::correlated(c), &rho).unwrap()).unwrap();
    let proxy = AssignmentMap::product(2, half_identity());
    let times: Vec<f64> = (0..=40).map(|k| k as f64 * 0.05).collect();

    // The rotated difference is I⊗σ_y-like and traces out to zero.
    let zx = Generator::Hamiltonian(kron(&pauli_z(), &pauli_x()));
    let r = inconsistency_analysis(&proxy, &rho, &joint, &zx, &times).unwrap();
    assert!(r.deviation.iter().all(|d| *d < 1e-12));

    // Here it rotates into σ_y⊗I: δ(t) = c |sin 2t|.
    let xz = Generator::Hamiltonian(kron(&pauli_x(), &pauli_z()));
    let r = inconsistency_analysis(&proxy, &rho, &joint, &xz, &times).unwrap();
    for (t, d) in times.iter().zip(&r.deviation) {
        assert!((d - c * (2.0 * t).sin().abs()).abs() < 1e-10);
    }
}

#[test]
fn trajectory_rejects_marginal_mismatch() {
    let phi = AssignmentMap::correlated(0.5);
    let err = inconsistency_analysis(
        &phi,
        &ket0(),
        &half_identity().tensor(&half_identity()),
        &Generator::Unitary(cnot()),
        &[0.0],
    );
    assert!(matches!(err, Err(Error::MarginalMismatch(_))));
}
