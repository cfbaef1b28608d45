//! One-shot reproductions of the reference examples, each checked against
//! pinned expectations.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

use partialcp::channels::{is_cp, is_positive_map, PositivityVerdict};
use partialcp::compatdomain::{boundary_radius, membership, DomainQuery};
use partialcp::json::MatrixJson;
use partialcp::matcore::{cnot_reversed, kron, partial_trace, pauli_x, pauli_z, tol};
use partialcp::opendyn::{
    assign, extend_linearly, inconsistency_analysis, pechukas_witness, reduced_map, ExtensionResult, TablePair,
    TabulatedAssignment,
};
use partialcp::random::{random_consistent_assignment, random_density};
use partialcp::search::SearchConfig;
use partialcp::states::{bell_projector, expectation, from_bloch, pauli_correlators, singlet, Bell};
use partialcp::{AssignmentMap, BlochVector, CMatrix, DensityMatrix, Generator, ReducedDynamics, Subsystem, Superoperator};
use rand::SeedableRng;

use crate::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseName {
    Flip,
    FourState,
    Pechukas,
    Correlated,
    Inconsistent,
}

#[derive(Clone, Debug)]
pub struct CaseOptions {
    /// Correlation strength for `correlated`, in [-1, 1].
    pub c: f64,
    pub seed: u64,
    pub budget: usize,
    /// Sample times for `inconsistent`.
    pub times: Vec<f64>,
}

impl Default for CaseOptions {
    fn default() -> Self {
        Self {
            c: 0.5,
            seed: 0,
            budget: partialcp::channels::DEFAULT_BUDGET,
            times: (0..=20).map(|k| k as f64 * 0.1).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Expectation {
    Value {
        label: String,
        expected: f64,
        actual: f64,
        tolerance: f64,
        pass: bool,
    },
    Condition {
        label: String,
        pass: bool,
    },
}

impl Expectation {
    pub fn pass(&self) -> bool {
        match self {
            Expectation::Value { pass, .. } | Expectation::Condition { pass, .. } => *pass,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub case: CaseName,
    pub seed: u64,
    pub tol: f64,
    /// Labeled outputs: numbers, matrices or small records.
    pub values: Vec<(String, Value)>,
    pub expectations: Vec<Expectation>,
    pub pass: bool,
}

struct Builder {
    values: Vec<(String, Value)>,
    expectations: Vec<Expectation>,
}

impl Builder {
    fn new() -> Self {
        Self { values: Vec::new(), expectations: Vec::new() }
    }

    fn value(&mut self, label: &str, v: impl Serialize) {
        self.values.push((label.into(), serde_json::to_value(v).expect("serializable")));
    }

    fn matrix(&mut self, label: &str, m: &CMatrix) {
        self.value(label, MatrixJson::from(m));
    }

    fn expect(&mut self, label: &str, expected: f64, actual: f64, tolerance: f64) {
        self.expectations.push(Expectation::Value {
            label: label.into(),
            expected,
            actual,
            tolerance,
            pass: (actual - expected).abs() <= tolerance,
        });
    }

    fn condition(&mut self, label: &str, pass: bool) {
        self.expectations.push(Expectation::Condition { label: label.into(), pass });
    }

    fn finish(self, case: CaseName, seed: u64) -> CaseResult {
        let pass = self.expectations.iter().all(Expectation::pass);
        CaseResult {
            case,
            seed,
            tol: tol(),
            values: self.values,
            expectations: self.expectations,
            pass,
        }
    }
}

fn display_number(v: &Value) -> String {
    match v.as_f64() {
        Some(x) if !v.is_i64() && !v.is_u64() => format!("{:.6}", if x.abs() < 5e-7 { 0.0 } else { x }),
        _ => v.to_string(),
    }
}

fn display_complex(re: f64, im: f64) -> String {
    let (re, im) = (re + 0.0, im + 0.0);
    if im.abs() < 5e-7 {
        format!("{re:.4}")
    } else {
        format!("{re:.4}{im:+.4}i")
    }
}

/// Matrices as `[row; row]`, numbers rounded for reading.
fn display_value(v: &Value) -> String {
    if let (Some(re), Some(im)) = (v.get("re").and_then(Value::as_array), v.get("im").and_then(Value::as_array)) {
        let rows: Vec<String> = re
            .iter()
            .zip(im)
            .map(|(r, i)| {
                let (r, i) = (r.as_array().cloned().unwrap_or_default(), i.as_array().cloned().unwrap_or_default());
                r.iter()
                    .zip(&i)
                    .map(|(a, b)| display_complex(a.as_f64().unwrap_or(f64::NAN), b.as_f64().unwrap_or(f64::NAN)))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        return format!("[{}]", rows.join("; "));
    }
    match v {
        Value::Array(items) => format!("[{}]", items.iter().map(display_value).collect::<Vec<_>>().join(", ")),
        Value::Number(_) => display_number(v),
        _ => v.to_string(),
    }
}

impl CaseResult {
    pub fn text(&self) -> String {
        let mut out = String::new();
        let name = serde_json::to_value(self.case).unwrap();
        writeln!(out, "case: {}", name.as_str().unwrap_or_default()).unwrap();
        for (label, v) in &self.values {
            writeln!(out, "  {label}: {}", display_value(v)).unwrap();
        }
        for e in &self.expectations {
            match e {
                Expectation::Value { label, expected, actual, tolerance, pass } => writeln!(
                    out,
                    "  [{}] {label}: {actual:.9} (expected {expected:.9} ± {tolerance:e})",
                    if *pass { "ok" } else { "FAIL" }
                ),
                Expectation::Condition { label, pass } => {
                    writeln!(out, "  [{}] {label}", if *pass { "ok" } else { "FAIL" })
                }
            }
            .unwrap();
        }
        writeln!(out, "result: {}", if self.pass { "pass" } else { "FAIL" }).unwrap();
        out
    }
}

pub fn run_case(name: CaseName, opts: &CaseOptions) -> CliResult<CaseResult> {
    match name {
        CaseName::Flip => Ok(flip(opts)),
        CaseName::FourState => Ok(four_state(opts)),
        CaseName::Pechukas => pechukas(opts),
        CaseName::Correlated => correlated(opts),
        CaseName::Inconsistent => inconsistent(opts),
    }
}

fn flip(opts: &CaseOptions) -> CaseResult {
    let mut b = Builder::new();
    let s = singlet();
    for (axis, c) in ["xx", "yy", "zz"].iter().zip(pauli_correlators()) {
        b.expect(&format!("singlet <σ{axis}>"), -1.0, expectation(&s, &c).unwrap(), 1e-12);
    }
    let marginal = partial_trace(s.matrix(), (2, 2), Subsystem::First).unwrap();
    b.expect(
        "singlet marginal distance to I/2",
        0.0,
        marginal.max_abs_diff(&CMatrix::identity(2).scale_real(0.5)),
        1e-12,
    );

    let flip = Superoperator::flip_map();
    let image = flip.tensor_identity(2).apply(s.matrix()).unwrap();
    b.matrix("(flip ⊗ id)(singlet)", &image);
    b.expect("<P_Ψ+> after flipping S", -0.5, image.trace_product(&bell_projector(Bell::PsiPlus)).re, 1e-10);
    let spectrum = flip.choi().spectrum();
    b.value("Choi spectrum", &spectrum);
    b.expect("Choi λmin", -1.0, spectrum[0], 1e-9);
    let report = is_positive_map(&flip, SearchConfig::with_budget(opts.budget, opts.seed));
    b.value("positivity search λmin", report.search_min_eigenvalue);
    b.condition(
        "flip map is positive on all states (no violation found)",
        report.is_positive == PositivityVerdict::NoViolationFound,
    );
    b.finish(CaseName::Flip, opts.seed)
}

fn four_state_table(psi_plus: &DensityMatrix, psi_minus: &DensityMatrix, phi: &DensityMatrix) -> TabulatedAssignment {
    let pair = |r: BlochVector, res: &DensityMatrix| {
        let s = from_bloch(r).expect("axis state");
        TablePair { joint: s.tensor(res), system: s }
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
    .expect("consistent table")
}

fn four_state(opts: &CaseOptions) -> CaseResult {
    const LABELS: [&str; 4] = ["x+", "x-", "z+", "z-"];
    let mut b = Builder::new();
    let up = from_bloch(BlochVector::Z_PLUS).unwrap();
    let down = from_bloch(BlochVector::Z_MINUS).unwrap();
    let half = DensityMatrix::maximally_mixed(2);
    let table = four_state_table(&up, &down, &half);
    match extend_linearly(&table) {
        ExtensionResult::Conflict(w) => {
            let describe = |parts: &[(usize, f64)]| {
                parts
                    .iter()
                    .map(|(i, x)| format!("{x:.6}·{}", LABELS[*i]))
                    .collect::<Vec<_>>()
                    .join(" + ")
            };
            b.value("first decomposition", describe(&w.first));
            b.value("second decomposition", describe(&w.second));
            b.matrix("first image", &w.first_image);
            b.matrix("second image", &w.second_image);
            b.condition("conflict detected", true);
            let recombine = |parts: &[(usize, f64)]| {
                parts.iter().fold(CMatrix::zeros(2, 2), |acc, (i, x)| {
                    &acc + &table.pairs()[*i].system.matrix().scale_real(*x)
                })
            };
            let miss = recombine(&w.first)
                .max_abs_diff(half.matrix())
                .max(recombine(&w.second).max_abs_diff(half.matrix()));
            b.expect("both decompositions equal I/2", 0.0, miss, 1e-12);
            b.expect("trace distance of the images", 1.0, w.image_distance, 1e-9);
        }
        ExtensionResult::Extension(_) => b.condition("conflict detected", false),
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let tau = random_density(2, &mut rng);
    match extend_linearly(&four_state_table(&tau, &tau, &tau)) {
        ExtensionResult::Extension(ext) => {
            let product = AssignmentMap::product(2, tau).homogenized().unwrap();
            b.expect(
                "equal reservoirs: distance to the product map",
                0.0,
                ext.homogenized().unwrap().max_abs_diff(&product),
                1e-10,
            );
        }
        ExtensionResult::Conflict(_) => b.condition("equal reservoirs extend linearly", false),
    }
    b.finish(CaseName::FourState, opts.seed)
}

fn pechukas(opts: &CaseOptions) -> CliResult<CaseResult> {
    let mut b = Builder::new();
    let cfg = SearchConfig::with_budget(opts.budget, opts.seed);
    let out = pechukas_witness(&AssignmentMap::correlated(0.5), cfg)?;
    b.expect("Φ_0.5 witness λmin", -0.125, out.min_eigenvalue, 1e-3);
    match &out.witness {
        Some(w) => {
            let r = w.bloch()?;
            b.value("witness Bloch vector", r.0);
            b.condition("witness lies at a pole (|r_z| ≥ 0.99)", r.0[2].abs() >= 0.99);
        }
        None => b.condition("witness found for Φ_0.5", false),
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.seed);
    let mut found = 0;
    for _ in 0..50 {
        let phi = random_consistent_assignment(0.01, &mut rng);
        found += pechukas_witness(&phi, cfg)?.witness.is_some() as usize;
    }
    b.value("random consistent non-product maps with a witness", format!("{found}/50"));
    b.condition("every random non-product map has a witness", found == 50);

    let product = AssignmentMap::product(2, random_density(2, &mut rng));
    let none = pechukas_witness(&product, cfg)?;
    b.value("product map search λmin", none.min_eigenvalue);
    b.condition("product map has no witness", none.witness.is_none());
    Ok(b.finish(CaseName::Pechukas, opts.seed))
}

fn correlated(opts: &CaseOptions) -> CliResult<CaseResult> {
    let c = opts.c;
    if !(-1.0..=1.0).contains(&c) || !c.is_finite() {
        return Err(CliError::Usage(format!("--c must lie in [-1, 1], got {c}")));
    }
    let mut b = Builder::new();
    let phi = AssignmentMap::correlated(c);
    b.value("c", c);
    let q = DomainQuery::phi(&phi)?;
    let (center_in, center) = membership(&q, &DensityMatrix::maximally_mixed(2))?;
    b.expect("λmin at I/2", (1.0 - c.abs()) / 4.0, center, 1e-9);
    b.condition("I/2 is in the domain", center_in);
    let (pole_in, pole) = membership(&q, &from_bloch(BlochVector::Z_PLUS)?)?;
    b.expect("λmin at z+", -c.abs() / 4.0, pole, 1e-9);
    b.condition("z+ membership matches its sign", pole_in == (pole >= -tol()));

    let rz = boundary_radius(&q, BlochVector::Z_PLUS)?;
    let rx = boundary_radius(&q, BlochVector::X_PLUS)?;
    // Membership allows λmin ≥ -tol, which moves the boundary to
    // sqrt(r² + c²) = 1 + 4·tol; this matters only where it is tangent (|c| = 1).
    let edge = 1.0 + 4.0 * tol();
    b.expect("radius along z", edge - c.abs(), rz, 1e-6);
    b.expect("radius along x", (edge * edge - c * c).sqrt(), rx, 1e-6);

    let out = pechukas_witness(&phi, SearchConfig::with_budget(opts.budget, opts.seed))?;
    b.expect("witness λmin", -c.abs() / 4.0, out.min_eigenvalue, 1e-3);
    b.condition("witness found iff c ≠ 0", out.witness.is_some() == (c.abs() / 4.0 > tol()));

    let rd = ReducedDynamics::new(phi, Generator::Unitary(cnot_reversed()))?;
    let lam = reduced_map(&rd, 0.0)?;
    let report = is_cp(&lam);
    b.expect(
        "reduced map (reservoir-controlled CNOT) Choi λmin",
        (1.0 - (1.0 + c * c).sqrt()) / 2.0,
        report.min_choi_eigenvalue,
        1e-9,
    );
    b.matrix("reduced map transfer", lam.transfer());
    Ok(b.finish(CaseName::Correlated, opts.seed))
}

fn inconsistent(opts: &CaseOptions) -> CliResult<CaseResult> {
    let mut b = Builder::new();
    let half = DensityMatrix::maximally_mixed(2);
    let x = from_bloch(BlochVector::X_PLUS)?;
    let zx = Generator::Hamiltonian(kron(&pauli_z(), &pauli_x()));
    let xz = Generator::Hamiltonian(kron(&pauli_x(), &pauli_z()));
    let times = &opts.times;
    b.value("times", times);

    let dephased = AssignmentMap::dephased_product(half.clone());
    let r = inconsistency_analysis(&dephased, &x, &x.tensor(&half), &zx, times)?;
    b.expect("dephasing assignment: fixed-point offset", 1.0, r.fixed_point_offset, 1e-9);
    b.expect("δ(t0) equals the offset", r.fixed_point_offset, r.deviation[0], 1e-12);
    b.value("dephasing δ(t)", &r.deviation);

    let c = 0.1;
    let phi = AssignmentMap::correlated(c);
    let rho = from_bloch(BlochVector::new(0.5, 0.0, 0.2))?;
    let joint = DensityMatrix::new(assign(&phi, &rho)?)?;
    let exact = inconsistency_analysis(&phi, &rho, &joint, &xz, times)?;
    let worst = exact.deviation.iter().fold(exact.fixed_point_offset, |m, d| m.max(*d));
    b.expect("consistent assignment: largest δ(t)", 0.0, worst, 1e-12);

    let proxy = AssignmentMap::product(2, half);
    let weak = inconsistency_analysis(&proxy, &rho, &joint, &xz, times)?;
    let gap = times
        .iter()
        .zip(&weak.deviation)
        .map(|(t, d)| (d - c * (2.0 * t).sin().abs()).abs())
        .fold(0.0, f64::max);
    b.value("product proxy under σx⊗σz: δ(t)", &weak.deviation);
    b.expect("product proxy: max |δ(t) - c|sin 2t||", 0.0, gap, 1e-10);
    let hidden = inconsistency_analysis(&proxy, &rho, &joint, &zx, times)?;
    let worst = hidden.deviation.iter().fold(0.0, |m: f64, d| m.max(*d));
    b.expect("product proxy under σz⊗σx: largest δ(t)", 0.0, worst, 1e-12);
    Ok(b.finish(CaseName::Inconsistent, opts.seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_passes_with_defaults() {
        let opts = CaseOptions::default();
        for name in CaseName::value_variants() {
            let r = run_case(*name, &opts).unwrap();
            assert!(r.pass, "{}", r.text());
        }
    }

    #[test]
    fn correlated_edges() {
        for c in [-1.0, -0.3, 0.0, 1.0] {
            let r = run_case(CaseName::Correlated, &CaseOptions { c, ..Default::default() }).unwrap();
            assert!(r.pass, "{}", r.text());
        }
        assert!(matches!(
            run_case(CaseName::Correlated, &CaseOptions { c: 1.5, ..Default::default() }),
            Err(CliError::Usage(_))
        ));
    }
}
