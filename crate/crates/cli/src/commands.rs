//! `check`, `reduce` and `domain`.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use partialcp::channels::{is_cp, is_positive_map, PositivityVerdict};
use partialcp::compatdomain::{
    axis_rays, convexity_check, domain_report, membership, ConvexityReport, DomainQuery, Predicate, ReportOptions,
    Subject,
};
use partialcp::json::{self, AssignmentJson, SuperoperatorJson};
use partialcp::opendyn::{
    check_consistency, check_linearity, extend_linearly, probe_states, reduced_map, ExtensionResult, LinearityProbe,
};
use partialcp::random::random_density;
use partialcp::search::{minimize, AffineObjective, SearchConfig};
use partialcp::{AssignmentMap, BlochVector, DensityMatrix, ReducedDynamics, Superoperator};
use rand::SeedableRng;

use crate::{read_file, with_path, write_file, CliError, CliResult, Report};

fn yes_no(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "NO"
    }
}

fn load_assignment(path: &Path) -> CliResult<AssignmentMap> {
    with_path(path, json::parse_assignment(&read_file(path)?))
}

// ---------------------------------------------------------------- check

#[derive(Serialize)]
struct MapAudit {
    kind: &'static str,
    dim_in: usize,
    dim_out: usize,
    trace_preserving: bool,
    trace_preservation_residual: f64,
    unital: bool,
    unitality_residual: f64,
    cp: bool,
    min_choi_eigenvalue: f64,
    choi_spectrum: Vec<f64>,
    positivity: PositivityVerdict,
    search_min_eigenvalue: Option<f64>,
    samples: usize,
    witness: Option<json::MatrixJson>,
    seed: u64,
    tol: f64,
}

fn audit_map(t: &Superoperator, cfg: SearchConfig) -> Report {
    let choi = is_cp(t);
    let pos = is_positive_map(t, cfg);
    let audit = MapAudit {
        kind: "superoperator",
        dim_in: t.dim_in(),
        dim_out: t.dim_out(),
        trace_preserving: t.is_trace_preserving(),
        trace_preservation_residual: t.trace_preservation_residual(),
        unital: t.is_unital(),
        unitality_residual: t.unitality_residual(),
        cp: choi.is_cp,
        min_choi_eigenvalue: choi.min_choi_eigenvalue,
        choi_spectrum: t.choi().spectrum(),
        positivity: pos.is_positive,
        search_min_eigenvalue: pos.search_min_eigenvalue,
        samples: pos.samples_used,
        witness: pos.witness.as_ref().map(|w| w.matrix().into()),
        seed: cfg.seed,
        tol: partialcp::matcore::tol(),
    };
    let mut text = String::new();
    writeln!(text, "map: {} -> {}", audit.dim_in, audit.dim_out).unwrap();
    writeln!(text, "TP: {} (residual {:.3e})", yes_no(audit.trace_preserving), audit.trace_preservation_residual).unwrap();
    writeln!(text, "Unital: {} (residual {:.3e})", yes_no(audit.unital), audit.unitality_residual).unwrap();
    writeln!(text, "CP: {} (Choi λmin = {:.6})", yes_no(audit.cp), audit.min_choi_eigenvalue).unwrap();
    let search_min = audit.search_min_eigenvalue.unwrap_or(f64::NAN);
    match audit.positivity {
        PositivityVerdict::CertifiedViolation => writeln!(
            text,
            "Positive: NO (certified violation, output λmin = {search_min:.6})"
        ),
        _ => writeln!(
            text,
            "Positive: no violation found ({} samples, output λmin = {search_min:.6})",
            audit.samples
        ),
    }
    .unwrap();
    let negative = !audit.trace_preserving || !audit.cp || audit.positivity == PositivityVerdict::CertifiedViolation;
    Report::new(text, audit, negative)
}

#[derive(Serialize)]
struct AssignmentAudit {
    kind: &'static str,
    variant: &'static str,
    d_s: usize,
    d_r: usize,
    consistency: partialcp::opendyn::ConsistencyReport,
    linearity: partialcp::opendyn::LinearityReport,
    /// Lowest `λ_min(Φ(ρ))` over pure states, for totally defined maps.
    positivity_min_eigenvalue: Option<f64>,
    positivity_witness: Option<json::MatrixJson>,
    center_min_eigenvalue: Option<f64>,
    extension: Option<ExtensionSummary>,
    seed: u64,
    tol: f64,
}

#[derive(Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
enum ExtensionSummary {
    Extension,
    Conflict(partialcp::opendyn::ConflictWitness),
}

fn linearity_probes(phi: &AssignmentMap, seed: u64) -> Vec<LinearityProbe> {
    match phi {
        AssignmentMap::Tabulated(t) => {
            let states: Vec<&DensityMatrix> = t.pairs().iter().map(|p| &p.system).collect();
            let mut probes = Vec::new();
            for (i, a) in states.iter().enumerate() {
                for b in &states[i + 1..] {
                    probes.push(LinearityProbe { first: (*a).clone(), second: (*b).clone(), weight: 0.5 });
                }
            }
            probes
        }
        _ => {
            let d = phi.dims().0;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            (0..20)
                .map(|k| LinearityProbe {
                    first: random_density(d, &mut rng),
                    second: random_density(d, &mut rng),
                    weight: (k as f64 + 0.5) / 20.0,
                })
                .collect()
        }
    }
}

fn audit_assignment(phi: &AssignmentMap, cfg: SearchConfig) -> CliResult<Report> {
    let (d_s, d_r) = phi.dims();
    let variant = match phi {
        AssignmentMap::Product { .. } => "product",
        AssignmentMap::Affine(_) => "affine",
        AssignmentMap::Tabulated(_) => "tabulated",
    };
    let probes = match phi {
        AssignmentMap::Tabulated(t) => t.pairs().iter().map(|p| p.system.clone()).collect(),
        _ => probe_states(d_s, 50, cfg.seed),
    };
    let consistency = check_consistency(phi, &probes)?;
    let linearity = check_linearity(phi, &linearity_probes(phi, cfg.seed))?;

    let mut text = String::new();
    writeln!(text, "assignment: {variant}, d_s = {d_s}, d_r = {d_r}").unwrap();
    writeln!(
        text,
        "Consistent: {} (max ‖tr_R Φρ - ρ‖₁ = {:.3e} over {} probes)",
        yes_no(consistency.consistent),
        consistency.max_residual,
        consistency.evaluated
    )
    .unwrap();
    writeln!(
        text,
        "Linear: {} (max residual {:.3e}, {} undefined combinations)",
        yes_no(linearity.linear),
        linearity.max_residual,
        linearity.undefined
    )
    .unwrap();
    let mut negative = !consistency.consistent || !linearity.linear;

    let (mut positivity_min_eigenvalue, mut positivity_witness, mut center_min_eigenvalue, mut extension) =
        (None, None, None, None);
    if let Some((linear, constant)) = phi.affine_parts() {
        let outcome = minimize(AffineObjective { linear: &linear, offset: Some(&constant) }, cfg, f64::NEG_INFINITY);
        let violated = outcome.min_eigenvalue < -partialcp::matcore::tol();
        writeln!(
            text,
            "Positive images: {} (lowest λmin(Φρ) over pure states = {:.6})",
            yes_no(!violated),
            outcome.min_eigenvalue
        )
        .unwrap();
        negative |= violated;
        positivity_min_eigenvalue = Some(outcome.min_eigenvalue);
        positivity_witness = violated.then(|| outcome.state().matrix().into());
        let (member, l) = membership(&DomainQuery::phi(phi)?, &DensityMatrix::maximally_mixed(d_s))?;
        writeln!(text, "Domain center I/{d_s}: {} (λmin = {l:.6})", if member { "member" } else { "NOT a member" }).unwrap();
        center_min_eigenvalue = Some(l);
    }
    if let AssignmentMap::Tabulated(t) = phi {
        extension = Some(match extend_linearly(t) {
            ExtensionResult::Extension(_) => {
                writeln!(text, "Linear extension: exists").unwrap();
                ExtensionSummary::Extension
            }
            ExtensionResult::Conflict(w) => {
                writeln!(
                    text,
                    "Linear extension: NO (two decompositions of one state with ‖Δimage‖₁ = {:.6})",
                    w.image_distance
                )
                .unwrap();
                negative = true;
                ExtensionSummary::Conflict(w)
            }
        });
    }
    let audit = AssignmentAudit {
        kind: "assignment",
        variant,
        d_s,
        d_r,
        consistency,
        linearity,
        positivity_min_eigenvalue,
        positivity_witness,
        center_min_eigenvalue,
        extension,
        seed: cfg.seed,
        tol: partialcp::matcore::tol(),
    };
    Ok(Report::new(text, audit, negative))
}

/// Audits a superoperator or assignment-map file.
pub fn check(path: &Path, cfg: SearchConfig) -> CliResult<Report> {
    let text = read_file(path)?;
    let value: serde_json::Value = with_path(path, json::from_str(&text))?;
    if value.get("variant").is_some() {
        let wire: AssignmentJson = with_path(path, json::from_str(&text))?;
        let phi = with_path(path, wire.to_assignment())?;
        audit_assignment(&phi, cfg)
    } else {
        let t = with_path(path, json::parse_superoperator(&text))?;
        Ok(audit_map(&t, cfg))
    }
}

// --------------------------------------------------------------- reduce

#[derive(Clone, Debug)]
pub struct ReduceOptions {
    pub times: Vec<f64>,
    /// Directory for `report.json` and one transfer file per time.
    pub out_dir: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Serialize)]
struct TimeAudit {
    t: f64,
    cp: bool,
    min_choi_eigenvalue: f64,
    trace_preservation_residual: f64,
    lambda_center_member: bool,
    lambda_center_min_eigenvalue: f64,
    transfer_file: Option<String>,
}

#[derive(Serialize)]
struct ReduceReport {
    d_s: usize,
    d_r: usize,
    extended_from_table: bool,
    phi_center_member: bool,
    phi_center_min_eigenvalue: f64,
    /// Φ-domain radii along the coordinate axes (qubits with an interior).
    phi_radii: Vec<(BlochVector, f64)>,
    times: Vec<TimeAudit>,
    seed: u64,
    tol: f64,
}

pub fn reduce(assignment: &Path, generator: &Path, opts: &ReduceOptions) -> CliResult<Report> {
    let mut phi = load_assignment(assignment)?;
    let gen = with_path(generator, json::parse_generator(&read_file(generator)?))?;
    let mut text = String::new();
    let mut extended = false;
    if let AssignmentMap::Tabulated(t) = &phi {
        match extend_linearly(t) {
            ExtensionResult::Extension(ext) => {
                writeln!(text, "table extended linearly before reduction").unwrap();
                phi = ext;
                extended = true;
            }
            ExtensionResult::Conflict(w) => {
                return Err(CliError::Usage(format!(
                    "{}: table admits no linear extension (conflicting images, ‖Δ‖₁ = {:.6})",
                    assignment.display(),
                    w.image_distance
                )))
            }
        }
    }
    let rd = with_path(generator, ReducedDynamics::new(phi.clone(), gen))?;
    let (d_s, d_r) = rd.dims();

    let phi_q = DomainQuery::phi(&phi)?;
    let (phi_center_member, phi_center) = membership(&phi_q, &DensityMatrix::maximally_mixed(d_s))?;
    writeln!(
        text,
        "Φ-domain center I/{d_s}: {} (λmin = {phi_center:.6})",
        if phi_center_member { "member" } else { "NOT a member" }
    )
    .unwrap();
    let mut phi_radii = Vec::new();
    if d_s == 2 && phi_center_member {
        for dir in axis_rays() {
            let r = partialcp::compatdomain::boundary_radius(&phi_q, dir)?;
            phi_radii.push((dir, r));
        }
        let listed: Vec<String> = phi_radii
            .iter()
            .map(|(d, r)| format!("({:+.0},{:+.0},{:+.0}): {r:.6}", d.0[0], d.0[1], d.0[2]))
            .collect();
        writeln!(text, "Φ-domain radii: {}", listed.join(", ")).unwrap();
    }

    if let Some(dir) = &opts.out_dir {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
    }
    let mut audits = Vec::new();
    let mut negative = false;
    for (k, &t) in opts.times.iter().enumerate() {
        let lam = reduced_map(&rd, t)?;
        let cp = is_cp(&lam);
        let lam_q = DomainQuery::new(&Subject::Reduced(rd.clone(), t), Predicate::LambdaPositive)?;
        let (lam_member, lam_center) = membership(&lam_q, &DensityMatrix::maximally_mixed(d_s))?;
        let transfer_file = match &opts.out_dir {
            Some(dir) => {
                let name = format!("transfer_{k:03}.json");
                write_file(&dir.join(&name), &json::to_string(&SuperoperatorJson::transfer(&lam)))?;
                Some(name)
            }
            None => None,
        };
        writeln!(
            text,
            "t = {t:.6}: CP: {} (Choi λmin = {:.6}), TP residual {:.3e}, Λ(I/{d_s}) λmin = {lam_center:.6}",
            if cp.is_cp { "yes" } else { "NO (NCP extension)" },
            cp.min_choi_eigenvalue,
            lam.trace_preservation_residual()
        )
        .unwrap();
        negative |= !cp.is_cp;
        audits.push(TimeAudit {
            t,
            cp: cp.is_cp,
            min_choi_eigenvalue: cp.min_choi_eigenvalue,
            trace_preservation_residual: lam.trace_preservation_residual(),
            lambda_center_member: lam_member,
            lambda_center_min_eigenvalue: lam_center,
            transfer_file,
        });
    }
    let report = ReduceReport {
        d_s,
        d_r,
        extended_from_table: extended,
        phi_center_member,
        phi_center_min_eigenvalue: phi_center,
        phi_radii,
        times: audits,
        seed: opts.seed,
        tol: partialcp::matcore::tol(),
    };
    let report = Report::new(text, report, negative);
    if let Some(dir) = &opts.out_dir {
        write_file(&dir.join("report.json"), &serde_json::to_string_pretty(&report.json).unwrap())?;
    }
    Ok(report)
}

// --------------------------------------------------------------- domain

#[derive(Clone, Debug)]
pub struct DomainOptions {
    pub generator: Option<(PathBuf, f64)>,
    pub predicate: Predicate,
    /// Points per landscape shell; `None` uses the default.
    pub resolution: Option<usize>,
    pub rays: Vec<BlochVector>,
    pub trials: usize,
    pub csv: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Serialize)]
struct CenterOnlyReport {
    predicate: Predicate,
    dim: usize,
    tol: f64,
    seed: u64,
    center_member: bool,
    center_min_eigenvalue: f64,
    empty_interior: bool,
    convexity: Option<ConvexityReport>,
}

pub fn domain(assignment: &Path, opts: &DomainOptions) -> CliResult<Report> {
    let phi = load_assignment(assignment)?;
    let phi = match phi {
        AssignmentMap::Tabulated(t) => match extend_linearly(&t) {
            ExtensionResult::Extension(ext) => ext,
            ExtensionResult::Conflict(_) => {
                return Err(CliError::Usage(format!(
                    "{}: table admits no linear extension",
                    assignment.display()
                )))
            }
        },
        other => other,
    };
    let subject = match &opts.generator {
        Some((path, t)) => {
            let gen = with_path(path, json::parse_generator(&read_file(path)?))?;
            Subject::Reduced(with_path(path, ReducedDynamics::new(phi, gen))?, *t)
        }
        None => Subject::Assignment(phi),
    };
    let q = DomainQuery::new(&subject, opts.predicate)?;
    let name = match opts.predicate {
        Predicate::PhiPositive => "Φρ ≥ 0",
        Predicate::LambdaPositive => "Λρ ≥ 0",
    };
    let mut text = String::new();

    if q.dim() != 2 {
        if opts.resolution.is_some() || !opts.rays.is_empty() || opts.csv.is_some() {
            return Err(CliError::Usage(format!(
                "domain geometry (--resolution, --ray, --csv) needs a qubit system, got dimension {}",
                q.dim()
            )));
        }
        let (member, l) = membership(&q, &DensityMatrix::maximally_mixed(q.dim()))?;
        let convexity = (opts.trials > 0).then(|| convexity_check(&q, opts.trials, opts.seed));
        writeln!(text, "predicate: {name}, dimension {}", q.dim()).unwrap();
        writeln!(text, "center: {} (λmin = {l:.6})", if member { "member" } else { "NOT a member (empty interior)" }).unwrap();
        if let Some(c) = &convexity {
            writeln!(text, "convexity: {} midpoint failures, {} concavity failures over {} trials", c.midpoint_failures, c.concavity_failures, c.trials).unwrap();
        }
        let negative = !member || convexity.as_ref().is_some_and(|c| !c.passed());
        let report = CenterOnlyReport {
            predicate: opts.predicate,
            dim: q.dim(),
            tol: partialcp::matcore::tol(),
            seed: opts.seed,
            center_member: member,
            center_min_eigenvalue: l,
            empty_interior: !member,
            convexity,
        };
        return Ok(Report::new(text, report, negative));
    }

    let options = ReportOptions {
        resolution: opts.resolution.unwrap_or(ReportOptions::default().resolution),
        rays: if opts.rays.is_empty() { axis_rays() } else { opts.rays.clone() },
        convexity_trials: opts.trials,
        seed: opts.seed,
    };
    let report = domain_report(&q, &options)?;
    writeln!(text, "predicate: {name}").unwrap();
    writeln!(
        text,
        "center: {} (λmin = {:.6})",
        if report.center_member { "member" } else { "NOT a member (empty interior)" },
        report.center_min_eigenvalue
    )
    .unwrap();
    for r in &report.radii {
        let [x, y, z] = r.direction;
        writeln!(text, "radius along ({x:+.4}, {y:+.4}, {z:+.4}): {:.8}", r.radius).unwrap();
    }
    let members = report.samples.iter().filter(|s| s[3] >= -partialcp::matcore::tol()).count();
    let lowest = report.samples.iter().map(|s| s[3]).fold(f64::INFINITY, f64::min);
    writeln!(
        text,
        "landscape: {} samples, {members} members, lowest λmin = {lowest:.6}",
        report.samples.len()
    )
    .unwrap();
    if let Some(c) = &report.convexity {
        writeln!(
            text,
            "convexity: {} midpoint failures, {} concavity failures over {} trials",
            c.midpoint_failures, c.concavity_failures, c.trials
        )
        .unwrap();
    }
    if let Some(path) = &opts.csv {
        write_file(path, &report.to_csv())?;
    }
    let negative = report.empty_interior || report.convexity.as_ref().is_some_and(|c| !c.passed());
    Ok(Report::new(text, &report, negative))
}
