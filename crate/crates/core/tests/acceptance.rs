//! Acceptance criteria, one pass/fail line each. Exits non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use tsdirac_core::verify::{run_suite, CheckRecord, Status, SuiteConfig, VerificationReport};

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

struct Run {
    cfg: SuiteConfig,
}

impl Run {
    fn new(model: &str) -> Self {
        Run { cfg: SuiteConfig { model: model.into(), ..Default::default() } }
    }

    fn n(mut self, n: usize) -> Self {
        self.cfg.n = n;
        self
    }

    fn modes(mut self, k: i32) -> Self {
        self.cfg.modes = k;
        self
    }

    fn h(mut self, h: f64) -> Self {
        self.cfg.h = h;
        self
    }

    fn j_compatible(mut self) -> Self {
        self.cfg.j_compatible = true;
        self
    }

    fn tol(mut self, check: &str, tol: f64) -> Self {
        self.cfg.tolerances.insert(check.into(), tol);
        self
    }

    fn only(mut self, checks: &[&str]) -> Result<VerificationReport, String> {
        self.cfg.checks = checks.iter().map(|s| s.to_string()).collect();
        let label = self.label();
        run_suite(&self.cfg).map_err(|e| format!("{label}: {e}"))
    }

    fn label(&self) -> String {
        let mut s = format!("{} n={} K={}", self.cfg.model, self.cfg.n, self.cfg.modes);
        if self.cfg.model == "chsc-fiber" {
            s += &format!(" h={}", self.cfg.h);
        }
        if self.cfg.j_compatible {
            s += " (J-compatible)";
        }
        s
    }
}

fn record<'a>(report: &'a VerificationReport, name: &str) -> Result<&'a CheckRecord, String> {
    report.check(name).ok_or_else(|| format!("{name} missing from report"))
}

/// The check must pass with its residual within `bound`.
fn pass(report: &VerificationReport, name: &str, bound: f64) -> Result<f64, String> {
    let r = record(report, name)?;
    let where_ = &report.metadata.model;
    match (r.status, r.residual) {
        (Status::Pass, Some(x)) if x <= bound => Ok(x),
        (status, residual) => Err(format!(
            "{name} on {where_}: {} residual {residual:?} (bound {bound:e}) {}",
            status.as_str(),
            r.note.as_deref().unwrap_or("")
        )),
    }
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

fn weyl_algebra() -> Verdict {
    let mut res = Vec::new();
    for n in [1, 2] {
        let r = Run::new("chsc-fiber").n(n).only(&["canonical_commutation", "hamilton_spectrum"])?;
        res.push(pass(&r, "canonical_commutation", 1e-12)?);
        res.push(pass(&r, "hamilton_spectrum", 1e-12)?);
    }
    Ok(format!("n ∈ {{1,2}}, L = 8, 50 pairs; max residual {:.1e}", worst(res)))
}

fn clifford_skew_adjointness() -> Verdict {
    let mut res = Vec::new();
    for n in [1, 2] {
        let r = Run::new("chsc-fiber").n(n).only(&["clifford_skew_adjoint"])?;
        res.push(pass(&r, "clifford_skew_adjoint", 1e-14)?);
    }
    Ok(format!("max |σ + σ*| = {:.1e}", worst(res)))
}

fn divergence_theorem() -> Verdict {
    let flat = Run::new("flat-kahler-torus").only(&["divergence_theorem"])?;
    let torsion = Run::new("torsion-perturbed-symplectic").only(&["divergence_theorem_minimal"])?;
    let warped = Run::new("warped-non-taut").only(&["divergence_theorem_fedosov"])?;
    let res = [
        pass(&flat, "divergence_theorem", 1e-10)?,
        pass(&torsion, "divergence_theorem_minimal", 1e-10)?,
        pass(&warped, "divergence_theorem_fedosov", 1e-10)?,
    ];
    Ok(format!("20 sections per model; max residual {:.1e}", worst(res)))
}

const MODELS: [&str; 6] = [
    "flat-kahler-torus",
    "heisenberg-flow",
    "warped-non-taut",
    "symmetric-perturbed-fedosov",
    "torsion-perturbed-symplectic",
    "chsc-fiber",
];

fn self_adjointness() -> Verdict {
    let mut res = Vec::new();
    let mut tilde_models = 0;
    for m in MODELS {
        let r = Run::new(m).only(&["dirac_self_adjoint", "dirac_tilde_self_adjoint"])?;
        res.push(pass(&r, "dirac_self_adjoint", 1e-10)?);
        if r.metadata.flags.preserves_j {
            res.push(pass(&r, "dirac_tilde_self_adjoint", 1e-10)?);
            tilde_models += 1;
        } else if record(&r, "dirac_tilde_self_adjoint")?.status != Status::Skipped {
            return Err(format!("dirac_tilde_self_adjoint on {m} should be skipped: ∇J ≠ 0"));
        }
    }
    let warped = Run::new("warped-non-taut").only(&["adjoint_negative_control"])?;
    let control = record(&warped, "adjoint_negative_control")?;
    let margin = control.residual.unwrap_or(0.0);
    if control.status != Status::Pass || margin < 10.0 * 1e-10 {
        return Err(format!("D′ defect {margin:e} on warped-non-taut is not ≥ 10 × 1e-10"));
    }
    Ok(format!(
        "D on 6 models, D̃ on {tilde_models}; max residual {:.1e}; D′ defect {margin:.2e}",
        worst(res)
    ))
}

fn weitzenbock() -> Verdict {
    let mut res = Vec::new();
    let t = Run::new("torsion-perturbed-symplectic").only(&["weitzenbock_general"])?;
    res.push(pass(&t, "weitzenbock_general", 1e-8)?);
    let s = Run::new("symmetric-perturbed-fedosov").only(&["weitzenbock_general", "weitzenbock_fedosov"])?;
    res.push(pass(&s, "weitzenbock_general", 1e-8)?);
    res.push(pass(&s, "weitzenbock_fedosov", 1e-8)?);
    let sj = Run::new("symmetric-perturbed-fedosov").j_compatible().only(&["weitzenbock_general"])?;
    res.push(pass(&sj, "weitzenbock_general", 1e-8)?);
    let mut flat = Vec::new();
    for m in ["flat-kahler-torus", "heisenberg-flow"] {
        let r = Run::new(m).only(&["weitzenbock_general", "weitzenbock_minimal_fedosov_parallel_j"])?;
        flat.push(pass(&r, "weitzenbock_general", 1e-9)?);
        flat.push(pass(&r, "weitzenbock_minimal_fedosov_parallel_j", 1e-9)?);
    }
    Ok(format!("perturbed max {:.1e}, flat max {:.1e}", worst(res), worst(flat)))
}

fn grading() -> Verdict {
    let mut res = Vec::new();
    let mut count = 0;
    let runs = MODELS
        .iter()
        .map(|m| Run::new(m))
        .chain([Run::new("symmetric-perturbed-fedosov").j_compatible()]);
    for run in runs {
        let r = run.only(&["p_level_block_diagonal"])?;
        if r.metadata.flags.preserves_j {
            res.push(pass(&r, "p_level_block_diagonal", 1e-10)?);
            count += 1;
        }
    }
    let mut needed = Vec::new();
    for m in ["symmetric-perturbed-fedosov", "torsion-perturbed-symplectic"] {
        let r = Run::new(m).only(&["hamilton_derivative", "hamilton_derivative_correction_needed"])?;
        pass(&r, "hamilton_derivative", 1e-8)?;
        let c = record(&r, "hamilton_derivative_correction_needed")?;
        if c.status != Status::Pass {
            return Err(format!("∇J term not shown necessary on {m}"));
        }
        needed.push(c.residual.unwrap_or(0.0));
    }
    Ok(format!(
        "block leakage ≤ {:.1e} on {count} ∇J = 0 models; residual without the ∇J term ≥ {:.2e}",
        worst(res),
        needed.iter().copied().fold(f64::INFINITY, f64::min)
    ))
}

fn vacuum_sector() -> Verdict {
    let mut exact = Vec::new();
    let mut curv = Vec::new();
    let mut thm = Vec::new();
    let mut runs: Vec<Run> = [-2.0, 0.0, 1.0].into_iter().map(|h| Run::new("chsc-fiber").h(h)).collect();
    runs.push(Run::new("symmetric-perturbed-fedosov").j_compatible());
    runs.push(Run::new("flat-kahler-torus"));
    for run in runs {
        let r = run.only(&["vacuum_clifford_j", "vacuum_curvature", "weitzenbock_vacuum"])?;
        exact.push(pass(&r, "vacuum_clifford_j", 1e-12)?);
        curv.push(pass(&r, "vacuum_curvature", 1e-9)?);
        thm.push(pass(&r, "weitzenbock_vacuum", 1e-8)?);
    }
    Ok(format!(
        "Q(J)φ₀ residual {:.1e}; F(φ₀) = (i/4)rφ₀ residual {:.1e}; level-0 Weitzenböck {:.1e}",
        worst(exact),
        worst(curv),
        worst(thm)
    ))
}

fn constant_curvature_algebra() -> Verdict {
    const FIBERWISE: [&str; 8] = [
        "holomorphic_sectional_curvature",
        "constant_curvature_tensor",
        "ricci_spinor_curvature",
        "ricci_clifford_scalar",
        "constant_curvature_action",
        "weitzenbock_constant_curvature",
        "weitzenbock_constant_curvature_vacuum",
        "curvature_symplectic_symmetry",
    ];
    let mut res = Vec::new();
    let mut scalar = Vec::new();
    for n in [1, 2] {
        for h in [-2.0, 0.0, 1.0] {
            let mut run = Run::new("chsc-fiber").n(n).h(h);
            for c in FIBERWISE {
                run = run.tol(c, 1e-11);
            }
            let mut checks = FIBERWISE.to_vec();
            checks.push("scalar_curvature_constant");
            let r = run.only(&checks)?;
            for c in FIBERWISE {
                res.push(pass(&r, c, 1e-11)?);
            }
            scalar.push(pass(&r, "scalar_curvature_constant", 1e-12)?);
        }
    }
    Ok(format!("h ∈ {{−2,0,1}}, n ∈ {{1,2}}; max residual {:.1e}; r = h n(n+1) to {:.1e}", worst(res), worst(scalar)))
}

fn golden_spectrum() -> Verdict {
    let r = Run::new("flat-kahler-torus").modes(1).only(&[
        "flat_golden_spectrum",
        "eigenvalue_bound_nonpositive_curvature",
        "vacuum_eigenvalue_bound",
    ])?;
    let gap = pass(&r, "flat_golden_spectrum", 1e-9)?;
    pass(&r, "eigenvalue_bound_nonpositive_curvature", 1e-9)?;
    pass(&r, "vacuum_eigenvalue_bound", 1e-9)?;
    let spec = &r
        .spectra
        .iter()
        .find(|s| s.check == "flat_golden_spectrum")
        .ok_or("golden spectrum not attached")?
        .spectrum;
    let four_pi_sq = 4.0 * std::f64::consts::PI.powi(2);
    let per_mode = spec.max_level + 1;
    let mut counts = [0usize; 3];
    for e in &spec.entries {
        let m = (e.value / four_pi_sq).round();
        if !(0.0..=2.0).contains(&m) || (e.value - m * four_pi_sq).abs() > 1e-9 {
            return Err(format!("eigenvalue {} is not in {{0, 4π², 8π²}}", e.value));
        }
        counts[m as usize] += 1;
    }
    if counts != [per_mode, 4 * per_mode, 4 * per_mode] {
        return Err(format!("multiplicities {counts:?}, expected (1, 4, 4) × {per_mode}"));
    }
    let min = spec.min().unwrap_or(f64::NAN);
    if min.is_nan() || min < -1e-10 {
        return Err(format!("min eigenvalue {min:e} below −1e-10"));
    }
    Ok(format!("multiplicities {counts:?}, gap {gap:.1e}, λmin = {min:.1e}"))
}

fn determinism() -> Verdict {
    let cfg = SuiteConfig { model: "warped-non-taut".into(), seed: 17, ..Default::default() };
    let a = run_suite(&cfg).map_err(|e| e.to_string())?;
    let b = run_suite(&cfg).map_err(|e| e.to_string())?;
    let (ja, jb) = (a.without_timing().to_json().map_err(|e| e.to_string())?, b.without_timing().to_json().map_err(|e| e.to_string())?);
    if ja != jb {
        return Err("JSON reports differ".into());
    }
    Ok(format!("{} bytes identical across two runs, {} checks", ja.len(), a.checks.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("weyl algebra: commutation and H₀ spectrum", weyl_algebra),
        ("skew-adjoint Clifford multiplication", clifford_skew_adjointness),
        ("divergence theorem", divergence_theorem),
        ("self-adjointness of D and D̃, D′ negative control", self_adjointness),
        ("Weitzenböck formula", weitzenbock),
        ("grading and the ∇J correction", grading),
        ("vacuum sector", vacuum_sector),
        ("constant holomorphic sectional curvature algebra", constant_curvature_algebra),
        ("golden flat spectrum", golden_spectrum),
        ("deterministic reports", determinism),
    ];
    let mut failed = 0;
    for (i, (title, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = f();
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {title}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {title}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
