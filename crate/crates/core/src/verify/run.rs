use std::collections::BTreeMap;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::checks::{registry, CheckDef, Ctx, Expectation, Outcome, Suite};
use super::config::SuiteConfig;
use super::report::{CheckRecord, Metadata, SpectrumRecord, Status, Timing, VerificationReport};
use crate::error::{Error, Result};
use crate::fiber::FiberBasis;
use crate::spinor::SpinorCalculus;

/// Registry entries named by `selection`, in registry order. Suite names
/// select every check of that suite; an empty selection selects all.
pub fn select_checks(selection: &[String]) -> Result<Vec<CheckDef>> {
    let all = registry();
    if selection.is_empty() {
        return Ok(all);
    }
    let mut wanted = vec![false; all.len()];
    for name in selection {
        let name = name.trim();
        if let Some(suite) = Suite::ALL.into_iter().find(|s| s.as_str() == name) {
            for (w, c) in wanted.iter_mut().zip(&all) {
                *w |= c.suite == suite;
            }
        } else if let Some(i) = all.iter().position(|c| c.name == name) {
            wanted[i] = true;
        } else {
            return Err(Error::Config(format!("unknown check `{name}`")));
        }
    }
    Ok(all.into_iter().zip(wanted).filter(|(_, w)| *w).map(|(c, _)| c).collect())
}

struct Executed {
    record: CheckRecord,
    outcome: Option<Outcome>,
    seconds: f64,
}

fn execute(ctx: &Ctx, def: &CheckDef, index: usize, cfg: &SuiteConfig) -> Executed {
    let tolerance = cfg.tolerances.get(def.name).copied().unwrap_or(def.tolerance) * cfg.tol_scale;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
    let start = Instant::now();
    let result = (def.run)(ctx, &mut rng);
    let seconds = start.elapsed().as_secs_f64();
    let mut record = CheckRecord {
        name: def.name.to_string(),
        suite: def.suite,
        anchor: def.anchor.to_string(),
        residual: None,
        tolerance,
        expectation: def.expectation,
        status: Status::Fail,
        note: None,
    };
    let outcome = match result {
        Ok(out) => {
            record.note = out.note.clone();
            if out.residual.is_finite() {
                record.residual = Some(out.residual);
                let ok = match def.expectation {
                    Expectation::AtMost => out.residual <= tolerance,
                    Expectation::AtLeast => out.residual >= tolerance,
                };
                record.status = if ok { Status::Pass } else { Status::Fail };
            } else {
                let msg = format!("non-finite residual {}", out.residual);
                record.note = Some(match record.note.take() {
                    Some(n) => format!("{msg}; {n}"),
                    None => msg,
                });
            }
            Some(out)
        }
        Err(Error::Hypothesis(why)) => {
            record.status = Status::Skipped;
            record.note = Some(format!("hypothesis: {why}"));
            None
        }
        Err(e) => {
            record.note = Some(format!("error: {e}"));
            None
        }
    };
    Executed { record, outcome, seconds }
}

/// Builds the model named by `cfg` and runs the selected checks.
pub fn run_suite(cfg: &SuiteConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let defs = select_checks(&cfg.checks)?;
    let known = registry();
    for name in cfg.tolerances.keys() {
        if !known.iter().any(|c| c.name == name) {
            return Err(Error::Config(format!("tolerance given for unknown check `{name}`")));
        }
    }
    let started_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let clock = Instant::now();
    let model = cfg.build_model()?;
    let basis = FiberBasis::new(cfg.n, cfg.level)?;
    let calc = SpinorCalculus::new(model.clone(), basis)?;
    let ctx = Ctx::new(model, calc);

    let executed: Vec<Executed> =
        defs.par_iter().enumerate().map(|(i, def)| execute(&ctx, def, index_of(&known, def, i), cfg)).collect();

    let mut checks = Vec::with_capacity(executed.len());
    let mut spectra = Vec::new();
    let mut check_seconds = BTreeMap::new();
    let mut max_aliasing = 0.0_f64;
    for ex in executed {
        check_seconds.insert(ex.record.name.clone(), ex.seconds);
        if let Some(out) = ex.outcome {
            if out.aliasing.is_finite() {
                max_aliasing = max_aliasing.max(out.aliasing);
            }
            if let Some(spectrum) = out.spectrum {
                spectra.push(SpectrumRecord { check: ex.record.name.clone(), spectrum });
            }
        }
        checks.push(ex.record);
    }
    let status = if checks.iter().any(|c| c.status == Status::Fail) { Status::Fail } else { Status::Pass };
    let metadata = Metadata {
        model: cfg.model_name()?.to_string(),
        flags: ctx.model.flags().into(),
        n: cfg.n,
        level: cfg.level,
        modes: cfg.modes,
        seed: cfg.seed,
        model_seed: cfg.model_seed.unwrap_or(cfg.seed),
        tol_scale: cfg.tol_scale,
        library_version: env!("CARGO_PKG_VERSION").to_string(),
        max_aliasing,
        density_quadrature_error: ctx.model.density_quadrature_error(),
    };
    let timing = Timing { started_unix, total_seconds: clock.elapsed().as_secs_f64(), check_seconds };
    Ok(VerificationReport { metadata, status, checks, spectra, timing })
}

/// The seed offset of a check is its registry position, so selecting a
/// subset does not change any check's random data.
fn index_of(all: &[CheckDef], def: &CheckDef, fallback: usize) -> usize {
    all.iter().position(|c| c.name == def.name).unwrap_or(fallback)
}

/// Writes the report and spectra files requested in `cfg.output`.
pub fn write_outputs(report: &VerificationReport, cfg: &SuiteConfig) -> Result<()> {
    if let Some(path) = &cfg.output.report {
        report.write(path, cfg.output.format)?;
    }
    if let Some(path) = &cfg.output.spectra_csv {
        report.write_spectra_csv(path)?;
    }
    Ok(())
}
