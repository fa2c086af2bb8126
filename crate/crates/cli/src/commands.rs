use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use nhforce_core::dynamics::integrate;
use nhforce_core::matching::solve_match;
use nhforce_core::verify::{run_property_suite, SuiteConfig, SuiteReport};
use nhforce_core::{
    DeformationFamily, FamilyId, ForceField, MatchKind, MatchResult, Tau, Trajectory, Treatment,
};
use rayon::prelude::*;

use crate::error::CliError;
use crate::scenario::{suffixed, ScenarioFile, TreatmentKind};

fn write_trajectory(traj: &Trajectory, path: &Path) -> Result<(), CliError> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut out = BufWriter::new(file);
    traj.write_csv(&mut out).map_err(|e| CliError::io(path, e))?;
    out.flush().map_err(|e| CliError::io(path, e))
}

/// Integrate the file's treatment(s) and write the CSV output(s).
pub fn run(path: &Path, out: &mut impl Write) -> Result<(), CliError> {
    let spec = ScenarioFile::load(path)?;
    let output = spec.require_output(path)?.to_path_buf();
    let deformed = || spec.scenario.with_family(spec.family);

    match spec.treatment {
        TreatmentKind::Nc => {
            let traj = integrate(&deformed(), Treatment::Noncommutative)?;
            write_trajectory(&traj, &output)?;
            report_written(out, &output, &traj);
        }
        TreatmentKind::Classical => {
            let tf = spec.transform.expect("checked by parser");
            let traj = integrate(&spec.scenario, Treatment::Transformed(tf))?;
            write_trajectory(&traj, &output)?;
            report_written(out, &output, &traj);
        }
        TreatmentKind::Both => {
            let tf = spec.transform.expect("checked by parser");
            let nc = integrate(&deformed(), Treatment::Noncommutative)?;
            let cl = integrate(&spec.scenario, Treatment::Transformed(tf))?;
            let (nc_path, cl_path) = (suffixed(&output, "nc"), suffixed(&output, "cl"));
            write_trajectory(&nc, &nc_path)?;
            write_trajectory(&cl, &cl_path)?;
            report_written(out, &nc_path, &nc);
            report_written(out, &cl_path, &cl);
            let _ = writeln!(out, "max position deviation: {:.6e}", nc.max_position_gap(&cl)?);
        }
    }
    Ok(())
}

fn report_written(out: &mut impl Write, path: &Path, traj: &Trajectory) {
    let _ = writeln!(
        out,
        "wrote {} ({} samples, {})",
        path.display(),
        traj.samples.len(),
        traj.treatment.label()
    );
}

pub struct MatchArgs {
    pub family: FamilyId,
    pub kappa: f64,
    pub force: [f64; 3],
    pub mass: f64,
    pub tau: Option<f64>,
}

/// Solve and print; `Ok(true)` iff a transformation exists.
pub fn match_family(args: &MatchArgs, json: bool, out: &mut impl Write) -> Result<bool, CliError> {
    let tau = match args.tau {
        Some(v) => Tau::finite(v)?,
        None => Tau::Infinite,
    };
    let family = DeformationFamily::new(args.family, args.kappa, tau)?;
    let result = solve_match(&family, &ForceField::new(args.force)?, args.mass)?;
    if json {
        let text = serde_json::to_string_pretty(&result).map_err(|e| CliError::Invalid(e.to_string()))?;
        let _ = writeln!(out, "{text}");
    } else {
        print_match(&result, out);
    }
    Ok(result.exists)
}

fn relation(kind: MatchKind) -> &'static str {
    match kind {
        MatchKind::Trivial => "a(t) = 0",
        MatchKind::Quadratic => "b1 = -kappa*F2/4, b2 = kappa*F1/4",
        MatchKind::Cubic => "c1 = -kappa*F2/6, c2 = kappa*F1/6 (k5: kappa = kappa5/2)",
        MatchKind::None => "-",
    }
}

/// `-0` prints as `0`.
fn clean(v: f64) -> f64 {
    v + 0.0
}

fn print_match(r: &MatchResult, out: &mut impl Write) {
    let fam = &r.matched_family;
    let [f1, f2, f3] = r.force.0;
    let _ = writeln!(out, "family:   {} (kappa = {}, tau = {})", fam.id(), fam.kappa(), fam.tau());
    let _ = writeln!(out, "force:    F = ({f1}, {f2}, {f3}), m = {}", r.mass);
    if r.exists {
        let _ = writeln!(out, "verdict:  match ({})", r.kind);
    } else {
        let _ = writeln!(out, "verdict:  no match");
    }
    let _ = writeln!(out, "relation: {}", relation(r.kind));
    let _ = writeln!(out, "note:     {}", r.notes);
    let _ = writeln!(out, "residual: {:.3e} (tolerance {:.3e})", r.residual_bound, r.tolerance);
    match (&r.tf, &r.best_fit) {
        (Some(tf), _) => {
            let _ = writeln!(out, "\n[transform]");
            for (name, v) in tf.named_coefficients() {
                let _ = writeln!(out, "{name} = {}", clean(v));
            }
            let _ = writeln!(out, "tau = \"{}\"", tf.tau);
        }
        (None, Some(fit)) => {
            let _ = writeln!(out, "\nbest least-squares candidate (not a match):");
            for (name, v) in fit.named_coefficients() {
                let _ = writeln!(out, "  {name} = {:e}", clean(v));
            }
        }
        (None, None) => {}
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub tau: f64,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub family: DeformationFamily,
    pub rows: Vec<SweepRow>,
    /// Least-squares slope of `−ln(deviation)` against `ln τ`; needs two
    /// rows with non-zero deviation.
    pub order: Option<f64>,
}

/// Max position gap between each finite-τ run and the τ → ∞ run.
pub fn sweep_tau(path: &Path, taus: &[f64]) -> Result<SweepTable, CliError> {
    let spec = ScenarioFile::load(path)?;
    let family = spec.require_family(path)?;
    if taus.is_empty() {
        return Err(CliError::Invalid("tau list is empty".into()));
    }
    if taus.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Invalid("tau list must be strictly increasing".into()));
    }
    let families = taus.iter().map(|&t| family.with_tau(Tau::finite(t)?)).collect::<Result<Vec<_>, _>>()?;

    let limit = integrate(&spec.scenario.with_family(Some(family.limit_form())), Treatment::Noncommutative)?;
    let gaps = families
        .par_iter()
        .map(|fam| {
            let traj = integrate(&spec.scenario.with_family(Some(*fam)), Treatment::Noncommutative)?;
            traj.max_position_gap(&limit)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let rows: Vec<SweepRow> =
        taus.iter().zip(gaps).map(|(&tau, max_deviation)| SweepRow { tau, max_deviation }).collect();
    let order = fitted_order(&rows);
    Ok(SweepTable { family, rows, order })
}

fn fitted_order(rows: &[SweepRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        rows.iter().filter(|r| r.max_deviation > 0.0).map(|r| (r.tau.ln(), r.max_deviation.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(-sxy / sxx)
}

pub fn print_sweep(table: &SweepTable, out: &mut impl Write) {
    let fam = &table.family;
    let _ = writeln!(out, "family {} kappa = {}; deviation from the tau -> inf run", fam.id(), fam.kappa());
    let _ = writeln!(out, "{:>14}  {:>24}  {:>10}", "tau", "max_deviation", "ratio");
    for (i, row) in table.rows.iter().enumerate() {
        let ratio = match i {
            0 => "-".to_string(),
            _ if row.max_deviation == 0.0 => "-".to_string(),
            _ => format!("{:.4}", table.rows[i - 1].max_deviation / row.max_deviation),
        };
        let _ = writeln!(out, "{:>14}  {:>24.16e}  {:>10}", row.tau, row.max_deviation, ratio);
    }
    match table.order {
        Some(p) => {
            let _ = writeln!(out, "fitted order: {p:.4}");
        }
        None => {
            let _ = writeln!(out, "fitted order: n/a");
        }
    }
}

pub fn verify(config: &SuiteConfig, out: &mut impl Write) -> Result<SuiteReport, CliError> {
    let report = run_property_suite(config)?;
    for check in &report.checks {
        let _ = writeln!(out, "{check}");
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    let _ = writeln!(out, "{} checks, {} failed", report.checks.len(), failed);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_of_exact_power_law() {
        let rows: Vec<SweepRow> = [10.0, 20.0, 40.0]
            .iter()
            .map(|&t: &f64| SweepRow { tau: t, max_deviation: 3.0 / (t * t) })
            .collect();
        assert!((fitted_order(&rows).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(fitted_order(&rows[..1]), None);
        let zeros =
            vec![SweepRow { tau: 1.0, max_deviation: 0.0 }, SweepRow { tau: 2.0, max_deviation: 0.0 }];
        assert_eq!(fitted_order(&zeros), None);
    }

    #[test]
    fn match_prints_pasteable_transform() {
        let args =
            MatchArgs { family: FamilyId::K2, kappa: 0.1, force: [0.0, 1.0, 0.0], mass: 1.0, tau: None };
        let mut buf = Vec::new();
        assert!(match_family(&args, false, &mut buf).unwrap());
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("b1 = -0.025\n"), "{text}");
        assert!(text.contains("b2 = 0\n"));
        assert!(!text.contains("-0\n"));
    }
}
