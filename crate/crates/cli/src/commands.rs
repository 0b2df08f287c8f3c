use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use nvneumann::bie::{AssemblyOptions, OperatorSet};
use nvneumann::geometry::Point;
use nvneumann::neumann::{self, check_compatibility, Compatibility, NeumannSolution};
use nvneumann::oracles::{verify_suite, VerifyOptions};

use crate::config::ProblemConfig;
use crate::{exit, CliError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sweep {
    N(Vec<usize>),
    K(Vec<usize>),
}

pub fn parse_sweep(s: &str) -> Result<Sweep, String> {
    let (key, list) = s.split_once('=').ok_or("expected N=a,b,... or K=a,b,...")?;
    let values = list
        .split(',')
        .map(|v| v.trim().parse::<usize>().map_err(|e| format!("'{v}': {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("empty sweep".into());
    }
    match key.trim() {
        "N" | "n" => Ok(Sweep::N(values)),
        "K" | "k" => Ok(Sweep::K(values)),
        other => Err(format!("unknown sweep variable '{other}' (use N or K)")),
    }
}

fn num(x: f64) -> String {
    format!("{x:.17e}")
}

fn compat_lines(c: &Compatibility, out: &mut String) {
    for (j, (d, t)) in c.defects.iter().zip(&c.tolerances).enumerate() {
        let status = if d.abs() <= *t { "ok" } else { "VIOLATED" };
        let _ = writeln!(out, "  component {j:<3} defect {d:+.6e}  tol {t:.3e}  {status}");
    }
}

struct Solved {
    solution: NeumannSolution,
    probes: Vec<Point>,
    values: Vec<f64>,
}

fn run_solve(cfg: &ProblemConfig, tol_scale: f64) -> Result<Solved, CliError> {
    let disc = cfg.discretize()?;
    let problem = cfg.problem(disc.clone(), tol_scale)?;
    let ops = OperatorSet::assemble(disc.clone(), AssemblyOptions::default())?;
    let solution = neumann::solve(&problem, &ops)?;
    let probes = cfg.probes(&disc);
    let values = probes
        .iter()
        .map(|p| solution.eval(*p))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Solved {
        solution,
        probes,
        values,
    })
}

/// Probe table; numbers in round-trip precision.
pub fn probe_csv(probes: &[Point], values: &[f64], exact: Option<&[f64]>) -> String {
    let mut s = String::from(if exact.is_some() {
        "x,y,u,u_exact,error\n"
    } else {
        "x,y,u\n"
    });
    for (i, (p, u)) in probes.iter().zip(values).enumerate() {
        let _ = write!(s, "{},{},{}", num(p[0]), num(p[1]), num(*u));
        if let Some(e) = exact {
            let _ = write!(s, ",{},{}", num(e[i]), num(u - e[i]));
        }
        s.push('\n');
    }
    s
}

pub fn solve(path: &Path, tol_scale: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ProblemConfig::load(path)?;
    let mut report = String::new();
    let _ = writeln!(
        report,
        "config      {}",
        serde_json::to_string(&cfg).expect("config serializes")
    );
    let disc = cfg.discretize()?;
    let compat = check_compatibility(&cfg.problem(disc, tol_scale)?)?;
    let _ = writeln!(report, "compatibility");
    compat_lines(&compat, &mut report);
    if !compat.ok() {
        out.write_all(report.as_bytes())?;
        return Err(CliError::Incompatible(format!("defects {:?}", compat.defects)));
    }
    let solved = run_solve(&cfg, tol_scale)?;
    let sol = &solved.solution;
    let tol = sol.residuals.iter().map(|r| r.tolerance).fold(f64::INFINITY, f64::min);
    let _ = writeln!(report, "residual    max {:.6e}  tol {:.3e}", sol.max_residual(), tol);
    let _ = writeln!(
        report,
        "tail        {:.6e}  (orders K+1..2K, informational)",
        sol.tail_residual
    );
    let _ = writeln!(
        report,
        "galerkin    cond {:?}",
        sol.galerkin_condition
            .iter()
            .map(|c| format!("{c:.3e}"))
            .collect::<Vec<_>>()
    );
    let _ = writeln!(
        report,
        "constants   {:?}",
        sol.constants.iter().map(|c| format!("{c:+.6e}")).collect::<Vec<_>>()
    );
    let _ = writeln!(report, "converged   {}", if sol.converged { "yes" } else { "no" });
    let exact = match cfg.oracle_field()? {
        Some(u) => Some(
            solved
                .probes
                .iter()
                .map(|p| u.eval(*p))
                .collect::<Result<Vec<_>, _>>()?,
        ),
        None => None,
    };
    let _ = writeln!(report, "probes");
    let _ = writeln!(report, "  {:>12} {:>12} {:>20}", "x", "y", "u");
    for (p, u) in solved.probes.iter().zip(&solved.values) {
        let _ = writeln!(report, "  {:>12.6} {:>12.6} {:>20.12e}", p[0], p[1], u);
    }
    if let Some(e) = &exact {
        let err = solved
            .values
            .iter()
            .zip(e)
            .fold(0.0f64, |m, (u, x)| m.max((u - x).abs()));
        let _ = writeln!(report, "oracle      max probe error {err:.6e}");
    }
    out.write_all(report.as_bytes())?;
    if let Some(csv) = &cfg.outputs.csv {
        std::fs::write(csv, probe_csv(&solved.probes, &solved.values, exact.as_deref()))?;
        writeln!(out, "csv         {}", csv.display())?;
    }
    if !sol.converged {
        return Err(CliError::NotConverged(format!(
            "max residual {:.3e} exceeds tolerance",
            sol.max_residual()
        )));
    }
    Ok(exit::OK)
}

pub fn check_compat(path: &Path, tol_scale: f64, out: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = ProblemConfig::load(path)?;
    let disc = cfg.discretize()?;
    let compat = check_compatibility(&cfg.problem(disc, tol_scale)?)?;
    let mut report = String::from("compatibility\n");
    compat_lines(&compat, &mut report);
    out.write_all(report.as_bytes())?;
    if compat.ok() {
        Ok(exit::OK)
    } else {
        Err(CliError::Incompatible(format!("defects {:?}", compat.defects)))
    }
}

pub fn verify(filter: Option<String>, flip_kprime: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let checks = verify_suite(&VerifyOptions { filter, flip_kprime });
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
    writeln!(
        out,
        "{:<width$}  {:>14}  {:>14}  {:>9}  status",
        "check", "expected", "got", "tol"
    )?;
    for c in &checks {
        writeln!(
            out,
            "{:<width$}  {:>+14.6e}  {:>+14.6e}  {:>9.1e}  {}",
            c.name,
            c.expected,
            c.got,
            c.tol,
            if c.pass() { "ok" } else { "FAIL" }
        )?;
    }
    let failed: Vec<_> = checks.iter().filter(|c| !c.pass()).collect();
    writeln!(out, "{} checks, {} failed", checks.len(), failed.len())?;
    if checks.is_empty() {
        writeln!(out, "no check matches the filter")?;
        return Ok(exit::VERIFY_FAILED);
    }
    if failed.is_empty() {
        return Ok(exit::OK);
    }
    for c in failed {
        writeln!(out, "failed: {}", c.name)?;
    }
    Ok(exit::VERIFY_FAILED)
}

/// Largest probe error after removing the best per-component constant
/// (solutions are unique only up to locally constant functions).
fn aligned_error(disc: &nvneumann::quadrature::Discretization, probes: &[Point], u: &[f64], exact: &[f64]) -> f64 {
    let comp: Vec<Option<usize>> = probes
        .iter()
        .map(|p| disc.domain.component_of(*p).map(|c| c.0))
        .collect();
    let mut err = 0.0f64;
    for j in 0..disc.domain.len() {
        let idx: Vec<usize> = (0..probes.len()).filter(|&i| comp[i] == Some(j)).collect();
        if idx.is_empty() {
            continue;
        }
        let shift = idx.iter().map(|&i| u[i] - exact[i]).sum::<f64>() / idx.len() as f64;
        for &i in &idx {
            err = err.max((u[i] - exact[i] - shift).abs());
        }
    }
    err
}

pub fn converge(
    path: &Path,
    sweep: &Sweep,
    tol_scale: f64,
    csv_path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let cfg = ProblemConfig::load(path)?;
    let oracle = cfg.oracle_field()?.ok_or(CliError::NoOracle)?;
    let (label, values) = match sweep {
        Sweep::N(v) => ("N", v),
        Sweep::K(v) => ("K", v),
    };
    let mut csv = format!("{label},max_probe_error,residual\n");
    let mut errors = Vec::with_capacity(values.len());
    for &v in values {
        let mut c = cfg.clone();
        match sweep {
            Sweep::N(_) => c.discretization.n = v,
            Sweep::K(_) => c.discretization.k = v,
        }
        c.validate()?;
        let solved = run_solve(&c, tol_scale)?;
        let exact = solved
            .probes
            .iter()
            .map(|p| oracle.eval(*p))
            .collect::<Result<Vec<_>, _>>()?;
        let err = aligned_error(solved.solution.disc(), &solved.probes, &solved.values, &exact);
        let _ = writeln!(csv, "{v},{},{}", num(err), num(solved.solution.max_residual()));
        errors.push(err);
    }
    match csv_path {
        Some(p) => std::fs::write(p, &csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    // plateaus at the quadrature floor are allowed
    if let Some(w) = errors.windows(2).position(|w| w[1] > w[0] + 1e-9) {
        return Err(CliError::NotConverged(format!(
            "probe error increases from {label} = {} to {label} = {}",
            values[w],
            values[w + 1]
        )));
    }
    Ok(exit::OK)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweeps_parse() {
        assert_eq!(parse_sweep("N=64,128,256"), Ok(Sweep::N(vec![64, 128, 256])));
        assert_eq!(parse_sweep("K=4, 8"), Ok(Sweep::K(vec![4, 8])));
        assert!(parse_sweep("M=4").is_err());
        assert!(parse_sweep("N=4,x").is_err());
        assert!(parse_sweep("N").is_err());
    }

    #[test]
    fn csv_is_round_trip_precise() {
        let s = probe_csv(&[[0.1, 0.2]], &[1.0 / 3.0], Some(&[0.3]));
        let line = s.lines().nth(1).unwrap();
        let u: f64 = line.split(',').nth(2).unwrap().parse().unwrap();
        assert_eq!(u, 1.0 / 3.0);
        assert!(s.starts_with("x,y,u,u_exact,error\n"));
    }
}
