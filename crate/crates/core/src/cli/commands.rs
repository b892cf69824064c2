//! One builder per command, each turning a validated configuration into a
//! [`Report`].

use serde_json::{json, Value};

use super::config::{CommandKind, OracleChoice, PotentialConfig, RunConfig};
use super::output::Report;
use crate::analytic::{critical_coupling, ground_state_critical_limit};
use crate::error::{Error, Result};
use crate::et_solver::{
    asymptotic_scaling_check, doubling_defects, global_quantum_number, ground_state_q, solve,
    EtSolution,
};
use crate::kernel::{Character, KineticSpec, PotentialSpec};
use crate::oracle::{basis_diagonalize, numerov_ground_state, reduce_two_body, OracleResult};
use crate::oscillator::{enumerate_levels, ground_state_energy, LEVEL_MERGE_TOLERANCE};

/// Gap slack within which a bound direction still counts as respected.
const BOUND_SLACK: f64 = 1e-8;
const EXACT_SLACK: f64 = 1e-6;
const INITIAL_BASIS_SIZE: usize = 20;

pub fn build(command: CommandKind, cfg: &RunConfig) -> Result<Report> {
    match command {
        CommandKind::Solve => solve_command(cfg),
        CommandKind::Spectrum => spectrum_command(cfg),
        CommandKind::Harmonic => harmonic_command(cfg),
        CommandKind::Regge => regge_command(cfg),
        CommandKind::Critical => critical_command(cfg),
        CommandKind::OracleCompare => oracle_command(cfg),
        CommandKind::Scaling => scaling_command(cfg),
    }
}

/// Records a numerical failure for row `index`; domain errors abort.
fn row_failure(report: &mut Report, index: usize, err: Error) -> Result<()> {
    if !err.is_numerical() {
        return Err(err);
    }
    let (kind, best) = match &err {
        Error::NoBoundState { best_energy, .. } => ("no_bound_state", *best_energy),
        _ => ("convergence", None),
    };
    report.errors.push(json!({
        "index": index,
        "kind": kind,
        "message": err.to_string(),
        "best_energy": best,
    }));
    Ok(())
}

fn solution_diagnostics(index: usize, sol: &EtSolution) -> Value {
    json!({
        "index": index,
        "residual_virial": sol.residual_virial,
        "residual_product": sol.residual_product,
        "roots": sol.all_roots,
    })
}

fn push_rows(report: &mut Report, rows: Vec<Value>) {
    report.diagnostics.insert("rows".into(), Value::Array(rows));
}

fn solve_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::Solve;
    let (kin, pot, n) = (cfg.kinetic_spec(cmd)?, cfg.potential_spec(cmd)?, cfg.particles(cmd)?);
    let qn = cfg.single_level(cmd, n)?;
    let q = global_quantum_number(&qn);
    let mut report = Report::new(vec![
        ("N", "n"),
        ("Q", "q"),
        ("E", "energy"),
        ("p0", "p0"),
        ("r0", "r0"),
        ("L", "length"),
        ("character", "character"),
    ]);
    let mut diag = Vec::new();
    match solve(&kin, &pot, n, q) {
        Ok(sol) => {
            report.results.push(json!({
                "n": n,
                "q": q,
                "energy": sol.energy,
                "p0": sol.p0,
                "r0": sol.r0,
                "length": sol.length,
                "character": sol.character.label(),
                "gamma": sol.gamma,
            }));
            diag.push(solution_diagnostics(0, &sol));
        }
        Err(e) => row_failure(&mut report, 0, e)?,
    }
    push_rows(&mut report, diag);
    Ok(report)
}

fn spectrum_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::Spectrum;
    let (kin, pot, n) = (cfg.kinetic_spec(cmd)?, cfg.potential_spec(cmd)?, cfg.particles(cmd)?);
    let levels = enumerate_levels(n, cfg.dimension()?, cfg.level_count(cmd)?, cfg.angular)?;
    let mut report = Report::new(vec![
        ("index", "index"),
        ("Q", "q"),
        ("multiplicity", "multiplicity"),
        ("E", "energy"),
        ("character", "character"),
    ]);
    let mut diag = Vec::new();
    for (index, level) in levels.iter().enumerate() {
        match solve(&kin, &pot, n, level.q) {
            Ok(sol) => {
                report.results.push(json!({
                    "index": index,
                    "q": level.q,
                    "multiplicity": level.multiplicity,
                    "energy": sol.energy,
                    "character": sol.character.label(),
                }));
                diag.push(solution_diagnostics(index, &sol));
            }
            Err(e) => row_failure(&mut report, index, e)?,
        }
    }
    push_rows(&mut report, diag);
    Ok(report)
}

fn harmonic_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::Harmonic;
    let mass = cfg.positive("mass", cfg.mass, 1.0)?;
    let omega = cfg.positive("omega", cfg.omega, 1.0)?;
    let n = cfg.particles(cmd)?;
    let d = cfg.dimension()?;
    let levels = enumerate_levels(n, d, cfg.level_count(cmd)?, cfg.angular)?;
    let mut report = Report::new(vec![
        ("index", "index"),
        ("Q", "q"),
        ("E", "energy"),
        ("multiplicity", "multiplicity"),
        ("occupations", "occupations"),
    ]);
    for (index, level) in levels.iter().enumerate() {
        report.results.push(json!({
            "index": index,
            "q": level.q,
            "energy": omega * level.q,
            "multiplicity": level.multiplicity,
            "occupations": level.occupations,
        }));
    }
    report.diagnostics.insert(
        "ground_state_energy".into(),
        json!(ground_state_energy(mass, omega, n, d)?),
    );
    report
        .diagnostics
        .insert("merge_tolerance".into(), json!(LEVEL_MERGE_TOLERANCE));
    Ok(report)
}

fn regge_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::Regge;
    let sigma = cfg.positive("sigma", cfg.sigma, 1.0)?;
    let n = cfg.particles(cmd)?;
    let kin = KineticSpec::power_law(1.0, 1.0)?;
    let pot = PotentialSpec::power_law(sigma, 1.0)?;
    let levels = enumerate_levels(n, cfg.dimension()?, cfg.level_count(cmd)?, false)?;
    let mut report = Report::new(vec![
        ("Q", "q"),
        ("E", "energy"),
        ("E_squared", "energy_squared"),
        ("L", "length"),
    ]);
    let mut diag = Vec::new();
    for (index, level) in levels.iter().enumerate() {
        match solve(&kin, &pot, n, level.q) {
            Ok(sol) => {
                report.results.push(json!({
                    "q": level.q,
                    "energy": sol.energy,
                    "energy_squared": sol.energy * sol.energy,
                    "length": sol.length,
                    "r0": sol.r0,
                }));
                let mut row = solution_diagnostics(index, &sol);
                row["regge_ratio"] = json!(sol.energy * sol.energy / (4.0 * n as f64 * sigma * level.q));
                diag.push(row);
            }
            Err(e) => row_failure(&mut report, index, e)?,
        }
    }
    push_rows(&mut report, diag);
    Ok(report)
}

/// Ground-state critical couplings for `N = 2..=n_max` and the large-`N`
/// limit. For a range `a` the couplings scale as `a^-b`.
fn critical_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::Critical;
    let kinetics = cfg.kinetics.ok_or_else(|| Error::domain("field `kinetics` is required by `critical`"))?;
    cfg.kinetic_spec(cmd)?;
    let (shape, range) = match cfg.potential {
        Some(PotentialConfig::FiniteRange { shape, a, .. }) if a > 0.0 && a.is_finite() => (shape, a),
        Some(PotentialConfig::FiniteRange { a, .. }) => {
            return Err(Error::domain(format!("field `potential.a`: range must be > 0, got {a}")))
        }
        _ => {
            return Err(Error::domain(
                "field `potential`: `critical` needs a finite_range potential",
            ))
        }
    };
    let d = cfg.dimension()?;
    let n_max = cfg.sweep_end(cmd, 2)?;
    let (a, b) = (kinetics.a, kinetics.b);
    let unit = range.powf(-b);
    let limit = ground_state_critical_limit(a, b, shape, d)? * unit;
    let mut report = Report::new(vec![
        ("N", "n"),
        ("Q", "q"),
        ("y0", "y0"),
        ("g_c", "g_c"),
        ("ratio_to_limit", "ratio_to_limit"),
    ]);
    for n in 2..=n_max {
        let res = critical_coupling(a, b, shape, n, ground_state_q(n, d)?)?;
        let g_c = res.g_c * unit;
        report.results.push(json!({
            "n": n,
            "q": res.q,
            "y0": res.y0,
            "g_c": g_c,
            "ratio_to_limit": g_c / limit,
        }));
    }
    report.results.push(json!({
        "n": "inf",
        "q": Value::Null,
        "y0": Value::Null,
        "g_c": limit,
        "ratio_to_limit": 1.0,
    }));
    report.diagnostics.insert("shape".into(), json!(shape.name()));
    Ok(report)
}

fn bound_direction_respected(character: Character, gap: f64) -> bool {
    match character {
        Character::UpperBound => gap >= -BOUND_SLACK,
        Character::LowerBound => gap <= BOUND_SLACK,
        Character::Exact => gap.abs() <= EXACT_SLACK,
        Character::Indeterminate => true,
    }
}

fn run_oracle(cfg: &RunConfig, kin: &KineticSpec, pot: &PotentialSpec, l: u32) -> Result<OracleResult> {
    let prob = reduce_two_body(kin, pot).with_l(l);
    let choice = cfg.oracle.unwrap_or(if kin.exponent() == 2.0 {
        OracleChoice::Numerov
    } else {
        OracleChoice::Basis
    });
    match choice {
        OracleChoice::Numerov => numerov_ground_state(&prob),
        OracleChoice::Basis => basis_diagonalize(&prob, INITIAL_BASIS_SIZE, prob.length_scale()),
    }
}

fn oracle_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::OracleCompare;
    let (kin, pot) = (cfg.kinetic_spec(cmd)?, cfg.potential_spec(cmd)?);
    let n = cfg.n.unwrap_or(2);
    if n != 2 {
        return Err(Error::domain(format!("field `n`: `oracle-compare` needs n = 2, got {n}")));
    }
    if cfg.dimension()? != 3 {
        return Err(Error::domain("field `d`: `oracle-compare` needs d = 3"));
    }
    let qn = cfg.single_level(cmd, 2)?;
    if qn.radial()[0] != 0 {
        return Err(Error::domain(
            "field `levels.explicit.n`: the reference solvers give the lowest state of each l only",
        ));
    }
    let l = qn.orbital()[0];
    let q = global_quantum_number(&qn);
    let mut report = Report::new(vec![
        ("Q", "q"),
        ("E_et", "energy_et"),
        ("E_oracle", "energy_oracle"),
        ("gap", "gap"),
        ("character", "character"),
        ("method", "method"),
        ("consistent", "consistent"),
    ]);
    let et = solve(&kin, &pot, 2, q);
    let oracle = run_oracle(cfg, &kin, &pot, l);
    match (et, oracle) {
        (Ok(sol), Ok(res)) => {
            let gap = sol.energy - res.energy;
            report.results.push(json!({
                "q": q,
                "l": l,
                "energy_et": sol.energy,
                "energy_oracle": res.energy,
                "gap": gap,
                "character": sol.character.label(),
                "method": res.method,
                "consistent": bound_direction_respected(sol.character, gap),
            }));
            push_rows(&mut report, vec![solution_diagnostics(0, &sol)]);
            report.diagnostics.insert("oracle_converged".into(), json!(res.converged));
            report.diagnostics.insert("oracle_mesh".into(), json!(res.mesh));
        }
        (et, oracle) => {
            if let Err(e) = et {
                row_failure(&mut report, 0, e)?;
            }
            if let Err(e) = oracle {
                row_failure(&mut report, 0, e)?;
            }
        }
    }
    Ok(report)
}

fn scaling_command(cfg: &RunConfig) -> Result<Report> {
    let cmd = CommandKind::Scaling;
    let (kin, pot) = (cfg.kinetic_spec(cmd)?, cfg.potential_spec(cmd)?);
    let n_max = cfg.sweep_end(cmd, 4)?;
    let mut report = Report::new(vec![("N", "n"), ("E", "energy"), ("E_per_N", "energy_per_particle")]);
    let rows = match asymptotic_scaling_check(&kin, &pot, cfg.dimension()?, n_max) {
        Ok(rows) => rows,
        Err(e) => {
            row_failure(&mut report, 0, e)?;
            return Ok(report);
        }
    };
    for row in &rows {
        report.results.push(json!({
            "n": row.particles,
            "energy": row.energy,
            "energy_per_particle": row.energy_per_particle,
        }));
    }
    let defects: Vec<Value> = doubling_defects(&rows)
        .into_iter()
        .map(|(n, defect)| json!({"n": n, "defect": defect}))
        .collect();
    report.diagnostics.insert("doubling_defects".into(), Value::Array(defects));
    Ok(report)
}
