//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero when any criterion fails.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use cyclet::analytic::{critical_coupling, ground_state_critical_limit, threshold_root};
use cyclet::et_solver::{asymptotic_scaling_check, doubling_defects, ground_state_q, solve};
use cyclet::oracle::{
    basis_diagonalize, critical_coupling_scan, numerov_ground_state, reduce_two_body,
};
use cyclet::oscillator::{
    distinct_q_up_to_quanta, ground_state_energy, ground_state_quadratic_form,
};
use cyclet::{Character, KineticSpec, PotentialSpec, Shape};
use serde_json::Value;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn run_cli(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = cyclet::cli::run(
        std::iter::once("cyclet").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).expect("utf-8 output"))
}

/// Harmonic `E = ω Q` for every distinct level with at most six quanta.
fn harmonic_exactness() -> Outcome {
    let start = Instant::now();
    let kin = KineticSpec::nonrelativistic(1.0).unwrap();
    let pot = PotentialSpec::harmonic(1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    let mut levels = 0usize;
    for n in 2..=50 {
        for q in distinct_q_up_to_quanta(n, 3, 6).unwrap() {
            match solve(&kin, &pot, n, q) {
                Ok(sol) => worst = worst.max(rel(sol.energy, q)),
                Err(e) => return Outcome::new(false, format!("N={n}, Q={q}: {e}")),
            }
            levels += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst < 1e-10 && elapsed < Duration::from_secs(10),
        format!("{levels} levels, worst rel. error {worst:.2e}, {elapsed:.2?} (limit 10 s)"),
    )
}

/// `E0 = ω D cot(π/2N)` against the mode sum `ω Σ 2 sin(iπ/N) D/2`.
fn ground_state_formula() -> Outcome {
    let omega = 1.7;
    let mut worst: f64 = 0.0;
    for n in 2..=200usize {
        for d in [1usize, 2, 3] {
            let e0 = ground_state_energy(0.8, omega, n, d).unwrap();
            let cot = omega * d as f64 / (PI / (2.0 * n as f64)).tan();
            let sum: f64 = (1..n)
                .map(|i| 2.0 * (i as f64 * PI / n as f64).sin() * d as f64 / 2.0)
                .sum::<f64>()
                * omega;
            worst = worst.max(rel(e0, cot)).max(rel(e0, sum));
        }
    }
    Outcome::new(worst < 1e-12, format!("N=2..200, D=1..3, worst rel. error {worst:.2e}"))
}

/// `Z = U diag(2 sin(kπ/N)) U` with `U` built here from its definition.
fn corrected_quadratic_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_row: f64 = 0.0;
    for n in 2..=30usize {
        let nf = n as f64;
        let u = |i: usize, j: usize| {
            let angle = 2.0 * PI * ((i * j) % n) as f64 / nf;
            (angle.cos() + angle.sin()) / nf.sqrt()
        };
        let root = |k: usize| 2.0 * (PI * k as f64 / nf).sin().abs();
        let z = ground_state_quadratic_form(n).unwrap();
        for i in 1..=n {
            let mut row_sum = 0.0;
            for j in 1..=n {
                let expected: f64 = (1..=n).map(|k| u(i, k) * root(k % n) * u(k, j)).sum();
                worst = worst.max((z[(i - 1, j - 1)] - expected).abs());
                row_sum += z[(i - 1, j - 1)];
            }
            worst_row = worst_row.max(row_sum.abs());
        }
    }
    Outcome::new(
        worst < 1e-10 && worst_row < 1e-10,
        format!("N=2..30, worst entry error {worst:.2e}, worst row sum {worst_row:.2e}"),
    )
}

/// `E = N C ((B+F)/B) (AB/(CF))^{F/(B+F)} (Q/N)^{BF/(B+F)}`.
fn closed_form(a: f64, b: f64, c: f64, f: f64, n: usize, q: f64) -> f64 {
    let s = b + f;
    let nf = n as f64;
    nf * c * (s / b) * (a * b / (c * f)).powf(f / s) * (q / nf).powf(b * f / s)
}

fn closed_form_agreement() -> Outcome {
    let a = 0.7;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut skipped = Vec::new();
    for b in [1.0, 2.0, 3.0] {
        for f in [-1.0, 1.0, 2.0, 3.0] {
            if b + f <= 0.0 {
                skipped.push(format!("(B={b}, F={f})"));
                continue;
            }
            let c = 1.3 * f64::signum(f);
            let kin = KineticSpec::power_law(a, b).unwrap();
            let pot = PotentialSpec::power_law(c, f).unwrap();
            for n in [2usize, 3, 5, 10] {
                let ground = 3.0 / (PI / (2.0 * n as f64)).tan();
                let excited = ground + 2.0 * (PI / n as f64).sin();
                for q in [ground, excited] {
                    let e = match solve(&kin, &pot, n, q) {
                        Ok(sol) => sol.energy,
                        Err(e) => return Outcome::new(false, format!("B={b} F={f} N={n}: {e}")),
                    };
                    worst = worst.max(rel(e, closed_form(a, b, c, f, n, q)));
                    cases += 1;
                }
            }
        }
    }
    Outcome::new(
        worst < 1e-8,
        format!(
            "{cases} cases, worst rel. error {worst:.2e}; skipped {} (B+F=0, no envelope minimum)",
            skipped.join(", ")
        ),
    )
}

fn regge_law() -> Outcome {
    let (code, text) = run_cli(&[
        "regge",
        "--set",
        "n=3",
        "--set",
        "sigma=1.0",
        "--set",
        "levels.lowest=10",
    ]);
    if code != 0 {
        return Outcome::new(false, format!("regge exited with {code}"));
    }
    let doc: Value = serde_json::from_str(&text).unwrap();
    let rows = doc["results"].as_array().unwrap();
    let mut worst_regge: f64 = 0.0;
    let mut worst_length: f64 = 0.0;
    for row in rows {
        let q = row["q"].as_f64().unwrap();
        let e = row["energy"].as_f64().unwrap();
        let length = row["length"].as_f64().unwrap();
        let r0 = row["r0"].as_f64().unwrap();
        worst_regge = worst_regge.max((e * e / (4.0 * 3.0 * 1.0 * q) - 1.0).abs());
        worst_length = worst_length.max(rel(length, 3.0 * r0));
    }
    Outcome::new(
        rows.len() == 10 && worst_regge < 1e-10 && worst_length < 1e-10,
        format!(
            "{} levels, |E^2/(4NσQ) - 1| <= {worst_regge:.2e}, |L/(N r0) - 1| <= {worst_length:.2e}",
            rows.len()
        ),
    )
}

fn critical_roots() -> Outcome {
    let gaussian = threshold_root(Shape::Gaussian, 2.0).unwrap();
    let exponential = threshold_root(Shape::Exponential, 2.0).unwrap();
    let mut exact_scaling = true;
    for shape in [Shape::Gaussian, Shape::Exponential] {
        for b in [1.0, 2.0, 3.0] {
            for (n, q) in [(2usize, 3.0), (3, 3.0 * 3f64.sqrt()), (7, 11.3)] {
                let single = critical_coupling(0.5, b, shape, n, q).unwrap().g_c;
                let doubled = critical_coupling(0.5, b, shape, 2 * n, 2.0 * q).unwrap().g_c;
                exact_scaling &= single == doubled;
            }
        }
    }
    Outcome::new(
        (gaussian - 1.0).abs() < 1e-12 && (exponential - 2.0).abs() < 1e-12 && exact_scaling,
        format!(
            "y0(gaussian)={gaussian}, y0(exponential)={exponential}, g_c(2Q,2N)==g_c(Q,N): {exact_scaling}"
        ),
    )
}

fn eighteen_percent() -> Outcome {
    let start = Instant::now();
    let (code, text) = run_cli(&[
        "critical",
        "--format",
        "csv",
        "--set",
        "kinetics={\"a\":0.5,\"b\":2}",
        "--set",
        "potential={\"kind\":\"finite_range\",\"g\":1,\"shape\":\"gaussian\",\"a\":1}",
        "--set",
        "n_max=20",
    ]);
    let elapsed = start.elapsed();
    if code != 0 {
        return Outcome::new(false, format!("critical exited with {code}"));
    }
    let cell = |prefix: &str, column: usize| -> f64 {
        text.lines()
            .find(|l| l.split(',').next() == Some(prefix))
            .and_then(|l| l.split(',').nth(column))
            .and_then(|v| v.parse().ok())
            .unwrap_or(f64::NAN)
    };
    let ratio = cell("3", 3) / cell("inf", 3);
    let lib_ratio = critical_coupling(0.5, 2.0, Shape::Gaussian, 3, ground_state_q(3, 3).unwrap())
        .unwrap()
        .g_c
        / ground_state_critical_limit(0.5, 2.0, Shape::Gaussian, 3).unwrap();
    let target = PI * PI / 12.0;
    let smaller = 100.0 * (1.0 - ratio);
    Outcome::new(
        (ratio - target).abs() < 1e-10
            && (lib_ratio - target).abs() < 1e-14
            && (smaller - 18.0).abs() < 1.0
            && elapsed < Duration::from_secs(1),
        format!("ratio {ratio:.6} (pi^2/12 = {target:.6}), {smaller:.2}% smaller, {elapsed:.2?}"),
    )
}

fn oracle_ordering() -> Outcome {
    let start = Instant::now();
    let t2 = KineticSpec::power_law(0.5, 2.0).unwrap();
    let t1 = KineticSpec::power_law(1.0, 1.0).unwrap();
    let mut notes = Vec::new();
    let mut pass = true;

    let prob = |t: &KineticSpec, w: &PotentialSpec| reduce_two_body(t, w);
    let et = |t: &KineticSpec, w: &PotentialSpec| solve(t, w, 2, 3.0).unwrap();

    let harmonic = PotentialSpec::harmonic(1.0, 1.0).unwrap();
    let sol = et(&t2, &harmonic);
    let num = numerov_ground_state(&prob(&t2, &harmonic)).unwrap();
    let ok = sol.character == Character::Exact && (sol.energy - num.energy).abs() < 1e-6;
    notes.push(format!("harmonic |gap|={:.1e}", (sol.energy - num.energy).abs()));
    pass &= ok;

    let linear = PotentialSpec::power_law(1.0, 1.0).unwrap();
    let num = numerov_ground_state(&prob(&t2, &linear)).unwrap();
    let airy = 2f64.powf(2.0 / 3.0) * 2.338_107_410_459_767;
    pass &= (num.energy - airy).abs() < 1e-6;
    notes.push(format!("airy |dE|={:.1e}", (num.energy - airy).abs()));

    let mut upper = |name: &str, t: &KineticSpec, w: &PotentialSpec, limit: Option<f64>, e_ref: f64| {
        let sol = et(t, w);
        let gap = sol.energy - e_ref;
        let relative = gap / e_ref.abs();
        let mut ok = sol.character == Character::UpperBound && gap > 0.0;
        if let Some(limit) = limit {
            ok &= relative < limit;
        }
        notes.push(format!("{name} gap {:.2}%", 100.0 * relative));
        ok
    };

    pass &= upper("B=2 linear", &t2, &linear, Some(0.10), num.energy);
    let coulomb = PotentialSpec::power_law(-1.0, -1.0).unwrap();
    let e = numerov_ground_state(&prob(&t2, &coulomb)).unwrap().energy;
    pass &= upper("B=2 coulomb", &t2, &coulomb, None, e);
    let gaussian = PotentialSpec::finite_range(5.0, Shape::Gaussian, 1.0).unwrap();
    let e = numerov_ground_state(&prob(&t2, &gaussian)).unwrap().energy;
    pass &= upper("B=2 gaussian g=5", &t2, &gaussian, None, e);
    let p = prob(&t1, &linear);
    let basis = basis_diagonalize(&p, 20, p.length_scale()).unwrap();
    pass &= basis.converged;
    pass &= upper("B=1 linear", &t1, &linear, Some(0.15), basis.energy);

    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    Outcome::new(pass, format!("{}; {elapsed:.2?}", notes.join(", ")))
}

fn critical_ordering() -> Outcome {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();
    for shape in [Shape::Gaussian, Shape::Exponential] {
        let et = critical_coupling(0.5, 2.0, shape, 2, 3.0).unwrap();
        match critical_coupling_scan(0.5, 2.0, shape) {
            Ok(scan) => {
                pass &= scan.converged && scan.g_c <= et.g_c;
                notes.push(format!("{}: oracle {:.6} <= ET {:.6}", shape.name(), scan.g_c, et.g_c));
            }
            Err(e) => {
                pass = false;
                notes.push(format!("{}: {e}", shape.name()));
            }
        }
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(60);
    Outcome::new(pass, format!("{}; {elapsed:.2?}", notes.join(", ")))
}

fn large_n_scaling() -> Outcome {
    let mut pass = true;
    let mut notes = Vec::new();
    let models = [
        (
            "harmonic",
            KineticSpec::nonrelativistic(1.0).unwrap(),
            PotentialSpec::harmonic(1.0, 1.0).unwrap(),
        ),
        (
            "glueball",
            KineticSpec::power_law(1.0, 1.0).unwrap(),
            PotentialSpec::power_law(1.0, 1.0).unwrap(),
        ),
    ];
    for (name, kin, pot) in models {
        let rows = asymptotic_scaling_check(&kin, &pot, 3, 64).unwrap();
        let defects: Vec<f64> = doubling_defects(&rows)
            .into_iter()
            .filter(|(n, _)| [4, 8, 16, 32].contains(n))
            .map(|(_, d)| d)
            .collect();
        let monotone = defects.windows(2).all(|w| w[1] < w[0]);
        let last = *defects.last().unwrap();
        pass &= defects.len() == 4 && monotone && last < 1e-2;
        notes.push(format!("{name} defect(32)={last:.2e} monotone={monotone}"));
    }
    Outcome::new(pass, notes.join(", "))
}

fn cli_determinism() -> Outcome {
    let dir = golden_dir();
    let binary = env!("CARGO_BIN_EXE_cyclet");
    let cases = [
        ("solve", "solve_glueball.config.json", "json", "solve_glueball.json"),
        ("critical", "critical_gaussian.config.json", "csv", "critical_gaussian.csv"),
        ("harmonic", "harmonic_n6.config.json", "csv", "harmonic_n6.csv"),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (command, config, format, golden) in cases {
        let config = dir.join(config);
        let run = || {
            Command::new(binary)
                .args([command, "--config"])
                .arg(&config)
                .args(["--format", format])
                .output()
                .expect("cyclet runs")
        };
        let (first, second) = (run(), run());
        let expected = std::fs::read(dir.join(golden)).unwrap_or_default();
        let identical = first.stdout == second.stdout;
        let matches = first.stdout == expected;
        pass &= first.status.success() && identical && matches;
        notes.push(format!("{command}: repeat-identical={identical} golden={matches}"));
    }
    Outcome::new(pass, notes.join(", "))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        ("harmonic exactness", harmonic_exactness),
        ("ground-state formula", ground_state_formula),
        ("corrected quadratic form", corrected_quadratic_form),
        ("closed-form agreement", closed_form_agreement),
        ("regge law", regge_law),
        ("critical-coupling roots", critical_roots),
        ("18% claim", eighteen_percent),
        ("oracle ordering at N=2", oracle_ordering),
        ("critical-coupling ordering", critical_ordering),
        ("large-N scaling", large_n_scaling),
        ("CLI determinism", cli_determinism),
    ];
    let mut failures = 0;
    for (index, (name, check)) in criteria.iter().enumerate() {
        let outcome = check();
        let status = if outcome.pass { "PASS" } else { "FAIL" };
        if !outcome.pass {
            failures += 1;
        }
        println!("criterion {:>2} {status} {name}: {}", index + 1, outcome.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
