//! Envelope-theory solver for cyclic systems.
//!
//! For a global quantum number `Q` the envelope energy is
//! `E = N (T(p0) + W(r0))` subject to `r0 p0 = Q/N` and the virial balance
//! `p0 T'(p0) = r0 W'(r0)`. Eliminating `p0` leaves one equation in `r0`,
//! whose roots are the stationary points of `N (T(Q/(N r)) + W(r))`.

use std::f64::consts::PI;
use std::cell::RefCell;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{
    variational_character, Character, KineticSpec, PotentialForm, PotentialSpec, Power,
};
use crate::oscillator::{mode_sine, QuantumNumbers};

/// Number of log-uniform scan points over the dimensionless `r0` window.
pub const SCAN_POINTS: usize = 256;
/// Scan window in units of the natural length: `[1e-8, 1e8]`.
pub const SCAN_DECADES: (f64, f64) = (-8.0, 8.0);
/// Relative bracket width at which bisection stops.
pub const ROOT_TOLERANCE: f64 = 1e-13;
pub const MAX_BISECTIONS: usize = 200;

/// A stationary point of the envelope energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub r0: f64,
    pub energy: f64,
}

/// Solved envelope level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EtSolution {
    pub energy: f64,
    /// Mean momentum per particle.
    pub p0: f64,
    /// Mean distance between neighbours.
    pub r0: f64,
    /// Mean total length `N r0`.
    pub length: f64,
    pub q: f64,
    pub gamma: Vec<f64>,
    pub character: Character,
    /// `|p0 T'(p0) - r0 W'(r0)|`
    pub residual_virial: f64,
    /// `|r0 p0 - Q/N|`
    pub residual_product: f64,
    pub all_roots: Vec<Root>,
}

impl EtSolution {
    pub fn particles(&self) -> usize {
        self.gamma.len() + 1
    }
}

/// `Q = 2 Σ sin(iπ/N) (2 n_i + l_i + D/2)`.
pub fn global_quantum_number(q: &QuantumNumbers) -> f64 {
    q.weighted_sum()
}

/// `Q = D cot(π / 2N)`, the ground-state value.
pub fn ground_state_q(n: usize, dimension: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::domain(format!("particle count must be >= 2, got {n}")));
    }
    if dimension < 1 {
        return Err(Error::domain("space dimension must be >= 1"));
    }
    Ok(dimension as f64 / (PI / (2.0 * n as f64)).tan())
}

/// `γ_i = √((2Q/N) sin(iπ/N)) / r0` for `i = 1..N-1`.
pub fn size_parameters(sol: &EtSolution, n: usize) -> Vec<f64> {
    mode_sizes(sol.q, sol.r0, n)
}

fn mode_sizes(q: f64, r0: f64, n: usize) -> Vec<f64> {
    thread_local! {
        static ROOT_SINES: RefCell<(usize, Vec<f64>)> = const { RefCell::new((0, Vec::new())) };
    }
    let factor = (2.0 * q / n as f64).sqrt() / r0;
    ROOT_SINES.with(|cache| {
        let mut cache = cache.borrow_mut();
        if cache.0 != n {
            *cache = (n, (1..n).map(|i| mode_sine(i, n).sqrt()).collect());
        }
        cache.1.iter().map(|s| factor * s).collect()
    })
}

/// Log-uniform scan points in units of the natural length, with their
/// reciprocals.
fn scan_multipliers() -> &'static ([f64; SCAN_POINTS], [f64; SCAN_POINTS]) {
    static GRID: OnceLock<([f64; SCAN_POINTS], [f64; SCAN_POINTS])> = OnceLock::new();
    GRID.get_or_init(|| {
        let (lo, hi) = SCAN_DECADES;
        let exponent = |k: usize| lo + (hi - lo) * k as f64 / (SCAN_POINTS - 1) as f64;
        (
            std::array::from_fn(|k| 10f64.powf(exponent(k))),
            std::array::from_fn(|k| 10f64.powf(-exponent(k))),
        )
    })
}

/// Length unit used to place the scan window.
fn natural_length(kin: &KineticSpec, pot: &PotentialSpec) -> f64 {
    match pot.form() {
        PotentialForm::PowerLaw { c, f } => {
            let s = kin.exponent() + f;
            if s != 0.0 {
                (kin.coefficient() / c.abs()).powf(1.0 / s)
            } else {
                1.0
            }
        }
        PotentialForm::FiniteRange { range, .. } => range,
    }
}

struct Problem<'a> {
    kin: &'a KineticSpec,
    pot: &'a PotentialSpec,
    n: f64,
    ratio: f64,
}

impl Problem<'_> {
    fn p0(&self, r: f64) -> f64 {
        self.ratio / r
    }

    fn energy(&self, r: f64) -> f64 {
        self.n * (self.kin.value(self.p0(r)) + self.pot.value(r))
    }

    /// Roots of `p0 T'(p0) - r W'(r)` in `r0`. For the common integral
    /// exponents the balance is multiplied by `r^b`, which keeps its sign and
    /// removes the division by `r`.
    fn virial_roots(&self, unit: f64) -> Result<Vec<f64>> {
        let ratio = self.ratio;
        let (kc, kp) = self.kin.virial_term();
        let Some((wc, wp)) = self.pot.virial_term() else {
            let (kin, pot) = (self.kin, self.pot);
            return locate_roots(
                |r, inv| kin.momentum_virial(ratio * inv) - pot.radial_virial(r),
                unit,
            );
        };
        match (kp, wp) {
            (Power::Square, Power::Square) => {
                let lhs = kc * ratio * ratio;
                locate_roots(
                    |r, _| {
                        let r2 = r * r;
                        lhs - wc * r2 * r2
                    },
                    unit,
                )
            }
            (Power::Square, Power::Int(1)) => {
                let lhs = kc * ratio * ratio;
                locate_roots(|r, _| lhs - wc * r * r * r, unit)
            }
            (Power::Int(1), Power::Int(1)) => {
                let lhs = kc * ratio;
                locate_roots(|r, _| lhs - wc * r * r, unit)
            }
            _ => locate_roots(|r, inv| kc * kp.apply(ratio * inv) - wc * wp.apply(r), unit),
        }
    }
}

/// Scans the virial balance `f(r, 1/r)` on the log grid and bisects every
/// sign change. `f` is positive where the envelope energy decreases.
#[inline(always)]
fn locate_roots<F: Fn(f64, f64) -> f64>(f: F, unit: f64) -> Result<Vec<f64>> {
    let (grid, inverse) = scan_multipliers();
    let inv_unit = 1.0 / unit;
    let mut values = [0.0; SCAN_POINTS];
    for ((v, m), inv) in values.iter_mut().zip(grid).zip(inverse) {
        *v = f(unit * m, inv_unit * inv);
    }

    let mut roots = Vec::new();
    if values[0] == 0.0 {
        roots.push(unit * grid[0]);
    }
    let mut k = 1;
    while k < SCAN_POINTS {
        if k + SCREEN_WIDTH <= SCAN_POINTS && quiet(&values[k - 1..k + SCREEN_WIDTH]) {
            k += SCREEN_WIDTH;
            continue;
        }
        let (before, here) = (values[k - 1], values[k]);
        let zero = here == 0.0;
        let crossing = ((before > 0.0) ^ (here > 0.0)) & (before != 0.0) & !zero;
        if zero {
            roots.push(unit * grid[k]);
        } else if crossing {
            roots.push(bisect(&f, unit * grid[k - 1], unit * grid[k], before)?);
        }
        k += 1;
    }
    Ok(roots)
}

const SCREEN_WIDTH: usize = 8;

/// True when no value after the first is zero or differs in sign from it.
#[inline(always)]
fn quiet(window: &[f64]) -> bool {
    let first = window[0] > 0.0;
    window[1..]
        .iter()
        .fold(true, |acc, &v| acc & ((v > 0.0) == first) & (v != 0.0))
}

#[inline(always)]
fn bisect<F: Fn(f64, f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, f_lo: f64) -> Result<f64> {
    let lo_positive = f_lo > 0.0;
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= ROOT_TOLERANCE * lo {
            return Ok(mid);
        }
        let f_mid = f(mid, 1.0 / mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        let same_side = (f_mid > 0.0) == lo_positive;
        lo = if same_side { mid } else { lo };
        hi = if same_side { hi } else { mid };
    }
    Err(Error::convergence(format!(
        "bisection on r0 in [{lo:e}, {hi:e}] did not reach rel. {ROOT_TOLERANCE:e} in {MAX_BISECTIONS} steps"
    )))
}

/// Solves the envelope system for `N` particles at global quantum number `q`.
///
/// All stationary points found on the scan are reported in `all_roots`; the
/// one with the lowest energy is returned as the physical level.
pub fn solve(kin: &KineticSpec, pot: &PotentialSpec, n: usize, q: f64) -> Result<EtSolution> {
    if n < 2 {
        return Err(Error::domain(format!("particle count must be >= 2, got {n}")));
    }
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::domain(format!("global quantum number must be > 0, got {q}")));
    }
    if let PotentialForm::PowerLaw { f, .. } = pot.form() {
        if kin.exponent() + f <= 0.0 {
            return Err(Error::domain(format!(
                "power-law system with b + f = {} <= 0 has no envelope minimum",
                kin.exponent() + f
            )));
        }
    }

    let problem = Problem {
        kin,
        pot,
        n: n as f64,
        ratio: q / n as f64,
    };
    let unit = natural_length(kin, pot);
    let all_roots: Vec<Root> = problem
        .virial_roots(unit)?
        .into_iter()
        .map(|r0| Root {
            r0,
            energy: problem.energy(r0),
        })
        .collect();

    let physical = all_roots
        .iter()
        .copied()
        .min_by(|a, b| a.energy.total_cmp(&b.energy));
    let Some(physical) = physical else {
        let best_scan = scan_multipliers()
            .0
            .iter()
            .map(|m| problem.energy(unit * m))
            .filter(|e| e.is_finite())
            .fold(f64::INFINITY, f64::min);
        return Err(Error::NoBoundState {
            reason: format!("virial balance has no sign change over r0 in [1e-8, 1e8] x {unit:e}"),
            best_energy: best_scan.is_finite().then_some(best_scan),
        });
    };
    if pot.vanishes_at_infinity() && physical.energy >= 0.0 {
        return Err(Error::NoBoundState {
            reason: format!(
                "lowest stationary energy {:e} is not below the continuum threshold",
                physical.energy
            ),
            best_energy: Some(physical.energy),
        });
    }

    let r0 = physical.r0;
    let p0 = problem.p0(r0);
    Ok(EtSolution {
        energy: physical.energy,
        p0,
        r0,
        length: n as f64 * r0,
        q,
        gamma: mode_sizes(q, r0, n),
        character: variational_character(kin, pot),
        residual_virial: (kin.momentum_virial(p0) - pot.radial_virial(r0)).abs(),
        residual_product: (r0 * p0 - problem.ratio).abs(),
        all_roots,
    })
}

/// Solves the level labelled by `qn`.
pub fn solve_level(kin: &KineticSpec, pot: &PotentialSpec, qn: &QuantumNumbers) -> Result<EtSolution> {
    solve(kin, pot, qn.particles(), global_quantum_number(qn))
}

/// One row of [`asymptotic_scaling_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub particles: usize,
    pub energy: f64,
    pub energy_per_particle: f64,
}

/// Ground-state `E/N` for `N = 2..=n_max`.
pub fn asymptotic_scaling_check(
    kin: &KineticSpec,
    pot: &PotentialSpec,
    dimension: usize,
    n_max: usize,
) -> Result<Vec<ScalingRow>> {
    if n_max < 4 {
        return Err(Error::domain(format!("n_max must be >= 4, got {n_max}")));
    }
    (2..=n_max)
        .map(|n| {
            let sol = solve(kin, pot, n, ground_state_q(n, dimension)?)?;
            Ok(ScalingRow {
                particles: n,
                energy: sol.energy,
                energy_per_particle: sol.energy / n as f64,
            })
        })
        .collect()
}

/// `|E(2N) / (2 E(N)) - 1|` for every `N` with `2N` in the table.
pub fn doubling_defects(rows: &[ScalingRow]) -> Vec<(usize, f64)> {
    rows.iter()
        .filter_map(|row| {
            let twice = rows.iter().find(|r| r.particles == 2 * row.particles)?;
            Some((row.particles, (twice.energy / (2.0 * row.energy) - 1.0).abs()))
        })
        .collect()
}
