//! Numerov integration of the reduced radial equation
//! `u'' = [l(l+1)/r² + (V(r) - E)/κ] u`, `u(0) = 0`, for `κ p²` kinetics.

use serde::{Deserialize, Serialize};

use super::{EffectiveRadialProblem, OracleMesh, OracleMethod, OracleResult};
use crate::error::{Error, Result};
use crate::kernel::{KineticSpec, PotentialSpec, Shape};

/// Box size beyond the outer turning point, in units of the local length.
const BOX_MARGIN: f64 = 10.0;
const INITIAL_STEPS: usize = 2000;
const MAX_STEPS: usize = 1 << 22;
/// Relative change under step halving accepted as converged.
const STEP_TOLERANCE: f64 = 1e-8;
const ENERGY_TOLERANCE: f64 = 1e-13;
const RESCALE: f64 = 1e150;

fn check_quadratic(prob: &EffectiveRadialProblem) -> Result<()> {
    if prob.kinetic_exponent() != 2.0 {
        return Err(Error::domain(format!(
            "Numerov oracle needs quadratic kinetics, got exponent {}",
            prob.kinetic_exponent()
        )));
    }
    if prob.potential().origin_residue().is_infinite() {
        return Err(Error::domain("potential is more singular than 1/r at the origin"));
    }
    Ok(())
}

struct Shooter<'a> {
    prob: &'a EffectiveRadialProblem,
    kappa: f64,
    centrifugal: f64,
}

struct Shot {
    nodes: usize,
    last: f64,
    before_last: f64,
    after_last: f64,
}

impl<'a> Shooter<'a> {
    fn new(prob: &'a EffectiveRadialProblem) -> Self {
        let l = prob.l() as f64;
        Shooter {
            prob,
            kappa: prob.kinetic_coefficient(),
            centrifugal: l * (l + 1.0),
        }
    }

    fn k(&self, r: f64, energy: f64) -> f64 {
        self.centrifugal / (r * r) + (self.prob.potential_energy(r) - energy) / self.kappa
    }

    /// `lim_{r→0} k(r) u(r)` for `u ≈ u1 (r/h)^{l+1}`.
    fn origin_source(&self, h: f64, u1: f64) -> f64 {
        match self.prob.l() {
            0 => 2.0 * self.prob.potential().origin_residue() / self.kappa * u1 / h,
            1 => 2.0 * u1 / (h * h),
            _ => 0.0,
        }
    }

    /// Integrates outward over `steps` intervals of width `h`, plus one
    /// extra point used for the derivative at the end of the grid.
    fn shoot(&self, energy: f64, h: f64, steps: usize) -> Shot {
        let c = h * h / 12.0;
        let mut u_prev = 0.0;
        // g_0 u_0 with u_0 = 0 reduces to the limit of k u at the origin
        let mut gu_prev = -c * self.origin_source(h, 1.0);
        let mut u = 1.0;
        let mut g = 1.0 - c * self.k(h, energy);
        let mut nodes = 0;
        for i in 1..=steps {
            let g_next = 1.0 - c * self.k((i + 1) as f64 * h, energy);
            let u_next = ((12.0 - 10.0 * g) * u - gu_prev) / g_next;
            if i == steps {
                return Shot {
                    nodes,
                    before_last: u_prev,
                    last: u,
                    after_last: u_next,
                };
            }
            if u_next != 0.0 && u != 0.0 && (u_next > 0.0) != (u > 0.0) {
                nodes += 1;
            }
            gu_prev = g * u;
            u_prev = u;
            u = u_next;
            g = g_next;
            if u.abs() > RESCALE {
                u /= RESCALE;
                u_prev /= RESCALE;
                gu_prev /= RESCALE;
            }
        }
        unreachable!("loop returns on its last iteration")
    }

    /// Lowest box eigenvalue for `u(0) = u(r_max) = 0` on the given grid.
    fn box_ground(&self, r_max: f64, steps: usize) -> Result<f64> {
        let h = r_max / steps as f64;
        let mut lo = (1..=steps)
            .map(|i| self.prob.potential_energy(i as f64 * h))
            .fold(f64::INFINITY, f64::min);
        let mut width = lo.abs().max(1.0);
        let mut hi = lo + width;
        let mut expansions = 0;
        while self.shoot(hi, h, steps).nodes == 0 {
            lo = hi;
            width *= 2.0;
            hi = lo + width;
            expansions += 1;
            if expansions > 200 {
                return Err(Error::convergence("no node found while bracketing the ground state"));
            }
        }
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= ENERGY_TOLERANCE * mid.abs().max(1.0) {
                return Ok(mid);
            }
            if self.shoot(mid, h, steps).nodes == 0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Err(Error::convergence("energy bisection did not converge"))
    }
}

/// Outer classical turning point `V(r) = E`; `None` when `E` lies above the
/// asymptotic value of a vanishing potential.
fn outer_turning_point(prob: &EffectiveRadialProblem, energy: f64) -> Option<f64> {
    let v = |r: f64| prob.potential_energy(r);
    let mut r = prob.length_scale();
    if v(r) >= energy {
        let mut lo = r;
        for _ in 0..200 {
            lo *= 0.5;
            if v(lo) < energy {
                return Some(bisect_increasing(v, energy, lo, 2.0 * lo));
            }
        }
        return Some(lo);
    }
    for _ in 0..200 {
        let next = 2.0 * r;
        if v(next) >= energy {
            return Some(bisect_increasing(v, energy, r, next));
        }
        r = next;
    }
    None
}

fn bisect_increasing<V: Fn(f64) -> f64>(v: V, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if v(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Box size for a trial energy: turning point plus `BOX_MARGIN` local lengths.
fn box_size(prob: &EffectiveRadialProblem, energy: f64) -> f64 {
    let kappa = prob.kinetic_coefficient();
    let scale = prob.length_scale();
    let turning = outer_turning_point(prob, energy).unwrap_or(scale);
    let local = if prob.potential().vanishes_at_infinity() && energy < 0.0 {
        (kappa / -energy).sqrt()
    } else {
        let slope = prob.potential_derivative(turning).abs().max(f64::MIN_POSITIVE);
        (kappa / slope).cbrt()
    };
    turning + BOX_MARGIN * local.max(scale)
}

/// Ground-state energy of the reduced problem by Numerov shooting with node
/// counting. The step is halved until the energy changes by less than
/// `1e-8 max(1, |E|)`.
pub fn numerov_ground_state(prob: &EffectiveRadialProblem) -> Result<OracleResult> {
    check_quadratic(prob)?;
    if prob.potential().is_finite_range() && bound_state_count(prob)? == 0 {
        return Err(Error::NoBoundState {
            reason: "zero-energy solution has no node: no negative-energy state".into(),
            best_energy: None,
        });
    }
    let shooter = Shooter::new(prob);

    let mut r_max = box_size(prob, prob.potential_energy(prob.length_scale()));
    for _ in 0..40 {
        let e = shooter.box_ground(r_max, 4 * INITIAL_STEPS)?;
        let next = if e >= 0.0 && prob.potential().vanishes_at_infinity() {
            2.0 * r_max
        } else {
            box_size(prob, e)
        };
        if next <= r_max * 1.001 {
            break;
        }
        r_max = next * 1.05;
    }

    let mut steps = INITIAL_STEPS;
    let mut coarse = shooter.box_ground(r_max, steps)?;
    loop {
        let fine = shooter.box_ground(r_max, 2 * steps)?;
        steps *= 2;
        let converged = (fine - coarse).abs() < STEP_TOLERANCE * fine.abs().max(1.0);
        if converged || steps >= MAX_STEPS {
            return Ok(OracleResult {
                energy: fine,
                method: OracleMethod::Numerov,
                converged,
                mesh: OracleMesh::Numerov {
                    step: r_max / steps as f64,
                    r_max,
                    steps,
                },
            });
        }
        coarse = fine;
    }
}

/// Radius beyond which `|V|` is negligible against its value at the
/// natural length.
fn far_radius(prob: &EffectiveRadialProblem) -> f64 {
    let scale = prob.length_scale();
    let reference = prob.potential_energy(scale).abs();
    let mut r = scale;
    while prob.potential_energy(r).abs() > 1e-17 * reference && r < 1e6 * scale {
        r *= 1.25;
    }
    r
}

fn zero_energy_count(prob: &EffectiveRadialProblem, r_far: f64, steps: usize) -> usize {
    let shooter = Shooter::new(prob);
    let h = r_far / steps as f64;
    let shot = shooter.shoot(0.0, h, steps);
    // outside the potential u = α r^{l+1} + β r^{-l}; a further node sits at
    // (r / r_far)^{2l+1} = -β'/α'
    let l = prob.l() as f64;
    let u = shot.last;
    let du = (shot.after_last - shot.before_last) / (2.0 * h);
    let alpha = (l * u + r_far * du) / (2.0 * l + 1.0);
    let beta = ((l + 1.0) * u - r_far * du) / (2.0 * l + 1.0);
    let ahead = alpha != 0.0 && -beta / alpha > 1.0;
    shot.nodes + usize::from(ahead)
}

/// Number of bound states with the problem's `l` for a finite-range
/// potential, from the nodes of the zero-energy solution.
pub fn bound_state_count(prob: &EffectiveRadialProblem) -> Result<usize> {
    check_quadratic(prob)?;
    if !prob.potential().is_finite_range() {
        return Err(Error::domain("bound-state counting needs a finite-range potential"));
    }
    let r_far = far_radius(prob);
    let steps = ((r_far / prob.length_scale()) * 400.0).ceil() as usize;
    Ok(zero_energy_count(prob, r_far, steps.max(INITIAL_STEPS)))
}

/// Oracle critical coupling of the reduced two-particle problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalScan {
    pub g_c: f64,
    pub steps: usize,
    pub converged: bool,
}

/// Smallest `g` for which `2 a p² - 2 g w(r)` binds an s-wave state, by
/// bisection on `g` to relative `1e-9`, refined by halving the step until
/// `g_c` changes by less than `1e-8` relative.
pub fn critical_coupling_scan(a: f64, b: f64, shape: Shape) -> Result<CriticalScan> {
    let kin = KineticSpec::power_law(a, b)?;
    if b != 2.0 {
        return Err(Error::domain(format!(
            "critical coupling scan needs quadratic kinetics, got exponent {b}"
        )));
    }
    let problem_at = |g: f64| -> Result<EffectiveRadialProblem> {
        Ok(super::reduce_two_body(&kin, &PotentialSpec::finite_range(g, shape, 1.0)?))
    };
    let r_far = far_radius(&problem_at(1.0)?);
    let binds = |g: f64, steps: usize| -> Result<bool> {
        Ok(zero_energy_count(&problem_at(g)?, r_far, steps) > 0)
    };

    let scan = |steps: usize| -> Result<f64> {
        let mut lo = 0.0;
        let mut hi = a;
        let mut doublings = 0;
        while !binds(hi, steps)? {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 100 {
                return Err(Error::convergence("no binding found while bracketing g"));
            }
        }
        while hi - lo > 1e-9 * hi {
            let mid = 0.5 * (lo + hi);
            if binds(mid, steps)? {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    };

    let mut steps = ((r_far * 100.0).ceil() as usize).max(INITIAL_STEPS);
    let mut coarse = scan(steps)?;
    loop {
        let fine = scan(2 * steps)?;
        steps *= 2;
        let converged = (fine - coarse).abs() < 1e-8 * fine;
        if converged || steps >= MAX_STEPS {
            return Ok(CriticalScan {
                g_c: fine,
                steps,
                converged,
            });
        }
        coarse = fine;
    }
}
