//! Diagonalization in a three-dimensional harmonic oscillator basis.
//!
//! The radial functions of size `b` are, with `x = r²/b²` and `α = l + 1/2`,
//! orthonormal under `dx`:
//! `φ_n(x) = √(n!/Γ(n+α+1)) x^{α/2} e^{-x/2} L_n^α(x)`.
//! Their Fourier transforms have the same form with size `1/b` and a phase
//! `(-1)^n`, so the kinetic operator `2T(|p|)` is evaluated in momentum space
//! by the same quadrature as the potential in coordinate space.

use nalgebra::DMatrix;

use super::quadrature::GaussLegendre;
use super::{EffectiveRadialProblem, OracleMesh, OracleMethod, OracleResult};
use crate::error::{Error, Result};

/// Largest basis the growth loop will try.
pub const MAX_BASIS_SIZE: usize = 120;
const GROWTH_STEP: usize = 10;
const GROWTH_TOLERANCE: f64 = 1e-6;
const MIN_QUADRATURE_ORDER: usize = 200;
const GOLDEN_TOLERANCE: f64 = 1e-6;
/// Growth of the ground value tolerated as round-off before it counts as a
/// variational violation.
const MONOTONE_SLACK: f64 = 1e-9;

fn quadrature_order(size: usize) -> usize {
    MIN_QUADRATURE_ORDER.max(4 * size)
}

/// `ln Γ(l + 3/2)` via `Γ(l + 3/2) = (l + 1/2)(l - 1/2)⋯(1/2) √π`.
fn ln_gamma_half_integer(l: u32) -> f64 {
    let mut acc = 0.5 * std::f64::consts::PI.ln();
    for k in 0..=l {
        acc += (k as f64 + 0.5).ln();
    }
    acc
}

/// Rows `φ_0(x_k) … φ_{size-1}(x_k)` for each quadrature point, by the
/// normalized Laguerre recurrence.
fn radial_table(size: usize, l: u32, xs: &[f64]) -> DMatrix<f64> {
    let alpha = l as f64 + 0.5;
    let ln_norm0 = -0.5 * ln_gamma_half_integer(l);
    let mut table = DMatrix::zeros(size, xs.len());
    for (k, &x) in xs.iter().enumerate() {
        let mut prev = 0.0;
        let mut cur = (0.5 * alpha * x.ln() - 0.5 * x + ln_norm0).exp();
        table[(0, k)] = cur;
        for n in 0..size.saturating_sub(1) {
            let nf = n as f64;
            let next = ((2.0 * nf + alpha + 1.0 - x) * cur - (nf * (nf + alpha)).sqrt() * prev)
                / ((nf + 1.0) * (nf + alpha + 1.0)).sqrt();
            prev = cur;
            cur = next;
            table[(n + 1, k)] = cur;
        }
    }
    table
}

/// `∫ f(b√x) φ_n(x) φ_m(x) dx`, integrated in `r` over `[0, R]` where the
/// highest basis function is negligible.
fn matrix_elements<F: Fn(f64) -> f64>(
    f: F,
    size_param: f64,
    size: usize,
    l: u32,
    rule: &GaussLegendre,
) -> DMatrix<f64> {
    let reach = size_param * ((4.0 * (size as f64 - 1.0) + 2.0 * l as f64 + 3.0).sqrt() + 9.0);
    let b2 = size_param * size_param;
    let mut xs = Vec::with_capacity(rule.order());
    let mut coeffs = Vec::with_capacity(rule.order());
    for (r, w) in rule.mapped(0.0, reach) {
        xs.push(r * r / b2);
        coeffs.push(w * 2.0 * r / b2 * f(r));
    }
    let table = radial_table(size, l, &xs);
    let mut weighted = table.clone();
    for (k, c) in coeffs.iter().enumerate() {
        weighted.column_mut(k).scale_mut(*c);
    }
    weighted * table.transpose()
}

fn hamiltonian(
    prob: &EffectiveRadialProblem,
    size: usize,
    scale: f64,
    rule: &GaussLegendre,
) -> DMatrix<f64> {
    let l = prob.l();
    let mut kinetic = matrix_elements(|p| prob.kinetic_energy(p), 1.0 / scale, size, l, rule);
    for i in 0..size {
        for j in 0..size {
            if (i + j) % 2 == 1 {
                kinetic[(i, j)] = -kinetic[(i, j)];
            }
        }
    }
    let potential = matrix_elements(|r| prob.potential_energy(r), scale, size, l, rule);
    kinetic + potential
}

fn ground_value(prob: &EffectiveRadialProblem, size: usize, scale: f64, rule: &GaussLegendre) -> f64 {
    hamiltonian(prob, size, scale, rule)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn check_inputs(size: usize, scale: f64) -> Result<()> {
    if size < 4 {
        return Err(Error::domain(format!("basis size must be >= 4, got {size}")));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::domain(format!("basis scale must be > 0, got {scale}")));
    }
    Ok(())
}

/// All eigenvalues of the truncated Hamiltonian at a fixed basis scale,
/// ascending.
pub fn basis_spectrum(prob: &EffectiveRadialProblem, size: usize, scale: f64) -> Result<Vec<f64>> {
    check_inputs(size, scale)?;
    let rule = GaussLegendre::new(quadrature_order(size));
    let mut values: Vec<f64> = hamiltonian(prob, size, scale, &rule)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Golden-section minimum of the ground value over `ln b` in
/// `[ln b0 - half_width, ln b0 + half_width]`, recentred while the minimum
/// sits on an edge.
fn optimize_scale(
    prob: &EffectiveRadialProblem,
    size: usize,
    start: f64,
    half_width: f64,
    rule: &GaussLegendre,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |t: f64| ground_value(prob, size, t.exp(), rule);
    let mut centre = start.ln();
    let mut best = (f(centre), centre);
    for _ in 0..8 {
        let (mut a, mut b) = (centre - half_width, centre + half_width);
        let mut c = b - inv_phi * (b - a);
        let mut d = a + inv_phi * (b - a);
        let (mut fc, mut fd) = (f(c), f(d));
        while b - a > GOLDEN_TOLERANCE {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        let t = 0.5 * (a + b);
        let ft = f(t);
        if ft < best.0 {
            best = (ft, t);
        }
        let edge = (t - (centre - half_width)).min(centre + half_width - t);
        if edge > 0.05 * half_width {
            break;
        }
        centre = t;
    }
    (best.0, best.1.exp())
}

/// Ground-state energy by basis diagonalization.
///
/// The basis scale is optimized by golden-section search, then the basis is
/// grown in steps of ten until the ground value changes by less than
/// `1e-6 max(1, |E|)`. A final evaluation with twice the quadrature order
/// must agree to `1e-9` relative for the result to count as converged.
pub fn basis_diagonalize(
    prob: &EffectiveRadialProblem,
    basis_size: usize,
    scale: f64,
) -> Result<OracleResult> {
    check_inputs(basis_size, scale)?;
    let mut size = basis_size;
    let mut rule = GaussLegendre::new(quadrature_order(size));
    let (mut energy, mut best_scale) = optimize_scale(prob, size, scale, 4f64.ln(), &rule);
    let mut converged = false;
    while size + GROWTH_STEP <= MAX_BASIS_SIZE.max(basis_size + GROWTH_STEP) {
        let next_size = size + GROWTH_STEP;
        let next_rule = GaussLegendre::new(quadrature_order(next_size));
        let (next_energy, next_scale) =
            optimize_scale(prob, next_size, best_scale, 1.5f64.ln(), &next_rule);
        let slack = MONOTONE_SLACK * energy.abs().max(1.0);
        if next_energy > energy + slack {
            return Err(Error::convergence(format!(
                "ground value rose from {energy} to {next_energy} when growing the basis to {next_size}"
            )));
        }
        let change = (energy - next_energy).abs();
        size = next_size;
        rule = next_rule;
        energy = next_energy;
        best_scale = next_scale;
        if change < GROWTH_TOLERANCE * energy.abs().max(1.0) {
            converged = true;
            break;
        }
    }

    let check_rule = GaussLegendre::new(2 * rule.order());
    let checked = ground_value(prob, size, best_scale, &check_rule);
    let quadrature_ok = (checked - energy).abs() <= 1e-9 * energy.abs().max(1.0);

    Ok(OracleResult {
        energy,
        method: OracleMethod::BasisDiagonalization,
        converged: converged && quadrature_ok,
        mesh: OracleMesh::Basis {
            size,
            scale: best_scale,
            quadrature_order: rule.order(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{KineticSpec, PotentialSpec, Shape};
    use crate::oracle::reduce_two_body;

    #[test]
    fn basis_is_orthonormal_under_quadrature() {
        let rule = GaussLegendre::new(400);
        for l in [0, 1, 3] {
            let overlap = matrix_elements(|_| 1.0, 0.8, 40, l, &rule);
            for i in 0..40 {
                for j in 0..40 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    assert!((overlap[(i, j)] - e).abs() < 1e-12, "l={l} ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn oscillator_is_diagonal_at_matched_scale() {
        let t = KineticSpec::nonrelativistic(1.0).unwrap();
        let w = PotentialSpec::harmonic(1.0, 1.0).unwrap();
        let prob = reduce_two_body(&t, &w);
        let spectrum = basis_spectrum(&prob, 4, 1.0).unwrap();
        for (k, e) in spectrum.iter().enumerate() {
            assert!((e - (3.0 + 4.0 * k as f64)).abs() < 1e-12, "{spectrum:?}");
        }
        let res = basis_diagonalize(&prob, 4, 1.3).unwrap();
        assert!((res.energy - 3.0).abs() < 1e-10);
        assert!(res.converged);
    }

    #[test]
    fn linear_potential_converges() {
        let t = KineticSpec::power_law(0.5, 2.0).unwrap();
        let w = PotentialSpec::power_law(1.0, 1.0).unwrap();
        let res = basis_diagonalize(&reduce_two_body(&t, &w), 10, 1.0).unwrap();
        let airy = 2f64.powf(2.0 / 3.0) * 2.338_107_410_459_767;
        assert!(res.converged);
        assert!((res.energy - airy).abs() < 1e-5, "{res:?}");
    }

    #[test]
    fn ground_value_decreases_with_basis_size() {
        let t = KineticSpec::power_law(1.0, 1.0).unwrap();
        let w = PotentialSpec::power_law(1.0, 1.0).unwrap();
        let prob = reduce_two_body(&t, &w);
        let mut last = f64::INFINITY;
        for size in (4..=64).step_by(6) {
            let e = basis_spectrum(&prob, size, 0.9).unwrap()[0];
            assert!(e <= last + 1e-12, "size {size}: {e} > {last}");
            last = e;
        }
    }

    #[test]
    fn gaussian_well_bound_state() {
        let t = KineticSpec::power_law(0.5, 2.0).unwrap();
        let w = PotentialSpec::finite_range(6.0, Shape::Gaussian, 1.0).unwrap();
        let res = basis_diagonalize(&reduce_two_body(&t, &w), 10, 1.0).unwrap();
        assert!(res.converged);
        assert!(res.energy < 0.0);
    }

    #[test]
    fn rejects_small_bases() {
        let t = KineticSpec::power_law(0.5, 2.0).unwrap();
        let w = PotentialSpec::power_law(1.0, 1.0).unwrap();
        let prob = reduce_two_body(&t, &w);
        assert!(basis_diagonalize(&prob, 3, 1.0).is_err());
        assert!(basis_diagonalize(&prob, 8, 0.0).is_err());
    }
}
