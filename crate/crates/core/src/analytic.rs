//! Closed-form envelope results.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::et_solver::ground_state_q;
use crate::kernel::Shape;
use crate::oscillator::enumerate_levels;

/// Envelope energy for `T(p) = a p^b`, `W(r) = c r^f`:
///
/// `E = N c ((b+f)/b) (a b / (c f))^{f/(b+f)} (Q/N)^{b f/(b+f)}`.
pub fn power_law_energy(a: f64, b: f64, c: f64, f: f64, n: usize, q: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain(format!("need a, b > 0, got a={a}, b={b}")));
    }
    if !(c * f > 0.0) {
        return Err(Error::domain(format!("need c*f > 0, got c={c}, f={f}")));
    }
    if b + f <= 0.0 {
        return Err(Error::domain(format!("need b + f > 0, got {}", b + f)));
    }
    if !(q > 0.0) || n < 2 {
        return Err(Error::domain(format!("need Q > 0 and N >= 2, got Q={q}, N={n}")));
    }
    let nf = n as f64;
    let s = b + f;
    Ok(nf * c * (s / b) * (a * b / (c * f)).powf(f / s) * (q / nf).powf(b * f / s))
}

/// One row of the glueball Regge table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReggeRow {
    pub q: f64,
    pub energy: f64,
    pub energy_squared: f64,
    /// Mean total length, `E / (2σ)`.
    pub length: f64,
}

/// Massless particles on a closed linear string, `H = Σ|p_i| + σ Σ|r_i - r_{i+1}|`:
/// `E = 2 √(N σ Q) = 2 σ L` for the `count` lowest three-dimensional levels.
pub fn glueball_regge_table(sigma: f64, n: usize, count: usize) -> Result<Vec<ReggeRow>> {
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("string tension must be > 0, got {sigma}")));
    }
    let levels = enumerate_levels(n, 3, count, false)?;
    Ok(levels
        .iter()
        .map(|level| {
            let energy_squared = 4.0 * n as f64 * sigma * level.q;
            let energy = energy_squared.sqrt();
            ReggeRow {
                q: level.q,
                energy,
                energy_squared,
                length: energy / (2.0 * sigma),
            }
        })
        .collect())
}

/// Critical coupling of `W(r) = -g w(r)` at which a level of global quantum
/// number `Q` becomes bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalCouplingResult {
    /// Root of `y w'(y) + b w(y) = 0`.
    pub y0: f64,
    pub g_c: f64,
    pub shape: Shape,
    pub b: f64,
    pub particles: usize,
    pub q: f64,
}

/// Root of `y w'(y) + b w(y) = 0`; it depends only on the shape and `b`.
///
/// Gaussian: `(b - 2y²) e^{-y²} = 0`, so `y0 = √(b/2)`.
/// Exponential: `(b - y) e^{-y} = 0`, so `y0 = b`.
pub fn threshold_root(shape: Shape, b: f64) -> Result<f64> {
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::domain(format!("kinetic exponent must be > 0, got {b}")));
    }
    Ok(match shape {
        Shape::Gaussian => (0.5 * b).sqrt(),
        Shape::Exponential => b,
    })
}

/// `A / (y0^b w(y0))`, the coupling prefactor independent of `N` and `Q`.
fn threshold_prefactor(a: f64, b: f64, shape: Shape) -> Result<(f64, f64)> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!("kinetic coefficient must be > 0, got {a}")));
    }
    let y0 = threshold_root(shape, b)?;
    Ok((y0, a / (y0.powf(b) * shape.profile(y0))))
}

/// `g_c = A (Q/N)^b / (y0^b w(y0))`.
pub fn critical_coupling(a: f64, b: f64, shape: Shape, n: usize, q: f64) -> Result<CriticalCouplingResult> {
    if n < 2 || !(q > 0.0) {
        return Err(Error::domain(format!("need N >= 2 and Q > 0, got N={n}, Q={q}")));
    }
    let (y0, prefactor) = threshold_prefactor(a, b, shape)?;
    Ok(CriticalCouplingResult {
        y0,
        g_c: prefactor * (q / n as f64).powf(b),
        shape,
        b,
        particles: n,
        q,
    })
}

/// Ground-state critical coupling for each `N`, with `Q = D cot(π/2N)`.
pub fn ground_state_critical_curve(
    a: f64,
    b: f64,
    shape: Shape,
    dimension: usize,
    particles: &[usize],
) -> Result<Vec<CriticalCouplingResult>> {
    particles
        .iter()
        .map(|&n| critical_coupling(a, b, shape, n, ground_state_q(n, dimension)?))
        .collect()
}

/// `N → ∞` limit of the ground-state curve, using `(D/N) cot(π/2N) → 2D/π`.
pub fn ground_state_critical_limit(a: f64, b: f64, shape: Shape, dimension: usize) -> Result<f64> {
    if dimension < 1 {
        return Err(Error::domain("space dimension must be >= 1"));
    }
    let (_, prefactor) = threshold_prefactor(a, b, shape)?;
    Ok(prefactor * (2.0 * dimension as f64 / PI).powf(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    /// Independent bisection on `y w'(y) + b w(y)` over `(0, 10]`.
    fn bisect_threshold(shape: Shape, b: f64) -> f64 {
        let h = |y: f64| y * shape.profile_derivative(y) + b * shape.profile(y);
        let (mut lo, mut hi) = (1e-9, 10.0);
        assert!(h(lo) > 0.0 && h(hi) < 0.0);
        while hi - lo > 1e-15 * hi {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid
            } else {
                hi = mid
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn harmonic_reduces_to_q() {
        for n in [2, 3, 7] {
            for q in [1.0, 3.0, 12.5] {
                let e = power_law_energy(0.5, 2.0, 0.5, 2.0, n, q).unwrap();
                assert!(rel(e, q) < 1e-14);
            }
        }
    }

    #[test]
    fn glueball_closed_form() {
        for n in [2, 3, 6] {
            for q in [3.0, 5.2, 9.0] {
                let e = power_law_energy(1.0, 1.0, 1.0, 1.0, n, q).unwrap();
                assert!(rel(e, 2.0 * (n as f64 * q).sqrt()) < 1e-14);
            }
        }
    }

    #[test]
    fn coulomb_closed_form() {
        for kappa in [0.5, 1.0, 2.0] {
            for (n, q) in [(2usize, 3.0), (3, 5.196), (5, 9.0)] {
                let e = power_law_energy(0.5, 2.0, -kappa, -1.0, n, q).unwrap();
                let nf = n as f64;
                let expected = -kappa * kappa * nf.powi(3) / (2.0 * q * q);
                assert!(rel(e, expected) < 1e-13);
            }
        }
    }

    #[test]
    fn power_law_domain() {
        assert!(power_law_energy(1.0, 1.0, -1.0, -1.0, 3, 4.0).is_err());
        assert!(power_law_energy(1.0, 2.0, 1.0, -1.0, 3, 4.0).is_err());
        assert!(power_law_energy(0.0, 2.0, 1.0, 1.0, 3, 4.0).is_err());
    }

    #[test]
    fn regge_rows() {
        let rows = glueball_regge_table(1.0, 3, 6).unwrap();
        assert!(rel(rows[0].energy, 6.0 * 3f64.powf(0.25)) < 1e-14);
        for row in &rows {
            assert!(rel(row.energy_squared / row.q, 12.0) < 1e-14);
            assert!(rel(row.length, row.energy / 2.0) < 1e-15);
        }
        assert!(glueball_regge_table(0.0, 3, 1).is_err());
    }

    #[test]
    fn threshold_roots() {
        assert_eq!(threshold_root(Shape::Gaussian, 2.0).unwrap(), 1.0);
        assert_eq!(threshold_root(Shape::Exponential, 2.0).unwrap(), 2.0);
        assert!((threshold_root(Shape::Gaussian, 1.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-16);
        for shape in [Shape::Gaussian, Shape::Exponential] {
            for b in [0.5, 1.0, 1.5, 2.0, 3.0] {
                let y0 = threshold_root(shape, b).unwrap();
                let residual = y0 * shape.profile_derivative(y0) + b * shape.profile(y0);
                assert!(residual.abs() < 1e-12);
                assert!((y0 - bisect_threshold(shape, b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn critical_coupling_examples() {
        for (a, n, q) in [(0.5, 2usize, 3.0), (1.0, 3, 5.0), (2.0, 4, 11.0)] {
            let ratio = q / n as f64;
            let g = critical_coupling(a, 2.0, Shape::Gaussian, n, q).unwrap();
            assert_eq!(g.y0, 1.0);
            assert!(rel(g.g_c, a * E * ratio * ratio) < 1e-14);
            let g = critical_coupling(a, 2.0, Shape::Exponential, n, q).unwrap();
            assert_eq!(g.y0, 2.0);
            assert!(rel(g.g_c, a * E * E / 4.0 * ratio * ratio) < 1e-14);
            let g = critical_coupling(a, 1.0, Shape::Gaussian, n, q).unwrap();
            assert!(rel(g.g_c, a * 2f64.sqrt() * E.sqrt() * ratio) < 1e-14);
        }
        assert!(rel(2f64.sqrt() * E.sqrt(), 2.33164) < 1e-5);
    }

    #[test]
    fn critical_coupling_is_scale_invariant() {
        for shape in [Shape::Gaussian, Shape::Exponential] {
            for b in [1.0, 2.0] {
                let g1 = critical_coupling(0.7, b, shape, 3, 4.0).unwrap();
                let g2 = critical_coupling(0.7, b, shape, 6, 8.0).unwrap();
                assert_eq!(g1.g_c, g2.g_c);
                let g3 = critical_coupling(5.0, b, shape, 11, 2.0).unwrap();
                assert_eq!(g1.y0, g3.y0);
            }
        }
    }

    #[test]
    fn ground_curve_examples() {
        let ns: Vec<usize> = (2..=101).collect();
        let curve = ground_state_critical_curve(0.5, 2.0, Shape::Gaussian, 3, &ns).unwrap();
        assert!(rel(curve[0].g_c, 9.0 * E / 8.0) < 1e-14);
        for w in curve.windows(2) {
            assert!(w[1].g_c > w[0].g_c);
        }
        let limit = ground_state_critical_limit(0.5, 2.0, Shape::Gaussian, 3).unwrap();
        assert!(rel(curve[1].g_c / limit, PI * PI / 12.0) < 1e-14);
        assert!(curve.last().unwrap().g_c < limit);
    }
}
