//! Exact cyclic harmonic oscillator.
//!
//! The neighbour sum `Σ (r_i - r_{i+1})²` is the quadratic form of the
//! circulant matrix with first row `(2, -1, 0, …, 0, -1)`. Its eigenvalues
//! `λ_i = 4 sin²(iπ/N)` and the real orthogonal transform `U` decouple the
//! Hamiltonian into `N - 1` independent oscillators plus the centre of mass.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Ties in `Q` closer than this are merged into one level.
pub const LEVEL_MERGE_TOLERANCE: f64 = 1e-9;

fn check_particles(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::domain(format!("particle count must be >= 2, got {n}")));
    }
    Ok(())
}

fn check_positive(name: &str, x: f64) -> Result<()> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("{name} must be > 0, got {x}")));
    }
    Ok(())
}

/// `sin(iπ/N)`, reduced to `min(i, N - i) π / N` so that the mode symmetry
/// `i ↔ N - i` holds bit for bit and `i = N` gives exactly zero.
pub fn mode_sine(i: usize, n: usize) -> f64 {
    let k = i % n;
    let k = k.min(n - k);
    if k == 0 {
        0.0
    } else {
        (k as f64 * PI / n as f64).sin()
    }
}

/// Mode labels `(n_i, l_i)` for the `N - 1` internal oscillators.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    particles: usize,
    dimension: usize,
    n: Vec<u32>,
    l: Vec<u32>,
}

impl QuantumNumbers {
    pub fn new(particles: usize, dimension: usize, n: Vec<u32>, l: Vec<u32>) -> Result<Self> {
        check_particles(particles)?;
        if dimension < 1 {
            return Err(Error::domain("space dimension must be >= 1"));
        }
        if n.len() != particles - 1 || l.len() != particles - 1 {
            return Err(Error::domain(format!(
                "need {} radial and orbital quantum numbers, got {} and {}",
                particles - 1,
                n.len(),
                l.len()
            )));
        }
        if dimension == 1 && l.iter().any(|&li| li > 1) {
            return Err(Error::domain("in one dimension l is a parity label (0 or 1)"));
        }
        Ok(QuantumNumbers {
            particles,
            dimension,
            n,
            l,
        })
    }

    pub fn ground(particles: usize, dimension: usize) -> Result<Self> {
        check_particles(particles)?;
        Self::new(
            particles,
            dimension,
            vec![0; particles - 1],
            vec![0; particles - 1],
        )
    }

    /// Lowest-`l` labels reproducing the mode occupations `ν_i = 2 n_i + l_i`.
    pub fn from_occupations(particles: usize, dimension: usize, nu: &[u32]) -> Result<Self> {
        let n = nu.iter().map(|v| v / 2).collect();
        let l = nu.iter().map(|v| v % 2).collect();
        Self::new(particles, dimension, n, l)
    }

    pub fn particles(&self) -> usize {
        self.particles
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn radial(&self) -> &[u32] {
        &self.n
    }

    pub fn orbital(&self) -> &[u32] {
        &self.l
    }

    /// Mode occupations `ν_i = 2 n_i + l_i`.
    pub fn occupations(&self) -> Vec<u32> {
        self.n.iter().zip(&self.l).map(|(n, l)| 2 * n + l).collect()
    }

    /// `Σ_i 2 sin(iπ/N) (2 n_i + l_i + D/2)`.
    pub fn weighted_sum(&self) -> f64 {
        let half_d = 0.5 * self.dimension as f64;
        self.occupations()
            .iter()
            .enumerate()
            .map(|(k, &nu)| 2.0 * mode_sine(k + 1, self.particles) * (nu as f64 + half_d))
            .sum()
    }
}

/// Circulant spectrum, decoupling transform and ground-state quadratic form.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeData {
    pub lambda: Vec<f64>,
    pub transform: DMatrix<f64>,
    pub quadratic_form: DMatrix<f64>,
}

impl ModeData {
    pub fn new(n: usize) -> Result<Self> {
        Ok(ModeData {
            lambda: lambda_coefficients(n)?,
            transform: transform_matrix(n)?,
            quadratic_form: ground_state_quadratic_form(n)?,
        })
    }
}

/// `λ_i = 4 sin²(iπ/N)` for `i = 1..=N`.
pub fn lambda_coefficients(n: usize) -> Result<Vec<f64>> {
    check_particles(n)?;
    Ok((1..=n)
        .map(|i| {
            let s = mode_sine(i, n);
            4.0 * s * s
        })
        .collect())
}

/// `U_ij = (cos(2πij/N) + sin(2πij/N)) / √N`, symmetric and involutive.
pub fn transform_matrix(n: usize) -> Result<DMatrix<f64>> {
    check_particles(n)?;
    let norm = 1.0 / (n as f64).sqrt();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let k = ((r + 1) * (c + 1)) % n;
        if k == 0 {
            return norm;
        }
        let angle = 2.0 * PI * k as f64 / n as f64;
        norm * (angle.cos() + angle.sin())
    }))
}

/// `E = ω Σ 2 sin(iπ/N)(2 n_i + l_i + D/2)`. The mass drops out.
pub fn oscillator_energy(mass: f64, omega: f64, q: &QuantumNumbers) -> Result<f64> {
    check_positive("mass", mass)?;
    check_positive("omega", omega)?;
    Ok(omega * q.weighted_sum())
}

/// `E₀ = ω D cot(π / 2N)`.
pub fn ground_state_energy(mass: f64, omega: f64, n: usize, dimension: usize) -> Result<f64> {
    check_positive("mass", mass)?;
    check_positive("omega", omega)?;
    check_particles(n)?;
    Ok(omega * dimension as f64 / (PI / (2.0 * n as f64)).tan())
}

/// Circulant matrix `Z` of the ground-state exponent
/// `-(mω/2) Σ_ij Z_ij r_i·r_j`:
/// `Z_ij = (2/N) sin(π/N) / (cos(2(i-j)π/N) - cos(π/N))`.
pub fn ground_state_quadratic_form(n: usize) -> Result<DMatrix<f64>> {
    check_particles(n)?;
    let nf = n as f64;
    let s = (PI / nf).sin();
    let c = (PI / nf).cos();
    let row: Vec<f64> = (0..n)
        .map(|k| {
            let k = k.min(n - k);
            2.0 / nf * s / ((2.0 * PI * k as f64 / nf).cos() - c)
        })
        .collect();
    Ok(DMatrix::from_fn(n, n, |i, j| row[(i + n - j) % n]))
}

/// `Z = U diag(√λ_1, …, √λ_{N-1}, 0) U`, built from the mode transform.
pub fn quadratic_form_from_modes(n: usize) -> Result<DMatrix<f64>> {
    let u = transform_matrix(n)?;
    let roots: Vec<f64> = (1..=n).map(|i| 2.0 * mode_sine(i, n)).collect();
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(roots));
    Ok(&u * d * &u)
}

/// Exact size parameters `γ_i = (m² ω² λ_i)^{1/4}`, `i = 1..N-1`.
pub fn size_parameters_exact(mass: f64, omega: f64, n: usize) -> Result<Vec<f64>> {
    check_positive("mass", mass)?;
    check_positive("omega", omega)?;
    let lambda = lambda_coefficients(n)?;
    Ok(lambda[..n - 1]
        .iter()
        .map(|l| (mass * mass * omega * omega * l).powf(0.25))
        .collect())
}

/// One energy level of the cyclic oscillator, `E = ω q`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub q: f64,
    /// Number of `(n_i, l_i)` assignments in the level.
    pub multiplicity: u64,
    /// Every occupation vector `ν` merged into this level.
    pub occupations: Vec<Vec<u32>>,
    pub representative: QuantumNumbers,
}

/// Assignments `(n, l)` with `2n + l = ν`; with `angular`, each weighted by
/// `2l + 1`. In one dimension `l` is the parity and fixed by `ν`.
fn splittings(nu: u32, dimension: usize, angular: bool) -> u64 {
    let nu = nu as u64;
    if dimension == 1 {
        1
    } else if angular {
        (nu + 1) * (nu + 2) / 2
    } else {
        nu / 2 + 1
    }
}

/// The `count` lowest distinct levels, ascending in `Q`.
///
/// Each quantum in mode `i` raises `Q` by `2 sin(iπ/N) ≥ 2 sin(π/N)`, and
/// stacking quanta in mode 1 alone yields `count` distinct values within
/// `2 (count - 1) sin(π/N)` of the ground state; searching that window is
/// therefore complete.
pub fn enumerate_levels(
    n: usize,
    dimension: usize,
    count: usize,
    angular: bool,
) -> Result<Vec<Level>> {
    check_particles(n)?;
    if count == 0 {
        return Err(Error::domain("level count must be >= 1"));
    }
    if dimension < 1 {
        return Err(Error::domain("space dimension must be >= 1"));
    }
    if angular && dimension != 3 {
        return Err(Error::domain(format!(
            "angular (2l+1) weighting is defined only for D=3, got D={dimension}"
        )));
    }
    let steps: Vec<f64> = (1..n).map(|i| 2.0 * mode_sine(i, n)).collect();
    let window = steps[0] * (count - 1) as f64 + LEVEL_MERGE_TOLERANCE;
    let ground_q = dimension as f64 * 0.5 * steps.iter().sum::<f64>();

    let mut found: Vec<(f64, Vec<u32>)> = Vec::new();
    let mut nu = vec![0u32; n - 1];
    collect_occupations(&steps, 0, window, 0.0, &mut nu, &mut found);
    found.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));

    let mut levels: Vec<Level> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for (excitation, occ) in found {
        let mult: u64 = occ.iter().map(|&v| splittings(v, dimension, angular)).product();
        if excitation - anchor <= LEVEL_MERGE_TOLERANCE {
            let level = levels.last_mut().expect("anchor set by a previous level");
            level.multiplicity += mult;
            level.occupations.push(occ);
            continue;
        }
        if levels.len() == count {
            break;
        }
        anchor = excitation;
        levels.push(Level {
            q: ground_q + excitation,
            multiplicity: mult,
            representative: QuantumNumbers::from_occupations(n, dimension, &occ)?,
            occupations: vec![occ],
        });
    }
    Ok(levels)
}

fn collect_occupations(
    steps: &[f64],
    mode: usize,
    window: f64,
    excitation: f64,
    nu: &mut Vec<u32>,
    out: &mut Vec<(f64, Vec<u32>)>,
) {
    if mode == steps.len() {
        out.push((excitation, nu.clone()));
        return;
    }
    let mut k = 0u32;
    loop {
        let e = excitation + k as f64 * steps[mode];
        if e > window {
            break;
        }
        nu[mode] = k;
        collect_occupations(steps, mode + 1, window, e, nu, out);
        k += 1;
    }
    nu[mode] = 0;
}

/// Distinct values of `Q` over all occupations with `Σ ν_i ≤ max_quanta`,
/// ascending, ties merged as in [`enumerate_levels`].
pub fn distinct_q_up_to_quanta(n: usize, dimension: usize, max_quanta: u32) -> Result<Vec<f64>> {
    check_particles(n)?;
    // modes i and N - i share a sine; walk the distinct ones only
    let classes: Vec<f64> = (1..=n / 2).map(|i| 2.0 * mode_sine(i, n)).collect();
    let ground_q = dimension as f64 * 0.5 * (1..n).map(|i| 2.0 * mode_sine(i, n)).sum::<f64>();
    let mut out = Vec::new();
    walk_classes(&classes, 0, max_quanta, 0.0, &mut out);
    out.sort_by(f64::total_cmp);
    let mut merged: Vec<f64> = Vec::with_capacity(out.len());
    let mut anchor = f64::NEG_INFINITY;
    for x in out {
        if x - anchor > LEVEL_MERGE_TOLERANCE {
            anchor = x;
            merged.push(ground_q + x);
        }
    }
    Ok(merged)
}

fn walk_classes(classes: &[f64], idx: usize, budget: u32, excitation: f64, out: &mut Vec<f64>) {
    if idx == classes.len() {
        out.push(excitation);
        return;
    }
    for k in 0..=budget {
        walk_classes(
            classes,
            idx + 1,
            budget - k,
            excitation + k as f64 * classes[idx],
            out,
        );
    }
}
