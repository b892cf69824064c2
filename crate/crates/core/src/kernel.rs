//! Kinematics and pair potentials.
//!
//! Every built-in form carries a closed-form value, a closed-form derivative
//! and the sign class of `b''`, where `b` is defined through `f(x) = b(x²)`.
//! The two sign classes decide whether an envelope energy is an upper bound,
//! a lower bound, exact, or carries no variational guarantee.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign class of the second derivative of `b(y)` where `f(x) = b(x²)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Curvature {
    Negative,
    Zero,
    Positive,
}

impl Curvature {
    fn from_sign(s: f64) -> Self {
        if s > 0.0 {
            Curvature::Positive
        } else if s < 0.0 {
            Curvature::Negative
        } else {
            Curvature::Zero
        }
    }
}

/// Variational character of an envelope energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Character {
    UpperBound,
    LowerBound,
    Exact,
    Indeterminate,
}

impl Character {
    pub fn label(self) -> &'static str {
        match self {
            Character::UpperBound => "upper_bound",
            Character::LowerBound => "lower_bound",
            Character::Exact => "exact",
            Character::Indeterminate => "indeterminate",
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Profile `w(y)` of a finite-range potential, with `w(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    /// `w(y) = exp(-y²)`
    Gaussian,
    /// `w(y) = exp(-y)`
    Exponential,
}

impl Shape {
    pub fn profile(self, y: f64) -> f64 {
        match self {
            Shape::Gaussian => (-y * y).exp(),
            Shape::Exponential => (-y).exp(),
        }
    }

    pub fn profile_derivative(self, y: f64) -> f64 {
        match self {
            Shape::Gaussian => -2.0 * y * (-y * y).exp(),
            Shape::Exponential => -(-y).exp(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Shape::Gaussian => "gaussian",
            Shape::Exponential => "exponential",
        }
    }
}

/// Exponent classified once so that hot loops skip the integrality test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Power {
    Square,
    Int(i32),
    Real(f64),
}

impl Power {
    pub(crate) fn new(e: f64) -> Self {
        let k = e as i32;
        if k as f64 != e || k.abs() > 16 {
            Power::Real(e)
        } else if k == 2 {
            Power::Square
        } else {
            Power::Int(k)
        }
    }

    #[inline]
    pub(crate) fn apply(self, x: f64) -> f64 {
        match self {
            Power::Square => x * x,
            Power::Int(1) => x,
            Power::Int(k) => x.powi(k),
            Power::Real(e) => x.powf(e),
        }
    }
}

/// `x^e`, using repeated multiplication for small integral exponents.
#[inline]
pub(crate) fn pow_real(x: f64, e: f64) -> f64 {
    let k = e as i32;
    if k as f64 != e || k.abs() > 16 {
        return x.powf(e);
    }
    match k {
        0 => 1.0,
        1 => x,
        2 => x * x,
        3 => x * x * x,
        -1 => 1.0 / x,
        -2 => 1.0 / (x * x),
        _ => x.powi(k),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KineticForm {
    /// `T(p) = a p^b`
    PowerLaw { a: f64, b: f64 },
}

/// One-particle kinetic energy `T(p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KineticSpec {
    form: KineticForm,
    curvature: Curvature,
    power: Power,
}

impl KineticSpec {
    /// `T(p) = a p^b` with `a, b > 0`.
    pub fn power_law(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0) {
            return Err(Error::domain(format!("kinetic coefficient a must be > 0, got {a}")));
        }
        if !(b.is_finite() && b > 0.0) {
            return Err(Error::domain(format!("kinetic exponent b must be > 0, got {b}")));
        }
        let curvature = if b < 2.0 {
            Curvature::Negative
        } else if b > 2.0 {
            Curvature::Positive
        } else {
            Curvature::Zero
        };
        let spec = KineticSpec {
            form: KineticForm::PowerLaw { a, b },
            curvature,
            power: Power::new(b),
        };
        verify_curvature(|y| spec.value(y.sqrt()), 1.0, curvature)?;
        Ok(spec)
    }

    /// Nonrelativistic kinematics `p² / 2m`.
    pub fn nonrelativistic(mass: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::domain(format!("mass must be > 0, got {mass}")));
        }
        Self::power_law(0.5 / mass, 2.0)
    }

    pub fn form(&self) -> KineticForm {
        self.form
    }

    pub fn coefficient(&self) -> f64 {
        match self.form {
            KineticForm::PowerLaw { a, .. } => a,
        }
    }

    pub fn exponent(&self) -> f64 {
        match self.form {
            KineticForm::PowerLaw { b, .. } => b,
        }
    }

    #[inline]
    pub fn value(&self, p: f64) -> f64 {
        match self.form {
            KineticForm::PowerLaw { a, .. } => a * self.power.apply(p),
        }
    }

    pub fn derivative(&self, p: f64) -> f64 {
        match self.form {
            KineticForm::PowerLaw { a, b } => a * b * pow_real(p, b - 1.0),
        }
    }

    /// `p T'(p) = k p^e` as `(k, e)`.
    pub(crate) fn virial_term(&self) -> (f64, Power) {
        match self.form {
            KineticForm::PowerLaw { a, b } => (a * b, self.power),
        }
    }

    /// `p T'(p)`.
    #[inline]
    pub fn momentum_virial(&self, p: f64) -> f64 {
        match self.form {
            KineticForm::PowerLaw { a, b } => a * b * self.power.apply(p),
        }
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PotentialForm {
    /// `W(r) = c r^f`
    PowerLaw { c: f64, f: f64 },
    /// `W(r) = -g w(r / range)`
    FiniteRange { g: f64, shape: Shape, range: f64 },
}

/// Pair potential `W(r)` between cyclic neighbours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialSpec {
    form: PotentialForm,
    curvature: Curvature,
    power: Power,
}

impl PotentialSpec {
    /// `W(r) = c r^f` with `c f > 0`.
    pub fn power_law(c: f64, f: f64) -> Result<Self> {
        if !(c.is_finite() && f.is_finite()) || c * f <= 0.0 {
            return Err(Error::domain(format!(
                "power-law potential needs c*f > 0, got c={c}, f={f}"
            )));
        }
        let curvature = Curvature::from_sign(c * (0.5 * f) * (0.5 * f - 1.0));
        let spec = PotentialSpec {
            form: PotentialForm::PowerLaw { c, f },
            curvature,
            power: Power::new(f),
        };
        verify_curvature(|y| spec.value(y.sqrt()), 1.0, curvature)?;
        Ok(spec)
    }

    /// Harmonic pair potential `m ω² r² / 2`.
    pub fn harmonic(mass: f64, omega: f64) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0 && omega.is_finite() && omega > 0.0) {
            return Err(Error::domain(format!(
                "mass and omega must be > 0, got m={mass}, omega={omega}"
            )));
        }
        Self::power_law(0.5 * mass * omega * omega, 2.0)
    }

    /// `W(r) = -g w(r / range)`.
    pub fn finite_range(g: f64, shape: Shape, range: f64) -> Result<Self> {
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::domain(format!("coupling g must be > 0, got {g}")));
        }
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::domain(format!("range a must be > 0, got {range}")));
        }
        let spec = PotentialSpec {
            form: PotentialForm::FiniteRange { g, shape, range },
            curvature: Curvature::Negative,
            power: Power::Int(0),
        };
        verify_curvature(|y| spec.value(y.sqrt()), range * range, Curvature::Negative)?;
        Ok(spec)
    }

    pub fn form(&self) -> PotentialForm {
        self.form
    }

    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match self.form {
            PotentialForm::PowerLaw { c, .. } => c * self.power.apply(r),
            PotentialForm::FiniteRange { g, shape, range } => -g * shape.profile(r / range),
        }
    }

    pub fn derivative(&self, r: f64) -> f64 {
        match self.form {
            PotentialForm::PowerLaw { c, f } => c * f * pow_real(r, f - 1.0),
            PotentialForm::FiniteRange { g, shape, range } => {
                -(g / range) * shape.profile_derivative(r / range)
            }
        }
    }

    /// `r W'(r) = k r^e` as `(k, e)` for power laws.
    pub(crate) fn virial_term(&self) -> Option<(f64, Power)> {
        match self.form {
            PotentialForm::PowerLaw { c, f } => Some((c * f, self.power)),
            PotentialForm::FiniteRange { .. } => None,
        }
    }

    /// `r W'(r)`.
    #[inline]
    pub fn radial_virial(&self, r: f64) -> f64 {
        match self.form {
            PotentialForm::PowerLaw { c, f } => c * f * self.power.apply(r),
            PotentialForm::FiniteRange { g, shape, range } => {
                let y = r / range;
                -g * y * shape.profile_derivative(y)
            }
        }
    }

    /// `lim_{r→0} r W(r)`: nonzero only for a Coulomb-like `1/r` term,
    /// infinite for potentials more singular than `1/r`.
    pub fn origin_residue(&self) -> f64 {
        match self.form {
            PotentialForm::PowerLaw { c, f: -1.0 } => c,
            PotentialForm::PowerLaw { c, f } if f < -1.0 => c.signum() * f64::INFINITY,
            _ => 0.0,
        }
    }

    /// True when `W(r) → 0` at large distance, so that bound states must
    /// have negative energy.
    pub fn vanishes_at_infinity(&self) -> bool {
        match self.form {
            PotentialForm::PowerLaw { f, .. } => f < 0.0,
            PotentialForm::FiniteRange { .. } => true,
        }
    }

    pub fn is_finite_range(&self) -> bool {
        matches!(self.form, PotentialForm::FiniteRange { .. })
    }

    pub fn curvature(&self) -> Curvature {
        self.curvature
    }
}

/// Bound character from the two curvature classes.
///
/// Both concave gives an upper bound, both convex a lower bound. A vanishing
/// class defers to the other one; opposite nonzero classes give nothing.
pub fn variational_character(kin: &KineticSpec, pot: &PotentialSpec) -> Character {
    combine_curvatures(kin.curvature(), pot.curvature())
}

pub fn combine_curvatures(kinetic: Curvature, potential: Curvature) -> Character {
    use Curvature::*;
    match (kinetic, potential) {
        (Zero, Zero) => Character::Exact,
        (Negative, Negative) | (Zero, Negative) | (Negative, Zero) => Character::UpperBound,
        (Positive, Positive) | (Zero, Positive) | (Positive, Zero) => Character::LowerBound,
        (Negative, Positive) | (Positive, Negative) => Character::Indeterminate,
    }
}

/// Sign class of the second difference of `b` at `y`, with step `0.01 y`.
pub fn sampled_curvature<B: Fn(f64) -> f64>(b: B, y: f64) -> Curvature {
    let h = 1e-2 * y;
    let (lo, mid, hi) = (b(y - h), b(y), b(y + h));
    let d2 = hi - 2.0 * mid + lo;
    let scale = lo.abs().max(mid.abs()).max(hi.abs());
    if d2.abs() <= 1e-10 * scale {
        Curvature::Zero
    } else {
        Curvature::from_sign(d2)
    }
}

/// Checks a declared curvature class against second differences of `b` at
/// ten log-spaced points in `[1e-2, 1e2] * y_scale`.
fn verify_curvature<B: Fn(f64) -> f64>(b: B, y_scale: f64, declared: Curvature) -> Result<()> {
    for k in 0..10 {
        let y = y_scale * 10f64.powf(-2.0 + 4.0 * k as f64 / 9.0);
        let sampled = sampled_curvature(&b, y);
        // a sampled zero is inconclusive for a declared nonzero class
        let consistent = sampled == declared || (declared != Curvature::Zero && sampled == Curvature::Zero);
        if !consistent {
            return Err(Error::domain(format!(
                "declared curvature {declared:?} disagrees with sampled {sampled:?} at y={y:e}"
            )));
        }
    }
    Ok(())
}
