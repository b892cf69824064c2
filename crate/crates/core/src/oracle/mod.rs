//! Brute-force reference energies for two-particle cyclic systems.
//!
//! With two particles the cyclic sum counts the single pair twice, so in the
//! centre-of-mass frame `H = 2 T(|p|) + 2 W(r)` with `p` the relative
//! momentum. That one-dimensional radial problem is solved either by Numerov
//! integration (quadratic kinetics) or by diagonalization in a harmonic
//! oscillator basis (any kinetics).

mod basis;
mod numerov;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::kernel::{KineticSpec, PotentialForm, PotentialSpec};

pub use basis::{basis_diagonalize, basis_spectrum, MAX_BASIS_SIZE};
pub use numerov::{bound_state_count, critical_coupling_scan, numerov_ground_state, CriticalScan};

/// Relative two-body problem `H = 2 T(|p|) + 2 W(r)` in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveRadialProblem {
    kinetic: KineticSpec,
    potential: PotentialSpec,
    l: u32,
}

impl EffectiveRadialProblem {
    pub fn with_l(mut self, l: u32) -> Self {
        self.l = l;
        self
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// Coefficient of `p^B` in the relative kinetic energy.
    pub fn kinetic_coefficient(&self) -> f64 {
        2.0 * self.kinetic.coefficient()
    }

    pub fn kinetic_exponent(&self) -> f64 {
        self.kinetic.exponent()
    }

    pub fn kinetic_energy(&self, p: f64) -> f64 {
        2.0 * self.kinetic.value(p)
    }

    pub fn potential_energy(&self, r: f64) -> f64 {
        2.0 * self.potential.value(r)
    }

    pub fn potential_derivative(&self, r: f64) -> f64 {
        2.0 * self.potential.derivative(r)
    }

    pub fn kinetics(&self) -> &KineticSpec {
        &self.kinetic
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// Length at which kinetic and potential terms balance; the range for
    /// finite-range potentials.
    pub fn length_scale(&self) -> f64 {
        let kappa = self.kinetic_coefficient();
        let b = self.kinetic_exponent();
        match self.potential.form() {
            PotentialForm::PowerLaw { c, f } if b + f != 0.0 => {
                (kappa / (2.0 * c.abs())).powf(1.0 / (b + f))
            }
            PotentialForm::PowerLaw { .. } => 1.0,
            PotentialForm::FiniteRange { range, .. } => range,
        }
    }
}

/// Reduces the two-particle cyclic Hamiltonian to its relative motion.
pub fn reduce_two_body(kin: &KineticSpec, pot: &PotentialSpec) -> EffectiveRadialProblem {
    EffectiveRadialProblem {
        kinetic: *kin,
        potential: *pot,
        l: 0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OracleMethod {
    Numerov,
    BasisDiagonalization,
}

/// Discretization used for an oracle value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum OracleMesh {
    Numerov { step: f64, r_max: f64, steps: usize },
    Basis { size: usize, scale: f64, quadrature_order: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub energy: f64,
    pub method: OracleMethod,
    /// Refinement criterion of the producing method was met.
    pub converged: bool,
    pub mesh: OracleMesh,
}
