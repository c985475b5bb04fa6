//! Scalar Lorentz/Drude medium model.
//!
//! A medium is a set of electric and magnetic poles on top of the vacuum
//! constants. Each pole contributes `Ω² / (ω_l² − 2iγω − ω²)` to the relative
//! response. The damping stored here is the physical `γ`; operator
//! construction doubles it when it builds the dissipator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vacuum permittivity in F/m.
pub const EPS0_SI: f64 = 8.854_187_812_8e-12;
/// Vacuum permeability in H/m.
pub const MU0_SI: f64 = 1.256_637_062_12e-6;

/// One resonance of the constitutive relation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LorentzPole {
    /// Coupling strength Ω (rad/s).
    pub big_omega: f64,
    /// Resonance ω_l (rad/s). Zero makes this a Drude pole.
    pub resonance: f64,
    /// Physical damping γ (rad/s).
    pub damping: f64,
}

impl LorentzPole {
    pub fn new(big_omega: f64, resonance: f64, damping: f64) -> Self {
        Self {
            big_omega,
            resonance,
            damping,
        }
    }

    pub fn is_drude(&self) -> bool {
        self.resonance == 0.0
    }

    fn term(&self, omega: f64) -> Complex64 {
        let denom = Complex64::new(
            self.resonance * self.resonance - omega * omega,
            -2.0 * self.damping * omega,
        );
        Complex64::new(self.big_omega * self.big_omega, 0.0) / denom
    }
}

/// Which constitutive relation to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Electric,
    Magnetic,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Electric => "electric",
            Branch::Magnetic => "magnetic",
        }
    }
}

/// Poles and vacuum constants of a homogeneous medium region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MediumSpec {
    #[serde(default)]
    pub electric_poles: Vec<LorentzPole>,
    #[serde(default)]
    pub magnetic_poles: Vec<LorentzPole>,
    pub eps0: f64,
    pub mu0: f64,
}

/// Coarse classification of a validated medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MediumClass {
    Vacuum,
    LosslessLorentz,
    Drude,
    LossyLorentz,
}

impl MediumSpec {
    /// Vacuum in SI units.
    pub fn vacuum_si() -> Self {
        Self {
            electric_poles: Vec::new(),
            magnetic_poles: Vec::new(),
            eps0: EPS0_SI,
            mu0: MU0_SI,
        }
    }

    /// Vacuum in normalized units (ε₀ = μ₀ = 1).
    pub fn vacuum() -> Self {
        Self {
            electric_poles: Vec::new(),
            magnetic_poles: Vec::new(),
            eps0: 1.0,
            mu0: 1.0,
        }
    }

    /// Normalized-unit medium with the given poles.
    pub fn normalized(electric_poles: Vec<LorentzPole>, magnetic_poles: Vec<LorentzPole>) -> Self {
        Self {
            electric_poles,
            magnetic_poles,
            eps0: 1.0,
            mu0: 1.0,
        }
    }

    pub fn n_electric(&self) -> usize {
        self.electric_poles.len()
    }

    pub fn n_magnetic(&self) -> usize {
        self.magnetic_poles.len()
    }

    /// `N = max(N_e, N_m)`.
    pub fn pole_count(&self) -> usize {
        self.n_electric().max(self.n_magnetic())
    }

    pub fn poles(&self, branch: Branch) -> &[LorentzPole] {
        match branch {
            Branch::Electric => &self.electric_poles,
            Branch::Magnetic => &self.magnetic_poles,
        }
    }

    fn vacuum_constant(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Electric => self.eps0,
            Branch::Magnetic => self.mu0,
        }
    }

    pub fn validate(&self) -> Result<MediumClass> {
        validate_medium(self)
    }
}

/// Checks sign constraints and classifies the medium.
pub fn validate_medium(spec: &MediumSpec) -> Result<MediumClass> {
    if !(spec.eps0 > 0.0 && spec.mu0 > 0.0) {
        return Err(Error::NonPositiveVacuum {
            eps0: spec.eps0,
            mu0: spec.mu0,
        });
    }
    for branch in [Branch::Electric, Branch::Magnetic] {
        for (index, pole) in spec.poles(branch).iter().enumerate() {
            if !(pole.big_omega > 0.0) {
                return Err(Error::NonPositiveCoupling {
                    branch: branch.name(),
                    index,
                    value: pole.big_omega,
                });
            }
            if !(pole.resonance >= 0.0) {
                return Err(Error::NegativeResonance {
                    branch: branch.name(),
                    index,
                    value: pole.resonance,
                });
            }
            if !(pole.damping >= 0.0) {
                return Err(Error::NegativeDamping {
                    branch: branch.name(),
                    index,
                    value: pole.damping,
                });
            }
        }
    }

    let all = || spec.electric_poles.iter().chain(spec.magnetic_poles.iter());
    let class = if all().next().is_none() {
        MediumClass::Vacuum
    } else if all().any(LorentzPole::is_drude) {
        MediumClass::Drude
    } else if all().all(|p| p.damping == 0.0) {
        MediumClass::LosslessLorentz
    } else {
        MediumClass::LossyLorentz
    };
    Ok(class)
}

/// Evaluates ε(ω) or μ(ω) at a real angular frequency.
pub fn response_at(spec: &MediumSpec, omega: f64, branch: Branch) -> Result<Complex64> {
    let mut sum = Complex64::new(1.0, 0.0);
    for (index, pole) in spec.poles(branch).iter().enumerate() {
        let w2 = pole.resonance * pole.resonance;
        let scale = w2 + omega * omega;
        let gap = (w2 - omega * omega).abs();
        if pole.damping * omega.abs() <= f64::EPSILON * scale && gap <= f64::EPSILON * scale {
            return Err(Error::PoleSingularity { index, omega });
        }
        sum += pole.term(omega);
    }
    Ok(sum * spec.vacuum_constant(branch))
}
