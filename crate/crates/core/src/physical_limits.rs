//! Physical realizability limits of the encoding for a trapped ion coupled
//! to a cavity mode: Lamb-Dicke parameter, effective coupling, and the
//! ceilings on the displacement parameters implied by the trap.

use serde::Serialize;

use crate::dynamics::EncodingParams;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054571817e-34;

/// Trap and cavity parameters in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams<T> {
    /// Ion mass [kg].
    pub mass: T,
    /// Trap (axial) angular frequency [rad/s].
    pub omega_a: T,
    /// Bare ion-cavity coupling rate [rad/s].
    pub g0: T,
    /// Cavity wavelength [m].
    pub lambda_c: T,
}

impl<T: Real> PhysicalParams<T> {
    /// Calcium ion in the standard reference trap.
    pub fn calcium_ion() -> Self {
        PhysicalParams {
            mass: T::of(6.64e-26),
            omega_a: T::of(4.0e5),
            g0: T::of(3.8e6),
            lambda_c: T::of(866e-9),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("mass", self.mass),
            ("omega_a", self.omega_a),
            ("g0", self.g0),
            ("lambda_c", self.lambda_c),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::Domain(format!(
                    "physical parameter {name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }

    /// Cavity wave number k_c = 2 pi / lambda_c.
    pub fn wave_number(&self) -> T {
        T::of(2.0) * T::PI() / self.lambda_c
    }
}

/// One violated realizability constraint, reported as data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation<T> {
    /// Which encoding quantity breaks the constraint.
    pub quantity: String,
    /// Requested value.
    pub value: T,
    /// Maximum allowed by the trap.
    pub bound: T,
    /// Which physical constraint sets the bound.
    pub constraint: String,
}

/// Derived coupling quantities and parameter ceilings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitsReport<T> {
    pub xi: T,
    pub wave_number: T,
    /// Ponderomotive frequency-pull rate delta = 2 xi g0^2 / omega_a [rad/s].
    pub delta: T,
    /// Adimensional coupling entering the conditional dynamics; the comb
    /// construction fixes it at 1/2.
    pub k: T,
    pub beta_max: T,
    /// Displacement ceiling from the Lamb-Dicke expansion.
    pub alpha_max_lamb_dicke: T,
    /// Displacement ceiling from trap anharmonicity.
    pub alpha_max_anharmonic: T,
    pub violations: Vec<Violation<T>>,
}

/// Lamb-Dicke parameter xi = k_c sqrt(hbar / (2 M omega_a)).
pub fn lamb_dicke_xi<T: Real>(phys: &PhysicalParams<T>) -> Result<T> {
    phys.validate()?;
    Ok(phys.wave_number() * (T::of(HBAR) / (T::of(2.0) * phys.mass * phys.omega_a)).sqrt())
}

/// Effective ponderomotive coupling (delta, k): the frequency-pull rate
/// delta = 2 xi g0^2 / omega_a, with the adimensional coupling k = 1/2.
pub fn coupling<T: Real>(phys: &PhysicalParams<T>) -> Result<(T, T)> {
    let xi = lamb_dicke_xi(phys)?;
    let delta = T::of(2.0) * xi * phys.g0 * phys.g0 / phys.omega_a;
    Ok((delta, T::of(0.5)))
}

/// Realizability ceilings without checking any particular encoding.
pub fn limits<T: Real>(phys: &PhysicalParams<T>) -> Result<LimitsReport<T>> {
    let xi = lamb_dicke_xi(phys)?;
    let (delta, k) = coupling(phys)?;
    let beta_max = T::PI() / (T::of(8.0) * xi);
    let alpha_max_lamb_dicke =
        ((T::one() + T::PI() / (T::of(2.0) * xi)).sqrt() - T::one()) / T::of(2.0).sqrt();
    let alpha_max_anharmonic = (T::of(HBAR)
        / (T::of(20.0) * phys.mass * phys.omega_a * phys.omega_a * phys.omega_a))
        .sqrt()
        * phys.g0
        * phys.wave_number();
    Ok(LimitsReport {
        xi,
        wave_number: phys.wave_number(),
        delta,
        k,
        beta_max,
        alpha_max_lamb_dicke,
        alpha_max_anharmonic,
        violations: Vec::new(),
    })
}

/// Checks an encoding against the trap's ceilings; violations come back as
/// data inside the report, not as errors.
pub fn validate_regime<T: Real>(
    phys: &PhysicalParams<T>,
    params: &EncodingParams<T>,
) -> Result<LimitsReport<T>> {
    params.validate()?;
    let mut report = limits(phys)?;
    if params.alpha > report.alpha_max_lamb_dicke {
        report.violations.push(Violation {
            quantity: "alpha".into(),
            value: params.alpha,
            bound: report.alpha_max_lamb_dicke,
            constraint: "Lamb-Dicke expansion of the cavity standing wave".into(),
        });
    }
    if params.alpha > report.alpha_max_anharmonic {
        report.violations.push(Violation {
            quantity: "alpha".into(),
            value: params.alpha,
            bound: report.alpha_max_anharmonic,
            constraint: "trap anharmonicity at large excursions".into(),
        });
    }
    if params.beta > report.beta_max {
        report.violations.push(Violation {
            quantity: "beta".into(),
            value: params.beta,
            bound: report.beta_max,
            constraint: "Lamb-Dicke bound on the displaced equilibrium".into(),
        });
    }
    Ok(report)
}
