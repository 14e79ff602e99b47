//! Rotor aerodynamics: parametric coefficient curves and closed-form fitting.
//!
//! The power coefficient is modelled as
//!
//! ```text
//! cp(λ) = C_M0·λ + a·λ^α − b·λ^β
//! ```
//!
//! with the torque coefficient `cm(λ) = cp(λ)/λ` extended continuously to
//! `cm(0) = C_M0`, so a non-zero `C_M0` gives the rotor a starting torque.
//! [`fit_coefficients`] picks `a` and `b` so the curve peaks exactly at the
//! design tip-speed ratio `λ₀` with the peak value given by an empirical
//! ceiling formula, leaving the exponents `α`, `β` as shape parameters.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_non_negative, require_positive, Error, Result};

/// Ideal upper bound on the power coefficient of any rotor.
pub const BETZ_LIMIT: f64 = 0.593;

/// Design tip-speed ratios for which the peak-value formula is trusted.
pub const LAMBDA0_VALID_RANGE: (f64, f64) = (1.0, 15.0);
/// Admissible window for the first shape exponent.
pub const ALPHA_RANGE: (f64, f64) = (2.0, 2.5);
/// Admissible window for the second shape exponent.
pub const BETA_RANGE: (f64, f64) = (2.3, 2.8);

/// Fitted coefficient set for one rotor design point.
///
/// Invariants (enforced by [`fit_coefficients`]): `a > 0`, `b > 0`,
/// `beta > alpha`, the curve attains `cp_max` at `lambda0`, and its slope
/// vanishes there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbineCoefficients {
    /// Zero-speed torque coefficient; 0 in the simplified variant.
    pub c_m0: f64,
    pub a: f64,
    pub b: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Design tip-speed ratio the fit is anchored at.
    pub lambda0: f64,
    /// Peak power coefficient attained at `lambda0`.
    pub cp_max: f64,
}

impl TurbineCoefficients {
    /// Power coefficient at tip-speed ratio `lambda >= 0`.
    pub fn cp(&self, lambda: f64) -> Result<f64> {
        require_non_negative(lambda, "lambda")?;
        Ok(self.c_m0 * lambda + self.a * lambda.powf(self.alpha)
            - self.b * lambda.powf(self.beta))
    }

    /// Torque coefficient at tip-speed ratio `lambda >= 0`.
    ///
    /// Algebraically `cp(λ)/λ`, but evaluated in a form that stays defined at
    /// standstill: `cm(0) = c_m0`.
    pub fn cm(&self, lambda: f64) -> Result<f64> {
        require_non_negative(lambda, "lambda")?;
        Ok(self.c_m0 + self.a * lambda.powf(self.alpha - 1.0)
            - self.b * lambda.powf(self.beta - 1.0))
    }
}

/// Rotor disc geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurbineGeometry {
    /// Blade tip radius [m].
    pub rotor_radius: f64,
    /// Swept area [m²]; `π·R²` unless overridden for shrouded designs.
    pub swept_area: f64,
}

impl TurbineGeometry {
    pub fn new(rotor_radius: f64) -> Result<Self> {
        require_positive(rotor_radius, "rotor_radius")?;
        Ok(TurbineGeometry {
            rotor_radius,
            swept_area: std::f64::consts::PI * rotor_radius * rotor_radius,
        })
    }

    pub fn with_swept_area(rotor_radius: f64, swept_area: f64) -> Result<Self> {
        require_positive(rotor_radius, "rotor_radius")?;
        require_positive(swept_area, "swept_area")?;
        Ok(TurbineGeometry {
            rotor_radius,
            swept_area,
        })
    }
}

/// Ambient air the rotor works in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AirModel {
    /// Density [kg/m³].
    pub rho: f64,
}

impl AirModel {
    pub fn new(rho: f64) -> Result<Self> {
        require_positive(rho, "rho")?;
        Ok(AirModel { rho })
    }
}

impl Default for AirModel {
    /// Dry air at sea level and 15 °C.
    fn default() -> Self {
        AirModel { rho: 1.225 }
    }
}

/// Fit `a`, `b`, `C_M0`, and the peak value for a design tip-speed ratio.
///
/// The peak power coefficient comes from the empirical ceiling
/// `0.3·λ₀^0.35 − 0.0014·λ₀²` and the starting-torque coefficient from
/// `0.2/λ₀²` (dropped to zero when `simplified` is set, which trades away
/// starting torque for a two-term curve). `a` and `b` then solve the two
/// anchor conditions `cp(λ₀) = cp_max` and `cp′(λ₀) = 0` in closed form.
///
/// `lambda0` outside [`LAMBDA0_VALID_RANGE`] is accepted with a warning as
/// long as the resulting peak stays inside `(0, BETZ_LIMIT)`; the exponents
/// must lie in their admissible windows with `beta > alpha`.
pub fn fit_coefficients(
    lambda0: f64,
    alpha: f64,
    beta: f64,
    simplified: bool,
) -> Result<TurbineCoefficients> {
    require_positive(lambda0, "lambda0")?;
    let (lo, hi) = LAMBDA0_VALID_RANGE;
    if lambda0 < lo || lambda0 > hi {
        log::warn!(
            "lambda0 = {lambda0} is outside the trusted fit range [{lo}, {hi}]; \
             the peak-value formula is extrapolating"
        );
    }
    if !(ALPHA_RANGE.0..=ALPHA_RANGE.1).contains(&alpha) {
        return Err(invalid(
            "alpha",
            format!("must lie in [{}, {}], got {alpha}", ALPHA_RANGE.0, ALPHA_RANGE.1),
        ));
    }
    if !(BETA_RANGE.0..=BETA_RANGE.1).contains(&beta) {
        return Err(invalid(
            "beta",
            format!("must lie in [{}, {}], got {beta}", BETA_RANGE.0, BETA_RANGE.1),
        ));
    }
    if beta <= alpha {
        return Err(invalid(
            "beta",
            format!("must exceed alpha for a bounded curve, got beta = {beta} <= alpha = {alpha}"),
        ));
    }

    let cp_max = 0.3 * lambda0.powf(0.35) - 0.0014 * lambda0 * lambda0;
    if !(cp_max > 0.0 && cp_max < BETZ_LIMIT) {
        return Err(Error::DegenerateFit(format!(
            "peak power coefficient {cp_max} at lambda0 = {lambda0} falls outside (0, {BETZ_LIMIT})"
        )));
    }
    let c_m0 = if simplified { 0.0 } else { 0.2 / (lambda0 * lambda0) };

    // Anchor conditions as a 2x2 system in (a, b):
    //   a·A1 − b·B1 = C1   (peak value)
    //   a·A2 − b·B2 = C2   (zero slope)
    let a1 = lambda0.powf(alpha);
    let a2 = alpha * lambda0.powf(alpha - 1.0);
    let b1 = lambda0.powf(beta);
    let b2 = beta * lambda0.powf(beta - 1.0);
    let c1 = cp_max - lambda0 * c_m0;
    let c2 = -c_m0;

    let denom = b1 / a1 - b2 / a2;
    if denom.abs() < 1e-12 {
        return Err(Error::DegenerateFit(format!(
            "exponent pair alpha = {alpha}, beta = {beta} makes the anchor system singular"
        )));
    }
    let b = (c2 / a2 - c1 / a1) / denom;
    let a = b2 / a2 * b + c2 / a2;
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::DegenerateFit(format!(
            "fit produced non-positive curve coefficients a = {a}, b = {b}"
        )));
    }

    Ok(TurbineCoefficients {
        c_m0,
        a,
        b,
        alpha,
        beta,
        lambda0,
        cp_max,
    })
}

/// Mechanical power [W] captured at wind speed `v` and rotor speed `omega_t`.
pub fn power(
    geometry: &TurbineGeometry,
    air: &AirModel,
    coefficients: &TurbineCoefficients,
    v: f64,
    omega_t: f64,
) -> Result<f64> {
    require_positive(air.rho, "rho")?;
    require_non_negative(v, "v")?;
    require_non_negative(omega_t, "omega_t")?;
    if v == 0.0 {
        return Ok(0.0);
    }
    let lambda = omega_t * geometry.rotor_radius / v;
    Ok(coefficients.cp(lambda)? * air.rho * (v * v * v) / 2.0 * geometry.swept_area)
}

/// Shaft torque [N·m] at wind speed `v` and rotor speed `omega_t`.
///
/// For a turning rotor this is the power/speed quotient, which keeps
/// `power == torque·omega_t` exact to rounding. At standstill the
/// torque-coefficient form takes over: `cm(0)·ρ·v²/2·S·R`, which is zero for
/// a simplified (no starting torque) coefficient set.
pub fn torque(
    geometry: &TurbineGeometry,
    air: &AirModel,
    coefficients: &TurbineCoefficients,
    v: f64,
    omega_t: f64,
) -> Result<f64> {
    require_positive(air.rho, "rho")?;
    require_non_negative(v, "v")?;
    require_non_negative(omega_t, "omega_t")?;
    if v == 0.0 {
        return Ok(0.0);
    }
    if omega_t == 0.0 {
        return Ok(coefficients.cm(0.0)? * air.rho * (v * v) / 2.0
            * geometry.swept_area
            * geometry.rotor_radius);
    }
    Ok(power(geometry, air, coefficients, v, omega_t)? / omega_t)
}
