//! Open-loop voltage/frequency scheduling and the optimal speed preset.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_non_negative, require_positive, Result};

/// How stator voltage follows commanded frequency below the rated point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VoltageLaw {
    /// `U = U_N·(f/f_N)·sqrt(M/M_N)` — tracks the torque demand.
    TorqueRatio,
    /// `U = U_N·(f/f_N)²` — suits loads whose torque grows with speed squared.
    Quadratic,
    /// `U = U_N·(f/f_N)` — constant flux.
    Linear,
}

impl fmt::Display for VoltageLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            VoltageLaw::TorqueRatio => "torque-ratio",
            VoltageLaw::Quadratic => "quadratic",
            VoltageLaw::Linear => "linear",
        };
        f.write_str(name)
    }
}

impl FromStr for VoltageLaw {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "torque-ratio" => Ok(VoltageLaw::TorqueRatio),
            "quadratic" => Ok(VoltageLaw::Quadratic),
            "linear" => Ok(VoltageLaw::Linear),
            other => Err(invalid(
                "law",
                format!("unknown voltage law `{other}` (expected torque-ratio, quadratic, or linear)"),
            )),
        }
    }
}

/// Machine rating the schedules are anchored to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatedPoint {
    /// Rated voltage [V].
    pub u_n: f64,
    /// Rated frequency [Hz].
    pub f_n: f64,
    /// Rated torque [N·m]; callers with an absolute torque demand divide by
    /// this to form the ratio [`preset_voltage`] takes.
    pub m_n: f64,
    /// Ceiling applied to every law, as a multiple of `u_n`.
    pub overvoltage_limit: f64,
}

impl RatedPoint {
    /// Rated point with the conventional 1.1·U_N ceiling.
    pub fn new(u_n: f64, f_n: f64, m_n: f64) -> Result<Self> {
        Self::with_overvoltage_limit(u_n, f_n, m_n, 1.1)
    }

    pub fn with_overvoltage_limit(
        u_n: f64,
        f_n: f64,
        m_n: f64,
        overvoltage_limit: f64,
    ) -> Result<Self> {
        require_positive(u_n, "u_n")?;
        require_positive(f_n, "f_n")?;
        require_positive(m_n, "m_n")?;
        if !(overvoltage_limit.is_finite() && overvoltage_limit >= 1.0) {
            return Err(invalid(
                "overvoltage_limit",
                format!("must be at least 1, got {overvoltage_limit}"),
            ));
        }
        Ok(RatedPoint {
            u_n,
            f_n,
            m_n,
            overvoltage_limit,
        })
    }
}

/// Voltage setpoint [V] for frequency `f` under the chosen law, clamped to
/// the rated point's overvoltage ceiling.
///
/// The torque-ratio law needs `torque_ratio = M/M_N`; the other laws ignore
/// it.
pub fn preset_voltage(
    rated: &RatedPoint,
    law: VoltageLaw,
    f: f64,
    torque_ratio: Option<f64>,
) -> Result<f64> {
    require_non_negative(f, "f")?;
    let r = f / rated.f_n;
    let u = match law {
        VoltageLaw::Linear => rated.u_n * r,
        VoltageLaw::Quadratic => rated.u_n * r * r,
        VoltageLaw::TorqueRatio => {
            let ratio = torque_ratio.ok_or_else(|| {
                invalid("torque_ratio", "the torque-ratio law requires a torque ratio")
            })?;
            require_non_negative(ratio, "torque_ratio")?;
            rated.u_n * r * ratio.sqrt()
        }
    };
    Ok(u.min(rated.u_n * rated.overvoltage_limit))
}

/// Rotor speed [rad/s] that holds the design tip-speed ratio at wind speed
/// `v`.
pub fn preset_speed(lambda0: f64, rotor_radius: f64, v: f64) -> Result<f64> {
    require_positive(lambda0, "lambda0")?;
    require_positive(rotor_radius, "rotor_radius")?;
    require_non_negative(v, "v")?;
    Ok(lambda0 * v / rotor_radius)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::turbine::fit_coefficients;
    use approx::assert_relative_eq;

    fn rated_400v_50hz() -> RatedPoint {
        RatedPoint::new(400.0, 50.0, 26.7).unwrap()
    }

    #[test]
    fn all_laws_recover_rated_voltage_at_rated_frequency() {
        let rated = rated_400v_50hz();
        for law in [VoltageLaw::Linear, VoltageLaw::Quadratic, VoltageLaw::TorqueRatio] {
            let u = preset_voltage(&rated, law, 50.0, Some(1.0)).unwrap();
            assert_eq!(u, 400.0, "law {law} missed the rated point");
        }
    }

    #[test]
    fn half_frequency_splits_the_laws() {
        let rated = rated_400v_50hz();
        let quadratic = preset_voltage(&rated, VoltageLaw::Quadratic, 25.0, None).unwrap();
        let linear = preset_voltage(&rated, VoltageLaw::Linear, 25.0, None).unwrap();
        assert!((quadratic - 100.0).abs() < 1e-12);
        assert!((linear - 200.0).abs() < 1e-12);
    }

    #[test]
    fn torque_ratio_law_reduces_to_quadratic_for_square_law_torque() {
        let rated = rated_400v_50hz();
        for f in [5.0, 12.5, 25.0, 37.5, 49.0] {
            let r = f / 50.0;
            let via_torque =
                preset_voltage(&rated, VoltageLaw::TorqueRatio, f, Some(r * r)).unwrap();
            let via_quadratic = preset_voltage(&rated, VoltageLaw::Quadratic, f, None).unwrap();
            assert!(
                (via_torque - via_quadratic).abs() <= 1e-12 * via_quadratic.abs().max(1.0),
                "laws diverged at f = {f}: {via_torque} vs {via_quadratic}"
            );
        }
    }

    #[test]
    fn below_rated_quadratic_stays_under_linear() {
        let rated = rated_400v_50hz();
        for f in [1.0, 10.0, 30.0, 49.9] {
            let q = preset_voltage(&rated, VoltageLaw::Quadratic, f, None).unwrap();
            let l = preset_voltage(&rated, VoltageLaw::Linear, f, None).unwrap();
            assert!(q < l && l <= 400.0);
        }
    }

    #[test]
    fn overvoltage_ceiling_clamps_every_law() {
        let rated = rated_400v_50hz();
        let clamped = preset_voltage(&rated, VoltageLaw::Linear, 100.0, None).unwrap();
        assert_eq!(clamped, 400.0 * 1.1);
        let clamped = preset_voltage(&rated, VoltageLaw::Quadratic, 80.0, None).unwrap();
        assert_eq!(clamped, 400.0 * 1.1);

        let loose = RatedPoint::with_overvoltage_limit(400.0, 50.0, 26.7, 2.0).unwrap();
        let u = preset_voltage(&loose, VoltageLaw::Linear, 100.0, None).unwrap();
        assert_eq!(u, 800.0);
    }

    #[test]
    fn torque_ratio_law_needs_its_ratio() {
        let rated = rated_400v_50hz();
        assert!(preset_voltage(&rated, VoltageLaw::TorqueRatio, 25.0, None).is_err());
        assert!(preset_voltage(&rated, VoltageLaw::TorqueRatio, 25.0, Some(-0.1)).is_err());
    }

    #[test]
    fn rated_point_rejects_bad_values() {
        assert!(RatedPoint::new(0.0, 50.0, 26.7).is_err());
        assert!(RatedPoint::new(400.0, -50.0, 26.7).is_err());
        assert!(RatedPoint::new(400.0, 50.0, 0.0).is_err());
        assert!(RatedPoint::with_overvoltage_limit(400.0, 50.0, 26.7, 0.9).is_err());
    }

    #[test]
    fn preset_speed_tracks_wind_linearly() {
        assert_eq!(preset_speed(7.0, 5.0, 10.0).unwrap(), 14.0);
        assert_eq!(preset_speed(7.0, 5.0, 0.0).unwrap(), 0.0);
        assert!(preset_speed(7.0, 0.0, 10.0).is_err());
        assert!(preset_speed(0.0, 5.0, 10.0).is_err());
        assert!(preset_speed(7.0, 5.0, -1.0).is_err());
    }

    #[test]
    fn preset_speed_lands_on_the_coefficient_peak() {
        let c = fit_coefficients(7.0, 2.0, 2.5, false).unwrap();
        for (radius, v) in [(5.0, 10.0), (0.7, 16.0), (2.0, 7.3)] {
            let omega = preset_speed(7.0, radius, v).unwrap();
            let lambda = omega * radius / v;
            let cp = c.cp(lambda).unwrap();
            assert_relative_eq!(cp, c.cp_max, epsilon = 1e-9);
        }
    }

    #[test]
    fn law_parses_from_kebab_case_names() {
        assert_eq!("torque-ratio".parse::<VoltageLaw>().unwrap(), VoltageLaw::TorqueRatio);
        assert_eq!("quadratic".parse::<VoltageLaw>().unwrap(), VoltageLaw::Quadratic);
        assert_eq!("linear".parse::<VoltageLaw>().unwrap(), VoltageLaw::Linear);
        assert!("cubic".parse::<VoltageLaw>().is_err());
    }
}
