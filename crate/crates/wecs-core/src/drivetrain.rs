//! Rigid single-mass coupling of the turbine rotor and the generator:
//! shaft dynamics plus assembly of the complete coupled state derivative.

use serde::{Deserialize, Serialize};

use crate::error::{require_positive, Result};
use crate::generator::{
    electrical_derivative, electromagnetic_torque, EquationVariant, GeneratorParams,
    GeneratorState, GridVoltage,
};
use crate::turbine::{self, AirModel, TurbineCoefficients, TurbineGeometry};

/// How the shaft balance treats the two torques.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorqueSignMode {
    /// `J·dω_r/dt = |M_uT| − gear·|M_eG|`: magnitudes, as the original
    /// shaft equation is printed. Default. Precludes motoring transients —
    /// the electromagnetic torque always brakes.
    #[default]
    Magnitude,
    /// `J·dω_r/dt = M_uT + gear·M_eG`: signed torques in the motor
    /// convention (M_eG is negative while generating), for reconnection
    /// and motoring studies.
    Signed,
}

/// Mechanical side of the coupled group. Doubles as the `[drivetrain]`
/// scenario section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Drivetrain {
    /// Total turbine+generator inertia, referred to the turbine shaft
    /// [kg·m²].
    pub inertia: f64,
    /// Generator speed per turbine speed; 1 = direct coupled.
    #[serde(default = "Drivetrain::default_gear_ratio")]
    pub gear_ratio: f64,
    #[serde(default)]
    pub torque_sign_mode: TorqueSignMode,
}

impl Drivetrain {
    fn default_gear_ratio() -> f64 {
        1.0
    }

    pub fn new(inertia: f64) -> Result<Self> {
        let dt = Drivetrain {
            inertia,
            gear_ratio: 1.0,
            torque_sign_mode: TorqueSignMode::default(),
        };
        dt.validate()?;
        Ok(dt)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive(self.inertia, "inertia")?;
        require_positive(self.gear_ratio, "gear_ratio")?;
        Ok(())
    }
}

/// Everything constant during a coupled simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledParams {
    pub geometry: TurbineGeometry,
    pub air: AirModel,
    pub coefficients: TurbineCoefficients,
    pub generator: GeneratorParams,
    pub drivetrain: Drivetrain,
    pub variant: EquationVariant,
}

impl CoupledParams {
    /// Turbine rotor speed implied by a slip value. Slip is the single
    /// source of truth; `ω_r = (1 − s)·ω_s/(p·gear)`.
    pub fn rotor_speed(&self, slip: f64) -> f64 {
        (1.0 - slip) * self.generator.omega_s
            / (f64::from(self.generator.pole_pairs) * self.drivetrain.gear_ratio)
    }

    /// Slip implied by a turbine rotor speed (inverse of [`rotor_speed`]).
    ///
    /// [`rotor_speed`]: CoupledParams::rotor_speed
    pub fn slip_for_rotor_speed(&self, omega_r: f64) -> f64 {
        1.0 - f64::from(self.generator.pole_pairs) * self.drivetrain.gear_ratio * omega_r
            / self.generator.omega_s
    }

    /// Turbine shaft torque at the given wind and rotor speed.
    pub fn turbine_torque(&self, wind_speed: f64, omega_r: f64) -> Result<f64> {
        turbine::torque(
            &self.geometry,
            &self.air,
            &self.coefficients,
            wind_speed,
            omega_r,
        )
    }
}

/// Full coupled state. `omega_r` is always derived from the generator slip
/// so the two can never disagree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledState {
    pub generator: GeneratorState,
    pub omega_r: f64,
}

impl CoupledState {
    pub fn from_generator(generator: GeneratorState, params: &CoupledParams) -> Self {
        CoupledState {
            generator,
            omega_r: params.rotor_speed(generator.slip),
        }
    }
}

/// Time-varying inputs to the coupled model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledInputs {
    pub wind_speed: f64,
    pub grid: GridVoltage,
    /// Auxiliary shaft load torque opposing rotation [N·m].
    pub load_torque: f64,
}

/// Derivative of the coupled state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoupledDerivative {
    pub d_currents: [f64; 4],
    pub d_slip: f64,
    pub d_omega_r: f64,
}

/// Assemble the complete coupled derivative: electrical equations at the
/// state's slip, shaft balance per the drivetrain's sign mode, and the slip
/// derivative kinematically locked to the shaft (`ds/dt =
/// −(p·gear/ω_s)·dω_r/dt`).
pub fn coupled_derivative(
    params: &CoupledParams,
    state: &CoupledState,
    inputs: &CoupledInputs,
) -> Result<CoupledDerivative> {
    let d_currents =
        electrical_derivative(&params.generator, &state.generator, &inputs.grid, params.variant);
    let m_ut = params.turbine_torque(inputs.wind_speed, state.omega_r)?;
    let m_eg = electromagnetic_torque(&params.generator, &state.generator);
    let gear = params.drivetrain.gear_ratio;
    let shaft_torque = match params.drivetrain.torque_sign_mode {
        TorqueSignMode::Magnitude => m_ut.abs() - gear * m_eg.abs(),
        TorqueSignMode::Signed => m_ut + gear * m_eg,
    };
    let d_omega_r = (shaft_torque - inputs.load_torque) / params.drivetrain.inertia;
    let d_slip =
        -(f64::from(params.generator.pole_pairs) * gear / params.generator.omega_s) * d_omega_r;
    Ok(CoupledDerivative {
        d_currents,
        d_slip,
        d_omega_r,
    })
}
