//! Simulation core for a small grid-coupled wind energy conversion system:
//! turbine performance-curve fitting, a dq-frame induction generator
//! transient model, the rigid drivetrain coupling them, a PWM voltage-source
//! inverter with harmonic analysis, and a scenario-driven fixed-step runner.
//!
//! The crate is organised around plain functions over small parameter
//! structs. [`scenario::Scenario`] describes a complete study case in TOML;
//! [`sim::integrate`] runs it to a [`TimeSeries`] ready for CSV export.

pub mod converter;
pub mod drivetrain;
pub mod error;
pub mod generator;
pub mod presets;
pub mod scenario;
pub mod setpoint;
pub mod sim;
pub mod thd;
pub mod timeseries;
pub mod turbine;

pub use converter::{
    phase_voltages, pwm_switch_states, simulate_rl_load, DcLink, InverterForm, PwmConfig, RlLoad,
    SwitchState,
};
pub use drivetrain::{
    coupled_derivative, CoupledDerivative, CoupledInputs, CoupledParams, CoupledState, Drivetrain,
    TorqueSignMode,
};
pub use error::{Error, Result};
pub use generator::{
    electrical_derivative, electromagnetic_torque, electromagnetic_torque_scaled, slip_derivative,
    EquationVariant, GeneratorParams, GeneratorState, GridVoltage,
};
pub use presets::{
    benchmark_coupled_params, benchmark_generator, load_step_scenario, short_circuit_scenario,
    wind_gust_scenario, BENCHMARK_OMEGA_S, BENCHMARK_U_RATED,
};
pub use scenario::{
    Event, EventKind, InitialCondition, IntegrationMethod, Scenario, WindProfile, OUTPUT_CHANNELS,
};
pub use setpoint::{preset_speed, preset_voltage, RatedPoint, VoltageLaw};
pub use sim::{find_equilibrium, integrate, rk4_step, Rk4Workspace};
pub use thd::{harmonic_analysis, thd, ThdAnalysis};
pub use timeseries::TimeSeries;
pub use turbine::{fit_coefficients, AirModel, TurbineCoefficients, TurbineGeometry};
