//! Ready-made parameter sets and scenarios: a small benchmark machine and
//! turbine used throughout the test suite, plus the three stock study cases
//! shipped as TOML files in `scenarios/`.

use crate::drivetrain::{CoupledParams, Drivetrain, TorqueSignMode};
use crate::generator::{EquationVariant, GeneratorParams};
use crate::scenario::{
    Event, EventKind, GeneratorSection, GridSection, GustPoint, InitialCondition, OutputSettings,
    Scenario, SolverSettings, TurbineSection, WindProfile,
};
use crate::turbine::{fit_coefficients, AirModel, TurbineGeometry};

/// Stator phase-voltage peak for a 400 V line-to-line machine:
/// `400·√(2/3)`.
pub const BENCHMARK_U_RATED: f64 = 326.5986323710904;

/// Synchronous electrical speed at 50 Hz: `100π` rad/s.
pub const BENCHMARK_OMEGA_S: f64 = 314.1592653589793;

/// A small 50 Hz, 400 V, 4-pole cage machine in the few-kW class, used as
/// the reference generator for tests and the stock scenarios.
pub fn benchmark_generator() -> GeneratorParams {
    GeneratorParams::new(
        1.405,
        1.395,
        0.17804,
        0.17804,
        0.1722,
        2,
        BENCHMARK_OMEGA_S,
        BENCHMARK_U_RATED,
        50.0,
        26.7,
    )
    .expect("benchmark machine constants are valid")
}

/// The benchmark machine direct-coupled to a 0.7 m fast-running rotor whose
/// performance curve peaks at tip-speed ratio 7.
pub fn benchmark_coupled_params() -> CoupledParams {
    CoupledParams {
        geometry: TurbineGeometry::new(0.7).expect("valid radius"),
        air: AirModel::default(),
        coefficients: fit_coefficients(7.0, 2.0, 2.5, false).expect("valid fit"),
        generator: benchmark_generator(),
        drivetrain: Drivetrain {
            inertia: 0.15,
            gear_ratio: 1.0,
            torque_sign_mode: TorqueSignMode::Magnitude,
        },
        variant: EquationVariant::Standard,
    }
}

fn benchmark_turbine_section() -> TurbineSection {
    TurbineSection {
        lambda0: 7.0,
        alpha: 2.0,
        beta: 2.5,
        simplified: false,
        rotor_radius: 0.7,
        swept_area: None,
        air_density: 1.225,
    }
}

fn benchmark_generator_section() -> GeneratorSection {
    GeneratorSection::from_params(&benchmark_generator(), EquationVariant::Standard)
}

fn benchmark_drivetrain() -> Drivetrain {
    Drivetrain {
        inertia: 0.15,
        gear_ratio: 1.0,
        torque_sign_mode: TorqueSignMode::Magnitude,
    }
}

fn benchmark_grid() -> GridSection {
    GridSection {
        u_d: BENCHMARK_U_RATED,
        u_q: 0.0,
        connected: true,
    }
}

/// Grid fault study: the benchmark set runs at equilibrium in 16 m/s wind,
/// loses its grid at t = 0.05 s, and the trace follows the current decay
/// and rotor overspeed.
pub fn short_circuit_scenario() -> Scenario {
    Scenario {
        turbine: benchmark_turbine_section(),
        generator: benchmark_generator_section(),
        drivetrain: benchmark_drivetrain(),
        grid: benchmark_grid(),
        wind: WindProfile::Constant { speed: 16.0 },
        converter: None,
        events: vec![Event {
            t: 0.05,
            kind: EventKind::ShortCircuit,
        }],
        initial: InitialCondition::Equilibrium,
        solver: SolverSettings {
            dt: 1e-4,
            t_end: 0.4,
            method: Default::default(),
            decimation: 10,
        },
        output: OutputSettings::default(),
    }
}

/// Gust response study: wind ramps 16 → 19 → 14.5 m/s over two seconds
/// while the machine stays on the grid.
pub fn wind_gust_scenario() -> Scenario {
    Scenario {
        turbine: benchmark_turbine_section(),
        generator: benchmark_generator_section(),
        drivetrain: benchmark_drivetrain(),
        grid: benchmark_grid(),
        wind: WindProfile::Gust {
            segments: vec![
                GustPoint { t: 0.0, v: 16.0 },
                GustPoint { t: 0.5, v: 16.0 },
                GustPoint { t: 1.0, v: 19.0 },
                GustPoint { t: 1.5, v: 14.5 },
                GustPoint { t: 2.0, v: 16.0 },
            ],
        },
        converter: None,
        events: Vec::new(),
        initial: InitialCondition::Equilibrium,
        solver: SolverSettings {
            dt: 1e-4,
            t_end: 2.0,
            method: Default::default(),
            decimation: 50,
        },
        output: OutputSettings::default(),
    }
}

/// Load pick-up study: an auxiliary 5 N·m shaft load engages at t = 0.2 s
/// and the operating point walks to a new balance.
pub fn load_step_scenario() -> Scenario {
    Scenario {
        turbine: benchmark_turbine_section(),
        generator: benchmark_generator_section(),
        drivetrain: benchmark_drivetrain(),
        grid: benchmark_grid(),
        wind: WindProfile::Constant { speed: 16.0 },
        converter: None,
        events: vec![Event {
            t: 0.2,
            kind: EventKind::LoadStep { torque: 5.0 },
        }],
        initial: InitialCondition::Equilibrium,
        solver: SolverSettings {
            dt: 1e-4,
            t_end: 1.0,
            method: Default::default(),
            decimation: 20,
        },
        output: OutputSettings::default(),
    }
}
