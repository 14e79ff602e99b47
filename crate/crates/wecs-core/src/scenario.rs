//! Scenario files: the TOML-backed description of one simulation case —
//! component parameters, wind and grid profiles, timed events, solver
//! settings, and output channel selection.

use serde::{Deserialize, Serialize};

use crate::converter::{DcLink, PwmConfig, RlLoad};
use crate::drivetrain::{CoupledParams, Drivetrain};
use crate::error::{Error, Result};
use crate::generator::{EquationVariant, GeneratorParams, GridVoltage};
use crate::turbine::{fit_coefficients, AirModel, TurbineGeometry};

/// Every channel a simulation can log, in canonical column order.
pub const OUTPUT_CHANNELS: [&str; 10] = [
    "Id", "Iq", "Idr", "Iqr", "s", "omega_r", "MuT", "MeG", "v", "Ud",
];

fn bad(key: impl Into<String>, reason: impl Into<String>) -> Error {
    Error::Scenario {
        key: key.into(),
        reason: reason.into(),
    }
}

fn finite(value: f64, key: &str) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(bad(key, format!("must be finite, got {value}")))
    }
}

/// `[turbine]` section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TurbineSection {
    pub lambda0: f64,
    #[serde(default = "TurbineSection::default_alpha")]
    pub alpha: f64,
    #[serde(default = "TurbineSection::default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub simplified: bool,
    pub rotor_radius: f64,
    /// Overrides the circular-disc area when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub swept_area: Option<f64>,
    #[serde(default = "TurbineSection::default_air_density")]
    pub air_density: f64,
}

impl TurbineSection {
    fn default_alpha() -> f64 {
        2.25
    }
    fn default_beta() -> f64 {
        2.55
    }
    fn default_air_density() -> f64 {
        AirModel::default().rho
    }

    pub fn geometry(&self) -> Result<TurbineGeometry> {
        match self.swept_area {
            Some(area) => TurbineGeometry::with_swept_area(self.rotor_radius, area),
            None => TurbineGeometry::new(self.rotor_radius),
        }
    }

    pub fn air(&self) -> Result<AirModel> {
        AirModel::new(self.air_density)
    }
}

/// `[generator]` section: machine constants plus the equation variant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSection {
    pub r1: f64,
    pub r2: f64,
    pub l1: f64,
    pub l2: f64,
    pub m: f64,
    pub pole_pairs: u32,
    pub omega_s: f64,
    pub u_rated: f64,
    pub f_rated: f64,
    pub m_rated: f64,
    #[serde(default)]
    pub variant: EquationVariant,
}

impl GeneratorSection {
    pub fn params(&self) -> GeneratorParams {
        GeneratorParams {
            r1: self.r1,
            r2: self.r2,
            l1: self.l1,
            l2: self.l2,
            m: self.m,
            pole_pairs: self.pole_pairs,
            omega_s: self.omega_s,
            u_rated: self.u_rated,
            f_rated: self.f_rated,
            m_rated: self.m_rated,
        }
    }

    pub fn from_params(params: &GeneratorParams, variant: EquationVariant) -> Self {
        GeneratorSection {
            r1: params.r1,
            r2: params.r2,
            l1: params.l1,
            l2: params.l2,
            m: params.m,
            pole_pairs: params.pole_pairs,
            omega_s: params.omega_s,
            u_rated: params.u_rated,
            f_rated: params.f_rated,
            m_rated: params.m_rated,
            variant,
        }
    }
}

/// `[grid]` section: supply voltage in the dq frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub u_d: f64,
    #[serde(default)]
    pub u_q: f64,
    /// When false the run starts with a dead stator until a `connect` event.
    #[serde(default = "GridSection::default_connected")]
    pub connected: bool,
}

impl GridSection {
    fn default_connected() -> bool {
        true
    }

    /// The section's voltage, regardless of connection state.
    pub fn voltage(&self) -> GridVoltage {
        GridVoltage::new(self.u_d, self.u_q)
    }
}

/// `[wind]` section: how wind speed evolves over the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "profile", rename_all = "kebab-case")]
pub enum WindProfile {
    Constant {
        speed: f64,
    },
    Step {
        initial: f64,
        #[serde(rename = "final")]
        final_speed: f64,
        t_step: f64,
    },
    /// Piecewise-linear speed trace through `(t, v)` points, held constant
    /// before the first and after the last.
    Gust {
        segments: Vec<GustPoint>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GustPoint {
    pub t: f64,
    pub v: f64,
}

impl WindProfile {
    /// Wind speed at time `t`. Steps are right-continuous.
    pub fn speed_at(&self, t: f64) -> f64 {
        match self {
            WindProfile::Constant { speed } => *speed,
            WindProfile::Step {
                initial,
                final_speed,
                t_step,
            } => {
                if t < *t_step {
                    *initial
                } else {
                    *final_speed
                }
            }
            WindProfile::Gust { segments } => {
                let first = segments.first().expect("validated non-empty");
                let last = segments.last().expect("validated non-empty");
                if t <= first.t {
                    return first.v;
                }
                if t >= last.t {
                    return last.v;
                }
                let idx = segments.partition_point(|p| p.t <= t);
                let (lo, hi) = (&segments[idx - 1], &segments[idx]);
                let w = (t - lo.t) / (hi.t - lo.t);
                lo.v + w * (hi.v - lo.v)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_speed = |v: f64, key: &str| -> Result<()> {
            if v.is_finite() && v >= 0.0 {
                Ok(())
            } else {
                Err(bad(key, format!("wind speed must be non-negative and finite, got {v}")))
            }
        };
        match self {
            WindProfile::Constant { speed } => check_speed(*speed, "wind.speed"),
            WindProfile::Step {
                initial,
                final_speed,
                t_step,
            } => {
                check_speed(*initial, "wind.initial")?;
                check_speed(*final_speed, "wind.final")?;
                if !(t_step.is_finite() && *t_step >= 0.0) {
                    return Err(bad("wind.t_step", format!("must be non-negative, got {t_step}")));
                }
                Ok(())
            }
            WindProfile::Gust { segments } => {
                if segments.is_empty() {
                    return Err(bad("wind.segments", "needs at least one point"));
                }
                for (i, p) in segments.iter().enumerate() {
                    check_speed(p.v, &format!("wind.segments[{i}].v"))?;
                    if !(p.t.is_finite() && p.t >= 0.0) {
                        return Err(bad(
                            format!("wind.segments[{i}].t"),
                            format!("must be non-negative and finite, got {}", p.t),
                        ));
                    }
                    if i > 0 && p.t <= segments[i - 1].t {
                        return Err(bad(
                            format!("wind.segments[{i}].t"),
                            "segment times must be strictly increasing",
                        ));
                    }
                }
                Ok(())
            }
        }
    }
}

/// One timed input change. The state itself is never touched — events only
/// reshape what drives it from that instant on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub t: f64,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// Grid voltage forced to zero.
    ShortCircuit,
    /// Grid voltage returns to the `[grid]` section value.
    RestoreGrid,
    /// Wind locked to a new constant, overriding the profile from here on.
    WindStep { v: f64 },
    /// Auxiliary constant shaft load torque from here on (0 removes it).
    LoadStep { torque: f64 },
    /// Stator connected to the `[grid]` section voltage (used with
    /// `connected = false` starts).
    Connect,
}

/// `[initial]` section: where the state starts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// Settle the coupled system at the t = 0 inputs first.
    Equilibrium,
    /// Zero currents at a chosen slip.
    Zero {
        #[serde(default)]
        slip: f64,
    },
}

impl Default for InitialCondition {
    fn default() -> Self {
        InitialCondition::Equilibrium
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegrationMethod {
    #[default]
    Rk4,
}

/// `[solver]` section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSettings {
    #[serde(default = "SolverSettings::default_dt")]
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub method: IntegrationMethod,
    /// Integration steps per logged sample.
    #[serde(default = "SolverSettings::default_decimation")]
    pub decimation: u32,
}

impl SolverSettings {
    fn default_dt() -> f64 {
        1e-4
    }
    fn default_decimation() -> u32 {
        10
    }

    /// Spacing of logged samples.
    pub fn output_interval(&self) -> f64 {
        self.dt * f64::from(self.decimation)
    }
}

/// `[output]` section.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSettings {
    #[serde(default = "OutputSettings::default_channels")]
    pub channels: Vec<String>,
}

impl OutputSettings {
    fn default_channels() -> Vec<String> {
        OUTPUT_CHANNELS.iter().map(|s| s.to_string()).collect()
    }
}

impl Default for OutputSettings {
    fn default() -> Self {
        OutputSettings {
            channels: Self::default_channels(),
        }
    }
}

/// Optional `[converter]` section, for runs that pair the machine study
/// with the standalone inverter tools.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConverterSection {
    pub v_cc: f64,
    #[serde(default = "ConverterSection::default_f_carrier")]
    pub f_carrier: f64,
    #[serde(default = "ConverterSection::default_f_ref")]
    pub f_ref: f64,
    #[serde(default = "ConverterSection::default_m_a")]
    pub m_a: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_resistance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load_inductance: Option<f64>,
}

impl ConverterSection {
    fn default_f_carrier() -> f64 {
        PwmConfig::default().f_carrier
    }
    fn default_f_ref() -> f64 {
        PwmConfig::default().f_ref
    }
    fn default_m_a() -> f64 {
        PwmConfig::default().m_a
    }

    pub fn pwm(&self) -> Result<PwmConfig> {
        PwmConfig::new(self.f_carrier, self.f_ref, self.m_a)
    }

    pub fn dc_link(&self) -> Result<DcLink> {
        DcLink::new(self.v_cc)
    }

    pub fn load(&self) -> Result<Option<RlLoad>> {
        match (self.load_resistance, self.load_inductance) {
            (Some(r), Some(l)) => Ok(Some(RlLoad::new(r, l)?)),
            (None, None) => Ok(None),
            _ => Err(bad(
                "converter.load_resistance",
                "load_resistance and load_inductance must be given together",
            )),
        }
    }
}

/// A complete simulation case.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub turbine: TurbineSection,
    pub generator: GeneratorSection,
    pub drivetrain: Drivetrain,
    pub grid: GridSection,
    pub wind: WindProfile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converter: Option<ConverterSection>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub events: Vec<Event>,
    #[serde(default)]
    pub initial: InitialCondition,
    pub solver: SolverSettings,
    #[serde(default)]
    pub output: OutputSettings,
}

impl Scenario {
    /// Parse and fully validate a scenario from TOML text.
    pub fn from_toml_str(text: &str) -> Result<Scenario> {
        let scenario: Scenario = toml::from_str(text)
            .map_err(|e| bad("scenario", e.to_string().trim().replace('\n', " ")))?;
        scenario.validate()?;
        Ok(scenario)
    }

    /// Render back to TOML. A rendered scenario re-parses to an equal value.
    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| bad("scenario", e.to_string()))
    }

    /// Assemble the validated physical parameter set.
    pub fn coupled_params(&self) -> Result<CoupledParams> {
        Ok(CoupledParams {
            geometry: self.turbine.geometry()?,
            air: self.turbine.air()?,
            coefficients: fit_coefficients(
                self.turbine.lambda0,
                self.turbine.alpha,
                self.turbine.beta,
                self.turbine.simplified,
            )?,
            generator: self.generator.params(),
            drivetrain: self.drivetrain,
            variant: self.generator.variant,
        })
    }

    pub fn validate(&self) -> Result<()> {
        // Component sections validate through their constructors.
        self.coupled_params().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => {
                bad(format!("scenario key `{name}`"), reason)
            }
            other => other,
        })?;
        self.generator
            .params()
            .validate()
            .map_err(|e| match e {
                Error::InvalidParameter { name, reason } => bad(format!("generator.{name}"), reason),
                other => other,
            })?;
        self.drivetrain.validate().map_err(|e| match e {
            Error::InvalidParameter { name, reason } => bad(format!("drivetrain.{name}"), reason),
            other => other,
        })?;
        finite(self.grid.u_d, "grid.u_d")?;
        finite(self.grid.u_q, "grid.u_q")?;
        self.wind.validate()?;
        if let Some(conv) = &self.converter {
            conv.pwm().map_err(|e| match e {
                Error::InvalidParameter { name, reason } => bad(format!("converter.{name}"), reason),
                other => other,
            })?;
            conv.dc_link().map_err(|e| match e {
                Error::InvalidParameter { name, reason } => bad(format!("converter.{name}"), reason),
                other => other,
            })?;
            conv.load()?;
        }

        let solver = &self.solver;
        if !(solver.dt.is_finite() && solver.dt > 0.0) {
            return Err(bad("solver.dt", format!("must be positive, got {}", solver.dt)));
        }
        if !(solver.t_end.is_finite() && solver.t_end > 0.0) {
            return Err(bad(
                "solver.t_end",
                format!("must be positive, got {}", solver.t_end),
            ));
        }
        if solver.decimation < 1 {
            return Err(bad("solver.decimation", "must be at least 1"));
        }
        if solver.dt > 0.1 / self.generator.omega_s {
            log::warn!(
                "solver.dt = {} s is coarse for the {} rad/s electrical frame; \
                 expect phase error in the current waveforms",
                solver.dt,
                self.generator.omega_s
            );
        }
        let grid_step = solver.output_interval();
        let on_output_grid = |t: f64| {
            let cells = (t / grid_step).round();
            (t - cells * grid_step).abs() <= 1e-9 * t.abs().max(grid_step)
        };
        if !on_output_grid(solver.t_end) || solver.t_end < grid_step {
            return Err(bad(
                "solver.t_end",
                format!(
                    "must be a whole number of output intervals (dt × decimation = {grid_step} s), \
                     got {} s",
                    solver.t_end
                ),
            ));
        }

        match self.initial {
            InitialCondition::Equilibrium => {
                if !self.grid.connected {
                    return Err(bad(
                        "initial.state",
                        "equilibrium start requires grid.connected = true; \
                         use state = \"zero\" with a connect event instead",
                    ));
                }
            }
            InitialCondition::Zero { slip } => {
                if !(slip.is_finite() && slip <= 1.0) {
                    return Err(bad(
                        "initial.slip",
                        format!("must be finite and at most 1 (non-reversing rotor), got {slip}"),
                    ));
                }
            }
        }

        let mut previous: Option<f64> = None;
        for (i, event) in self.events.iter().enumerate() {
            let key = format!("events[{i}].t");
            finite(event.t, &key)?;
            if event.t < 0.0 || event.t > solver.t_end {
                return Err(bad(
                    &key,
                    format!("must lie within [0, t_end = {}], got {}", solver.t_end, event.t),
                ));
            }
            if let Some(prev) = previous {
                if event.t <= prev {
                    return Err(bad(&key, "event times must be strictly increasing"));
                }
            }
            if !on_output_grid(event.t) {
                return Err(bad(
                    &key,
                    format!(
                        "must fall on the output grid (multiples of dt × decimation = {grid_step} s) \
                         so the logged samples bracket the discontinuity exactly, got {}",
                        event.t
                    ),
                ));
            }
            previous = Some(event.t);
        }

        // A stepped wind profile is a discontinuity too; hold it to the same
        // grid rule when it falls inside the horizon.
        if let WindProfile::Step { t_step, .. } = self.wind {
            if t_step <= solver.t_end && !on_output_grid(t_step) {
                return Err(bad(
                    "wind.t_step",
                    format!(
                        "must fall on the output grid (multiples of dt × decimation = {grid_step} s), \
                         got {t_step}"
                    ),
                ));
            }
        }

        let out = &self.output.channels;
        if out.is_empty() {
            return Err(bad("output.channels", "must name at least one channel"));
        }
        for name in out {
            if !OUTPUT_CHANNELS.contains(&name.as_str()) {
                return Err(bad(
                    "output.channels",
                    format!(
                        "unknown channel `{name}`; available: {}",
                        OUTPUT_CHANNELS.join(", ")
                    ),
                ));
            }
        }
        for (i, name) in out.iter().enumerate() {
            if out[..i].contains(name) {
                return Err(bad("output.channels", format!("channel `{name}` listed twice")));
            }
        }
        Ok(())
    }
}
