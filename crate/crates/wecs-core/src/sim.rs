//! Fixed-step integration: the classical fourth-order Runge–Kutta kernel,
//! the scenario runner built on it, and the steady-state finder used for
//! equilibrium starts.

use crate::drivetrain::{coupled_derivative, CoupledInputs, CoupledState};
use crate::error::{Error, Result};
use crate::generator::{
    electrical_derivative, electromagnetic_torque, steady_state_currents, GeneratorState,
    GridVoltage,
};
use crate::scenario::{EventKind, InitialCondition, Scenario, OUTPUT_CHANNELS};
use crate::timeseries::TimeSeries;

/// Scratch buffers for [`rk4_step`], reused across steps to keep the inner
/// loop allocation-free.
pub struct Rk4Workspace {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    stage: Vec<f64>,
}

impl Rk4Workspace {
    pub fn new(dim: usize) -> Self {
        Rk4Workspace {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            stage: vec![0.0; dim],
        }
    }
}

/// Advance `y` from `t` to `t + dt` with one classical Runge–Kutta step.
///
/// `rhs(t, y, dy)` writes the derivative into `dy`; an error from it aborts
/// the step with `y` untouched beyond the stage evaluations (the caller's
/// `y` itself is only written after all four stages succeed).
pub fn rk4_step<F>(
    rhs: &mut F,
    t: f64,
    dt: f64,
    y: &mut [f64],
    ws: &mut Rk4Workspace,
) -> Result<()>
where
    F: FnMut(f64, &[f64], &mut [f64]) -> Result<()>,
{
    let n = y.len();
    assert_eq!(ws.k1.len(), n, "workspace dimension mismatch");
    let half = 0.5 * dt;

    rhs(t, y, &mut ws.k1)?;
    for i in 0..n {
        ws.stage[i] = y[i] + half * ws.k1[i];
    }
    rhs(t + half, &ws.stage, &mut ws.k2)?;
    for i in 0..n {
        ws.stage[i] = y[i] + half * ws.k2[i];
    }
    rhs(t + half, &ws.stage, &mut ws.k3)?;
    for i in 0..n {
        ws.stage[i] = y[i] + dt * ws.k3[i];
    }
    rhs(t + dt, &ws.stage, &mut ws.k4)?;

    let sixth = dt / 6.0;
    for i in 0..n {
        y[i] += sixth * (ws.k1[i] + 2.0 * ws.k2[i] + 2.0 * ws.k3[i] + ws.k4[i]);
    }
    Ok(())
}

/// Names of the five integrated states, for divergence reports.
const STATE_NAMES: [&str; 5] = ["Id", "Iq", "Idr", "Iqr", "s"];

/// Any state magnitude beyond this is reported as divergence rather than
/// waiting for overflow to NaN.
const DIVERGENCE_BOUND: f64 = 1e12;

/// Inputs that timed events rewrite as the run progresses.
#[derive(Debug, Clone, Copy)]
struct LiveInputs {
    connected: bool,
    wind_override: Option<f64>,
    load_torque: f64,
}

impl LiveInputs {
    fn apply(&mut self, kind: EventKind) {
        match kind {
            EventKind::ShortCircuit => self.connected = false,
            EventKind::RestoreGrid | EventKind::Connect => self.connected = true,
            EventKind::WindStep { v } => self.wind_override = Some(v),
            EventKind::LoadStep { torque } => self.load_torque = torque,
        }
    }

    fn wind(&self, scenario: &Scenario, t: f64) -> f64 {
        self.wind_override
            .unwrap_or_else(|| scenario.wind.speed_at(t))
    }

    fn grid(&self, scenario: &Scenario) -> GridVoltage {
        if self.connected {
            scenario.grid.voltage()
        } else {
            GridVoltage::zero()
        }
    }
}

/// Errors raised mid-run mean the trajectory left the model's domain;
/// report them as divergence at the offending time unless they already
/// carry numerical context.
fn runtime_error(e: Error, t: f64) -> Error {
    if e.is_numerical() {
        e
    } else {
        Error::Diverged {
            t,
            detail: e.to_string(),
        }
    }
}

/// Run a validated scenario to its horizon and return the decimated,
/// channel-selected trace.
///
/// Events take effect at the start of their step, before that step's sample
/// is logged: inputs are right-continuous and the state is continuous
/// through every event.
pub fn integrate(scenario: &Scenario) -> Result<TimeSeries> {
    scenario.validate()?;
    let params = scenario.coupled_params()?;
    let dt = scenario.solver.dt;
    let n_steps = (scenario.solver.t_end / dt).round() as u64;
    let decimation = u64::from(scenario.solver.decimation);

    let mut live = LiveInputs {
        connected: scenario.grid.connected,
        wind_override: None,
        load_torque: 0.0,
    };

    // Event times sit on the output grid (validated), which is a multiple
    // of dt, so rounding to a step index is exact.
    let event_steps: Vec<u64> = scenario
        .events
        .iter()
        .map(|e| (e.t / dt).round() as u64)
        .collect();
    let mut next_event = 0usize;

    let initial = match scenario.initial {
        InitialCondition::Equilibrium => find_equilibrium(scenario)?,
        InitialCondition::Zero { slip } => CoupledState::from_generator(
            GeneratorState::new(0.0, 0.0, 0.0, 0.0, slip),
            &params,
        ),
    };
    let mut y = initial.generator.to_array();
    let mut ws = Rk4Workspace::new(5);

    let selection: Vec<usize> = scenario
        .output
        .channels
        .iter()
        .map(|name| {
            OUTPUT_CHANNELS
                .iter()
                .position(|c| c == name)
                .expect("validated channel name")
        })
        .collect();
    let mut series = TimeSeries::new(scenario.output.channels.iter().map(String::as_str));
    let mut row = vec![0.0f64; selection.len()];

    for k in 0..=n_steps {
        let t = k as f64 * dt;
        while next_event < scenario.events.len() && event_steps[next_event] == k {
            live.apply(scenario.events[next_event].kind);
            next_event += 1;
        }
        let grid_now = live.grid(scenario);

        if k % decimation == 0 {
            let gen = GeneratorState::from_array(y);
            let state = CoupledState::from_generator(gen, &params);
            let v = live.wind(scenario, t);
            let m_ut = params
                .turbine_torque(v, state.omega_r)
                .map_err(|e| runtime_error(e, t))?;
            let m_eg = electromagnetic_torque(&params.generator, &gen);
            let canonical = [
                gen.i_d,
                gen.i_q,
                gen.i_dr,
                gen.i_qr,
                gen.slip,
                state.omega_r,
                m_ut,
                m_eg,
                v,
                grid_now.u_d,
            ];
            for (slot, &idx) in row.iter_mut().zip(&selection) {
                *slot = canonical[idx];
            }
            series.push(t, &row)?;
        }

        if k == n_steps {
            break;
        }

        let mut rhs = |stage_t: f64, state: &[f64], dy: &mut [f64]| -> Result<()> {
            let gen = GeneratorState::from_array([
                state[0], state[1], state[2], state[3], state[4],
            ]);
            let coupled = CoupledState::from_generator(gen, &params);
            let inputs = CoupledInputs {
                wind_speed: live.wind(scenario, stage_t),
                grid: grid_now,
                load_torque: live.load_torque,
            };
            let d = coupled_derivative(&params, &coupled, &inputs)?;
            dy[..4].copy_from_slice(&d.d_currents);
            dy[4] = d.d_slip;
            Ok(())
        };
        rk4_step(&mut rhs, t, dt, &mut y, &mut ws).map_err(|e| runtime_error(e, t))?;

        let t_next = (k + 1) as f64 * dt;
        for (value, name) in y.iter().zip(STATE_NAMES) {
            if !value.is_finite() {
                return Err(Error::NonFinite {
                    channel: name.to_string(),
                    t: t_next,
                });
            }
            if value.abs() > DIVERGENCE_BOUND {
                return Err(Error::Diverged {
                    t: t_next,
                    detail: format!("state {name} grew to {value}"),
                });
            }
        }
    }
    Ok(series)
}

/// Shaft torque residual at a held slip with settled currents: positive
/// means the shaft accelerates from there.
fn shaft_residual(
    scenario: &Scenario,
    params: &crate::drivetrain::CoupledParams,
    live: &LiveInputs,
    slip: f64,
) -> Result<f64> {
    let grid = live.grid(scenario);
    let currents = steady_state_currents(&params.generator, slip, &grid, params.variant)?;
    let gen = GeneratorState::new(currents[0], currents[1], currents[2], currents[3], slip);
    let omega_r = params.rotor_speed(slip);
    let m_ut = params.turbine_torque(live.wind(scenario, 0.0), omega_r)?;
    let m_eg = electromagnetic_torque(&params.generator, &gen);
    let gear = params.drivetrain.gear_ratio;
    let shaft = match params.drivetrain.torque_sign_mode {
        crate::drivetrain::TorqueSignMode::Magnitude => m_ut.abs() - gear * m_eg.abs(),
        crate::drivetrain::TorqueSignMode::Signed => m_ut + gear * m_eg,
    };
    Ok(shaft - live.load_torque)
}

/// Slip scan resolution and reach for bracketing the equilibrium.
const SLIP_SCAN_STEP: f64 = 1e-3;
const SLIP_SCAN_LIMIT: f64 = 0.5;

/// Find the coupled steady state for the scenario's t = 0 inputs: settled
/// currents and a slip at which the shaft torques balance.
///
/// Events scheduled at exactly t = 0 are honoured, matching [`integrate`],
/// which applies them before the first sample.
pub fn find_equilibrium(scenario: &Scenario) -> Result<CoupledState> {
    let params = scenario.coupled_params()?;
    let mut live = LiveInputs {
        connected: scenario.grid.connected,
        wind_override: None,
        load_torque: 0.0,
    };
    for event in scenario.events.iter().filter(|e| e.t == 0.0) {
        live.apply(event.kind);
    }
    if !live.connected {
        return Err(Error::NoEquilibrium(
            "grid is disconnected at t = 0; an unexcited machine has no operating point to settle at"
                .to_string(),
        ));
    }

    let residual = |slip: f64| shaft_residual(scenario, &params, &live, slip);

    // At synchronism the settled rotor currents vanish, so a becalmed,
    // unloaded machine balances there to rounding error.
    let r0 = residual(0.0)?;
    if r0.abs() <= 1e-9 * params.generator.m_rated.max(1.0) {
        let currents =
            steady_state_currents(&params.generator, 0.0, &live.grid(scenario), params.variant)?;
        let gen = GeneratorState::new(currents[0], currents[1], currents[2], currents[3], 0.0);
        return Ok(CoupledState::from_generator(gen, &params));
    }

    // Accelerating at synchronism pushes the rotor supersynchronous
    // (slip < 0); a decelerating start settles subsynchronous. March that
    // way until the residual changes sign, then bisect.
    let direction = if r0 > 0.0 { -1.0 } else { 1.0 };
    let steps = (SLIP_SCAN_LIMIT / SLIP_SCAN_STEP).round() as usize;
    let mut bracket = None;
    let mut s_prev = 0.0;
    let mut r_prev = r0;
    for k in 1..=steps {
        let s = direction * SLIP_SCAN_STEP * k as f64;
        let r = residual(s)?;
        if r == 0.0 {
            bracket = Some((s, s));
            break;
        }
        if r.signum() != r_prev.signum() {
            bracket = Some((s_prev, s));
            break;
        }
        s_prev = s;
        r_prev = r;
    }
    let (mut lo, mut hi) = bracket.ok_or_else(|| {
        Error::NoEquilibrium(format!(
            "no torque balance found for slip magnitudes up to {SLIP_SCAN_LIMIT}; \
             the wind and load cannot be held by this machine"
        ))
    })?;

    if lo != hi {
        let mut r_lo = residual(lo)?;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            let r_mid = residual(mid)?;
            if r_mid == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if r_mid.signum() == r_lo.signum() {
                lo = mid;
                r_lo = r_mid;
            } else {
                hi = mid;
            }
        }
    }
    let slip = 0.5 * (lo + hi);

    let grid = live.grid(scenario);
    let currents = steady_state_currents(&params.generator, slip, &grid, params.variant)?;
    let gen = GeneratorState::new(currents[0], currents[1], currents[2], currents[3], slip);
    let state = CoupledState::from_generator(gen, &params);

    // Guard the result: the torque balance must close and the electrical
    // state must actually be stationary.
    let balance = residual(slip)?;
    if balance.abs() > 1e-6 * params.generator.m_rated.max(1.0) {
        return Err(Error::NoEquilibrium(format!(
            "torque balance misses by {balance} N·m at slip {slip}"
        )));
    }
    let dx = electrical_derivative(&params.generator, &gen, &grid, params.variant);
    let i_scale = currents.iter().fold(1.0f64, |acc, c| acc.max(c.abs()));
    let dx_bound = 1e-8 * i_scale * params.generator.omega_s.max(1.0);
    if dx.iter().any(|d| d.abs() > dx_bound) {
        return Err(Error::NoEquilibrium(format!(
            "settled currents still drift at slip {slip}: d|I|/dt up to {:e}",
            dx.iter().fold(0.0f64, |acc, d| acc.max(d.abs()))
        )));
    }
    Ok(state)
}
