//! Three-switch voltage-source inverter, sine-triangle PWM, and a small
//! RL test load for waveform studies.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Result};
use crate::sim::{rk4_step, Rk4Workspace};
use crate::timeseries::TimeSeries;

/// One switch command per phase leg.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchState {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

impl SwitchState {
    pub fn new(a: bool, b: bool, c: bool) -> Self {
        SwitchState { a, b, c }
    }

    /// All eight switch combinations, in binary counting order.
    pub fn all() -> [SwitchState; 8] {
        let mut states = [SwitchState::new(false, false, false); 8];
        for (i, s) in states.iter_mut().enumerate() {
            *s = SwitchState::new(i & 4 != 0, i & 2 != 0, i & 1 != 0);
        }
        states
    }
}

/// DC-link supply feeding the inverter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DcLink {
    /// Link voltage [V].
    pub v_cc: f64,
}

impl DcLink {
    pub fn new(v_cc: f64) -> Result<Self> {
        if !(v_cc.is_finite() && v_cc >= 0.0) {
            return Err(invalid("v_cc", format!("must be non-negative and finite, got {v_cc}")));
        }
        Ok(DcLink { v_cc })
    }
}

/// Which phase-voltage expression set to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverterForm {
    /// Cyclically symmetric, zero-sum phase voltages (the physical form for
    /// an isolated-neutral load).
    Corrected,
    /// Verbatim transcription of the original publication's printed third
    /// line, whose all-on state yields `(0, 0, −V_cc)` instead of zeros.
    PaperLiteral,
}

/// Phase-to-neutral voltages `[u_a, u_b, u_c]` for one switch state.
///
/// Corrected form: `u_a = V_cc·(2S_a − S_b − S_c)/3` and cyclic rotations,
/// which sum to zero bit-exactly. The literal form replaces the third line
/// with `u_c = V_cc·(−S_a − S_b − S_c)/3`, so it differs from the corrected
/// value by `−V_cc·S_c` on phase c.
pub fn phase_voltages(dc: &DcLink, state: SwitchState, form: InverterForm) -> [f64; 3] {
    let (sa, sb, sc) = (state.a as i32, state.b as i32, state.c as i32);
    // Integer numerators first: the only rounding then happens in the final
    // division, and scaling a common V_cc/3 quotient keeps the three phases
    // summing to zero exactly.
    let ka = 2 * sa - sb - sc;
    let kb = -sa + 2 * sb - sc;
    let kc = match form {
        InverterForm::Corrected => -sa - sb + 2 * sc,
        InverterForm::PaperLiteral => -sa - sb - sc,
    };
    [
        dc.v_cc * f64::from(ka) / 3.0,
        dc.v_cc * f64::from(kb) / 3.0,
        dc.v_cc * f64::from(kc) / 3.0,
    ]
}

/// Sine-triangle modulator settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PwmConfig {
    /// Triangle carrier frequency [Hz].
    pub f_carrier: f64,
    /// Reference (output fundamental) frequency [Hz].
    pub f_ref: f64,
    /// Amplitude modulation index, in (0, 1].
    pub m_a: f64,
}

impl Default for PwmConfig {
    fn default() -> Self {
        PwmConfig {
            f_carrier: 3000.0,
            f_ref: 60.0,
            m_a: 0.9,
        }
    }
}

impl PwmConfig {
    pub fn new(f_carrier: f64, f_ref: f64, m_a: f64) -> Result<Self> {
        let cfg = PwmConfig { f_carrier, f_ref, m_a };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive(self.f_ref, "f_ref")?;
        require_positive(self.f_carrier, "f_carrier")?;
        if self.f_carrier <= 2.0 * self.f_ref {
            return Err(invalid(
                "f_carrier",
                format!(
                    "must exceed twice the reference frequency ({} Hz), got {} Hz",
                    self.f_ref, self.f_carrier
                ),
            ));
        }
        if !(self.m_a > 0.0 && self.m_a <= 1.0) {
            return Err(invalid(
                "m_a",
                format!("modulation index must lie in (0, 1], got {}", self.m_a),
            ));
        }
        Ok(())
    }
}

/// Unit triangle carrier: period 1 in `cycles`, range [−1, 1], starting at
/// the trough so an integer cycle count lands on −1.
fn triangle(cycles: f64) -> f64 {
    let u = cycles.rem_euclid(1.0);
    1.0 - 4.0 * (u - 0.5).abs()
}

/// Switch commands at time `t`: each phase compares its shifted sinusoidal
/// reference against the shared triangle carrier, closing the switch while
/// the reference is the larger.
pub fn pwm_switch_states(cfg: &PwmConfig, t: f64) -> SwitchState {
    use std::f64::consts::PI;
    let carrier = triangle(cfg.f_carrier * t);
    let phase_shifts = [0.0, -2.0 * PI / 3.0, -4.0 * PI / 3.0];
    let closed = |shift: f64| cfg.m_a * (2.0 * PI * cfg.f_ref * t + shift).sin() >= carrier;
    SwitchState::new(closed(phase_shifts[0]), closed(phase_shifts[1]), closed(phase_shifts[2]))
}

/// Series RL branch per phase, star-connected with isolated neutral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlLoad {
    /// Per-phase resistance [Ω].
    pub resistance: f64,
    /// Per-phase inductance [H].
    pub inductance: f64,
}

impl RlLoad {
    pub fn new(resistance: f64, inductance: f64) -> Result<Self> {
        require_positive(resistance, "resistance")?;
        require_positive(inductance, "inductance")?;
        Ok(RlLoad {
            resistance,
            inductance,
        })
    }
}

/// Drive the RL load from the PWM inverter and record voltages and currents.
///
/// Uses the corrected (zero-sum) voltage form, so the three phase equations
/// decouple and the isolated-neutral current constraint `Σi = 0` is
/// preserved automatically from zero initial current. `dt` must resolve the
/// carrier (at most one twentieth of its period) and `duration` must be a
/// whole number of steps. Channels: `u_a,u_b,u_c,i_a,i_b,i_c`.
pub fn simulate_rl_load(
    dc: &DcLink,
    cfg: &PwmConfig,
    load: &RlLoad,
    duration: f64,
    dt: f64,
) -> Result<TimeSeries> {
    cfg.validate()?;
    require_positive(duration, "duration")?;
    require_positive(dt, "dt")?;
    let dt_max = 1.0 / (20.0 * cfg.f_carrier);
    if dt > dt_max {
        return Err(invalid(
            "dt",
            format!("must be at most {dt_max} s to resolve the {} Hz carrier, got {dt} s", cfg.f_carrier),
        ));
    }
    let steps_exact = duration / dt;
    let steps = steps_exact.round();
    if (steps_exact - steps).abs() > 1e-9 * steps.max(1.0) || steps < 1.0 {
        return Err(invalid(
            "duration",
            format!("must be a whole number of {dt} s steps, got {duration} s"),
        ));
    }
    let steps = steps as usize;

    let voltages_at = |t: f64| phase_voltages(dc, pwm_switch_states(cfg, t), InverterForm::Corrected);
    let mut rhs = |t: f64, i: &[f64], di: &mut [f64]| -> Result<()> {
        let u = voltages_at(t);
        for phase in 0..3 {
            di[phase] = (u[phase] - load.resistance * i[phase]) / load.inductance;
        }
        Ok(())
    };

    let mut series = TimeSeries::new(["u_a", "u_b", "u_c", "i_a", "i_b", "i_c"]);
    let mut currents = [0.0f64; 3];
    let mut workspace = Rk4Workspace::new(3);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let u = voltages_at(t);
        series.push(t, &[u[0], u[1], u[2], currents[0], currents[1], currents[2]])?;
        if k < steps {
            rk4_step(&mut rhs, t, dt, &mut currents, &mut workspace)?;
        }
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thd::harmonic_analysis;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn single_leg_state_splits_the_link_voltage() {
        let dc = DcLink::new(600.0).unwrap();
        for form in [InverterForm::Corrected, InverterForm::PaperLiteral] {
            let u = phase_voltages(&dc, SwitchState::new(true, false, false), form);
            assert_eq!(u, [400.0, -200.0, -200.0]);
        }
    }

    #[test]
    fn all_on_state_separates_the_two_forms() {
        let dc = DcLink::new(600.0).unwrap();
        let all_on = SwitchState::new(true, true, true);
        assert_eq!(phase_voltages(&dc, all_on, InverterForm::Corrected), [0.0, 0.0, 0.0]);
        assert_eq!(
            phase_voltages(&dc, all_on, InverterForm::PaperLiteral),
            [0.0, 0.0, -600.0]
        );
    }

    #[test]
    fn all_off_state_is_dead_in_both_forms() {
        let dc = DcLink::new(600.0).unwrap();
        for form in [InverterForm::Corrected, InverterForm::PaperLiteral] {
            assert_eq!(phase_voltages(&dc, SwitchState::new(false, false, false), form), [0.0; 3]);
        }
    }

    #[test]
    fn corrected_form_sums_to_zero_bit_exactly() {
        let dc = DcLink::new(537.31).unwrap();
        for state in SwitchState::all() {
            let [ua, ub, uc] = phase_voltages(&dc, state, InverterForm::Corrected);
            assert_eq!(ua + ub + uc, 0.0, "state {state:?}");
        }
    }

    #[test]
    fn literal_form_shifts_phase_c_by_the_switch() {
        let dc = DcLink::new(412.7).unwrap();
        for state in SwitchState::all() {
            let corrected = phase_voltages(&dc, state, InverterForm::Corrected);
            let literal = phase_voltages(&dc, state, InverterForm::PaperLiteral);
            assert_eq!(literal[0], corrected[0]);
            assert_eq!(literal[1], corrected[1]);
            let shift = if state.c { dc.v_cc } else { 0.0 };
            assert_relative_eq!(literal[2], corrected[2] - shift, max_relative = 1e-15);
        }
    }

    proptest! {
        #[test]
        fn line_to_line_voltages_swing_the_full_link(v_cc in 1.0f64..2000.0) {
            let dc = DcLink::new(v_cc).unwrap();
            for state in SwitchState::all() {
                let [ua, ub, _] = phase_voltages(&dc, state, InverterForm::Corrected);
                let line = ua - ub;
                let matches_one = [-v_cc, 0.0, v_cc]
                    .iter()
                    .any(|&target| (line - target).abs() <= 4.0 * f64::EPSILON * v_cc);
                prop_assert!(matches_one, "u_ab = {line} for {state:?} at V_cc = {v_cc}");
            }
        }
    }

    #[test]
    fn comparator_closes_at_reference_peak_over_carrier_trough() {
        // Reference peak (sin = 1) at t = 0.25 with f_ref = 1; the carrier
        // sits at its trough there because f_carrier·t is a whole cycle.
        let cfg = PwmConfig::new(8.0, 1.0, 0.9).unwrap();
        let s = pwm_switch_states(&cfg, 0.25);
        assert!(s.a);
    }

    #[test]
    fn zero_reference_gives_half_duty() {
        // m_a → 0 makes every comparison reference-vs-triangle at level 0.
        let cfg = PwmConfig {
            f_carrier: 1000.0,
            f_ref: 50.0,
            m_a: 1e-12,
        };
        let duty = duty_over_one_carrier_period(&cfg, 0.0);
        assert_relative_eq!(duty, 0.5, epsilon = 1e-3);
    }

    #[test]
    fn duty_cycle_tracks_the_reference() {
        let cfg = PwmConfig::new(50_000.0, 50.0, 0.9).unwrap();
        for t0 in [0.0, 0.004, 0.009, 0.013] {
            let reference = 0.9 * (2.0 * PI * 50.0 * t0).sin();
            let expected = (1.0 + reference) / 2.0;
            let duty = duty_over_one_carrier_period(&cfg, t0);
            // The reference drifts by ~m_a·2π·f_ref/f_carrier across the
            // window, which bounds the achievable agreement.
            assert!(
                (duty - expected).abs() < 5e-3,
                "duty {duty} vs expected {expected} at t0 = {t0}"
            );
        }
    }

    fn duty_over_one_carrier_period(cfg: &PwmConfig, t0: f64) -> f64 {
        let period = 1.0 / cfg.f_carrier;
        let n = 20_000;
        let closed = (0..n)
            .filter(|&k| pwm_switch_states(cfg, t0 + period * k as f64 / n as f64).a)
            .count();
        closed as f64 / n as f64
    }

    #[test]
    fn pwm_config_validation() {
        assert!(PwmConfig::new(3000.0, 60.0, 0.9).is_ok());
        assert!(PwmConfig::new(100.0, 60.0, 0.9).is_err()); // carrier too slow
        assert!(PwmConfig::new(3000.0, 60.0, 0.0).is_err());
        assert!(PwmConfig::new(3000.0, 60.0, 1.2).is_err());
        assert!(PwmConfig::new(3000.0, -60.0, 0.9).is_err());
    }

    #[test]
    fn dead_link_drives_no_current() {
        let cfg = PwmConfig::default();
        let dc = DcLink::new(0.0).unwrap();
        let load = RlLoad::new(10.0, 0.02).unwrap();
        let series = simulate_rl_load(&dc, &cfg, &load, 0.01, 1e-5).unwrap();
        for name in ["i_a", "i_b", "i_c"] {
            assert!(series.channel(name).unwrap().iter().all(|&i| i == 0.0));
        }
    }

    #[test]
    fn phase_currents_sum_to_zero_under_load() {
        let cfg = PwmConfig::default();
        let dc = DcLink::new(600.0).unwrap();
        let load = RlLoad::new(20.0, 0.025).unwrap();
        let series = simulate_rl_load(&dc, &cfg, &load, 0.05, 1.0 / 72_000.0).unwrap();
        let ia = series.channel("i_a").unwrap();
        let ib = series.channel("i_b").unwrap();
        let ic = series.channel("i_c").unwrap();
        let peak = ia.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        for k in 0..ia.len() {
            assert!(
                (ia[k] + ib[k] + ic[k]).abs() < 1e-9 * peak.max(1.0),
                "neutral current appeared at sample {k}"
            );
        }
    }

    #[test]
    fn steady_fundamental_matches_the_averaged_model() {
        // Predicted fundamental: (m_a·V_cc/2) / |R + jωL|.
        let cfg = PwmConfig::default();
        let dc = DcLink::new(600.0).unwrap();
        let load = RlLoad::new(20.0, 0.025).unwrap();
        let dt = 1.0 / 72_000.0;
        let series = simulate_rl_load(&dc, &cfg, &load, 7.0 / 60.0, dt).unwrap();
        let ia = series.channel("i_a").unwrap();
        // Skip two fundamental periods of transient (τ = L/R = 1.25 ms).
        let per = 1200;
        let window = &ia[2 * per..7 * per];
        let analysis = harmonic_analysis(window, dt, 60.0, 50).unwrap();
        let omega = 2.0 * PI * 60.0;
        let z = (load.resistance.powi(2) + (omega * load.inductance).powi(2)).sqrt();
        let predicted = cfg.m_a * dc.v_cc / 2.0 / z;
        assert_relative_eq!(analysis.fundamental_amplitude, predicted, max_relative = 0.03);
    }

    #[test]
    fn heavier_loads_draw_cleaner_current() {
        // Dropping R raises the fundamental while the switching ripple stays
        // put, so distortion falls monotonically.
        let cfg = PwmConfig::default();
        let dc = DcLink::new(600.0).unwrap();
        let dt = 1.0 / 72_000.0;
        let mut last_thd = f64::INFINITY;
        let mut last_amplitude = 0.0;
        for r in [40.0, 20.0, 10.0] {
            let load = RlLoad::new(r, 0.025).unwrap();
            let series = simulate_rl_load(&dc, &cfg, &load, 8.0 / 60.0, dt).unwrap();
            let ia = series.channel("i_a").unwrap();
            let per = 1200;
            let analysis = harmonic_analysis(&ia[3 * per..8 * per], dt, 60.0, 50).unwrap();
            assert!(
                analysis.fundamental_amplitude > last_amplitude,
                "fundamental should grow as R drops"
            );
            assert!(
                analysis.thd_percent < last_thd,
                "distortion should fall as R drops: {} !< {last_thd}",
                analysis.thd_percent
            );
            last_thd = analysis.thd_percent;
            last_amplitude = analysis.fundamental_amplitude;
        }
    }

    #[test]
    fn rl_simulation_validates_window_and_step() {
        let cfg = PwmConfig::default();
        let dc = DcLink::new(600.0).unwrap();
        let load = RlLoad::new(20.0, 0.025).unwrap();
        // Step too coarse for the carrier.
        assert!(simulate_rl_load(&dc, &cfg, &load, 0.1, 1e-3).is_err());
        // Duration not a whole number of steps.
        assert!(simulate_rl_load(&dc, &cfg, &load, 1.00037e-2, 1e-5).is_err());
        assert!(RlLoad::new(0.0, 0.025).is_err());
        assert!(RlLoad::new(20.0, 0.0).is_err());
        assert!(DcLink::new(-5.0).is_err());
    }
}
