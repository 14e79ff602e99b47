//! Squirrel-cage induction generator transient model in the synchronously
//! rotating dq frame: four electrical current states plus slip.
//!
//! Two coefficient sets are available. `Standard` is the canonical dq
//! machine model (stator cross-coupling at the frame speed, rotor
//! cross-coupling at the slip speed, everything over the leakage
//! determinant). `PaperLiteral` transcribes the original publication's
//! printed equations verbatim — including their standalone slip
//! multipliers, an asymmetric mutual term, and a missing q-axis voltage
//! channel — for side-by-side comparison runs.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, require_positive, Error, Result};

/// Electrical parameter set of the machine, rotor quantities referred to
/// the stator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    /// Stator winding resistance [Ω].
    pub r1: f64,
    /// Rotor winding resistance [Ω].
    pub r2: f64,
    /// Stator winding inductance [H].
    pub l1: f64,
    /// Rotor winding inductance [H].
    pub l2: f64,
    /// Stator–rotor mutual inductance [H].
    pub m: f64,
    /// Pole pairs.
    pub pole_pairs: u32,
    /// Reference-frame electrical angular speed [rad/s].
    pub omega_s: f64,
    /// Rated phase voltage amplitude [V].
    pub u_rated: f64,
    /// Rated frequency [Hz].
    pub f_rated: f64,
    /// Rated torque [N·m].
    pub m_rated: f64,
}

impl GeneratorParams {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        r1: f64,
        r2: f64,
        l1: f64,
        l2: f64,
        m: f64,
        pole_pairs: u32,
        omega_s: f64,
        u_rated: f64,
        f_rated: f64,
        m_rated: f64,
    ) -> Result<Self> {
        let params = GeneratorParams {
            r1,
            r2,
            l1,
            l2,
            m,
            pole_pairs,
            omega_s,
            u_rated,
            f_rated,
            m_rated,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        require_positive(self.r1, "r1")?;
        require_positive(self.r2, "r2")?;
        require_positive(self.l1, "l1")?;
        require_positive(self.l2, "l2")?;
        require_positive(self.m, "m")?;
        require_positive(self.omega_s, "omega_s")?;
        require_positive(self.u_rated, "u_rated")?;
        require_positive(self.f_rated, "f_rated")?;
        require_positive(self.m_rated, "m_rated")?;
        if self.pole_pairs < 1 {
            return Err(invalid("pole_pairs", "must be at least 1"));
        }
        let det = self.leakage_determinant();
        if det <= 0.0 {
            return Err(invalid(
                "m",
                format!(
                    "leakage determinant l1·l2 − m² must be positive, got {det} \
                     (l1·l2 = {}, m² = {})",
                    self.l1 * self.l2,
                    self.m * self.m
                ),
            ));
        }
        let sigma = 1.0 - self.m * self.m / (self.l1 * self.l2);
        if !(sigma > 0.0 && sigma < 0.3) {
            return Err(invalid(
                "m",
                format!("leakage coefficient σ = {sigma:.4} outside the plausible window (0, 0.3)"),
            ));
        }
        Ok(())
    }

    /// `l1·l2 − m²`, the denominator of every transient coefficient.
    pub fn leakage_determinant(&self) -> f64 {
        self.l1 * self.l2 - self.m * self.m
    }

    /// Torque constant of the standard dq model, 3/2 of the pole-pair count.
    pub fn torque_constant(&self) -> f64 {
        1.5 * f64::from(self.pole_pairs)
    }
}

/// Electrical state: stator/rotor dq currents and slip.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct GeneratorState {
    pub i_d: f64,
    pub i_q: f64,
    pub i_dr: f64,
    pub i_qr: f64,
    /// Slip relative to the reference frame; negative above synchronism
    /// (generator regime).
    pub slip: f64,
}

impl GeneratorState {
    pub fn new(i_d: f64, i_q: f64, i_dr: f64, i_qr: f64, slip: f64) -> Self {
        GeneratorState {
            i_d,
            i_q,
            i_dr,
            i_qr,
            slip,
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.i_d, self.i_q, self.i_dr, self.i_qr, self.slip]
    }

    pub fn from_array(x: [f64; 5]) -> Self {
        GeneratorState::new(x[0], x[1], x[2], x[3], x[4])
    }
}

/// dq supply voltage at the stator terminals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridVoltage {
    pub u_d: f64,
    pub u_q: f64,
}

impl GridVoltage {
    pub fn new(u_d: f64, u_q: f64) -> Self {
        GridVoltage { u_d, u_q }
    }

    /// Dead grid (short circuit / disconnected).
    pub fn zero() -> Self {
        GridVoltage::new(0.0, 0.0)
    }
}

/// Which transient coefficient set to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationVariant {
    /// Canonical dq machine equations (default).
    #[default]
    Standard,
    /// The original publication's printed coefficients, transcribed exactly.
    PaperLiteral,
}

/// State matrix A and input matrix B of the electrical subsystem at a given
/// slip, so that d/dt [I_d, I_q, I_dr, I_qr] = A·I + B·[U_d, U_q].
pub(crate) fn system_matrices(
    params: &GeneratorParams,
    slip: f64,
    variant: EquationVariant,
) -> ([[f64; 4]; 4], [[f64; 2]; 4]) {
    let GeneratorParams {
        r1, r2, l1, l2, m, ..
    } = *params;
    let d = params.leakage_determinant();
    let w = params.omega_s;
    // Rotor electrical speed; the slip speed w − wm drives the rotor rows.
    let wm = (1.0 - slip) * w;

    match variant {
        EquationVariant::Standard => {
            let wsl = slip * w;
            let a = [
                [
                    -l2 * r1 / d,
                    (w * l1 * l2 - m * m * wsl) / d,
                    r2 * m / d,
                    m * l2 * wm / d,
                ],
                [
                    -(w * l1 * l2 - m * m * wsl) / d,
                    -l2 * r1 / d,
                    -m * l2 * wm / d,
                    r2 * m / d,
                ],
                [
                    m * r1 / d,
                    -m * l1 * wm / d,
                    -r2 * l1 / d,
                    (wsl * l1 * l2 - w * m * m) / d,
                ],
                [
                    m * l1 * wm / d,
                    m * r1 / d,
                    -(wsl * l1 * l2 - w * m * m) / d,
                    -r2 * l1 / d,
                ],
            ];
            let b = [
                [l2 / d, 0.0],
                [0.0, l2 / d],
                [-m / d, 0.0],
                [0.0, -m / d],
            ];
            (a, b)
        }
        EquationVariant::PaperLiteral => {
            // Verbatim transcription. Oddities preserved on purpose: every
            // slip-speed term carries an extra standalone slip factor, the
            // first row's mutual term is scaled by 1/l1, and the q-axis
            // voltage never appears.
            let sw = (w - wm) * slip;
            let a = [
                [
                    -l2 * r1 / d,
                    w * l1 * l2 / d - m * m * sw / d,
                    r2 * m / d,
                    m * w * l2 / (l1 * d) - m * l2 * sw / d,
                ],
                [
                    -w * l1 * l2 / d + m * m * sw / d,
                    -r1 * l2 / d,
                    -m * l2 * w / d + m * l2 * sw / d,
                    r2 * m / d,
                ],
                [
                    m * r1 / d,
                    -l1 * m * w / d + m * l1 * sw / d,
                    -r2 * l1 / d,
                    -m * m * w / d + l1 * l2 * sw / d,
                ],
                [
                    l1 * m * w / d - m * l1 * sw / d,
                    m * r1 / d,
                    m * m * w / d - l1 * l2 * sw / d,
                    -l1 * r2 / d,
                ],
            ];
            let b = [[l2 / d, 0.0], [0.0, 0.0], [-m / d, 0.0], [0.0, 0.0]];
            (a, b)
        }
    }
}

/// Time derivative of the four current states at the state's slip.
pub fn electrical_derivative(
    params: &GeneratorParams,
    state: &GeneratorState,
    grid: &GridVoltage,
    variant: EquationVariant,
) -> [f64; 4] {
    let (a, b) = system_matrices(params, state.slip, variant);
    let x = [state.i_d, state.i_q, state.i_dr, state.i_qr];
    let u = [grid.u_d, grid.u_q];
    let mut dx = [0.0; 4];
    for row in 0..4 {
        dx[row] = a[row][0] * x[0]
            + a[row][1] * x[1]
            + a[row][2] * x[2]
            + a[row][3] * x[3]
            + b[row][0] * u[0]
            + b[row][1] * u[1];
    }
    dx
}

/// Electromagnetic torque `k_T·M·(I_q·I_dr − I_d·I_qr)` with the standard
/// constant `k_T = (3/2)·p`.
///
/// Sign follows the motoring convention of the dq equations: negative in
/// the generator regime (slip < 0), where the machine brakes the shaft.
pub fn electromagnetic_torque(params: &GeneratorParams, state: &GeneratorState) -> f64 {
    electromagnetic_torque_scaled(params, state, params.torque_constant())
}

/// Electromagnetic torque with an explicit constant, e.g. `k_t = 1.0` to
/// mirror the literal printed equations, which carry no constant.
pub fn electromagnetic_torque_scaled(
    params: &GeneratorParams,
    state: &GeneratorState,
    k_t: f64,
) -> f64 {
    k_t * params.m * (state.i_q * state.i_dr - state.i_d * state.i_qr)
}

/// Slip derivative under an external mechanical torque `m_mech`.
///
/// `Standard` derives it from the single-mass shaft equation with
/// `ω_M = (1 − s)·ω`: `ds/dt = −(p/(J·ω))·(m_mech − M_eG)`. `PaperLiteral`
/// is the printed form `ds/dt = (M·I_d·I_qr − M·I_q·I_dr + m_mech)/(2π)`,
/// which carries no inertia at all.
pub fn slip_derivative(
    params: &GeneratorParams,
    state: &GeneratorState,
    m_mech: f64,
    inertia: f64,
    variant: EquationVariant,
) -> Result<f64> {
    require_positive(inertia, "inertia")?;
    match variant {
        EquationVariant::Standard => {
            let m_eg = electromagnetic_torque(params, state);
            Ok(-(f64::from(params.pole_pairs) / (inertia * params.omega_s)) * (m_mech - m_eg))
        }
        EquationVariant::PaperLiteral => Ok(
            (params.m * (state.i_d * state.i_qr - state.i_q * state.i_dr) + m_mech)
                / std::f64::consts::TAU,
        ),
    }
}

/// Currents solving `A(slip)·I = −B·U`, i.e. the settled electrical state
/// at a held slip and voltage.
pub(crate) fn steady_state_currents(
    params: &GeneratorParams,
    slip: f64,
    grid: &GridVoltage,
    variant: EquationVariant,
) -> Result<[f64; 4]> {
    let (a, b) = system_matrices(params, slip, variant);
    let rhs = [
        -(b[0][0] * grid.u_d + b[0][1] * grid.u_q),
        -(b[1][0] * grid.u_d + b[1][1] * grid.u_q),
        -(b[2][0] * grid.u_d + b[2][1] * grid.u_q),
        -(b[3][0] * grid.u_d + b[3][1] * grid.u_q),
    ];
    solve4(a, rhs).ok_or_else(|| {
        Error::NoEquilibrium(format!("electrical system is singular at slip {slip}"))
    })
}

/// Dense 4×4 solve by Gaussian elimination with partial pivoting.
fn solve4(a: [[f64; 4]; 4], b: [f64; 4]) -> Option<[f64; 4]> {
    let mut aug = [[0.0f64; 5]; 4];
    for r in 0..4 {
        aug[r][..4].copy_from_slice(&a[r]);
        aug[r][4] = b[r];
    }
    for col in 0..4 {
        let pivot_row = (col..4)
            .max_by(|&i, &j| aug[i][col].abs().total_cmp(&aug[j][col].abs()))
            .unwrap();
        if aug[pivot_row][col].abs() < 1e-300 {
            return None;
        }
        aug.swap(col, pivot_row);
        for r in col + 1..4 {
            let factor = aug[r][col] / aug[col][col];
            for c in col..5 {
                aug[r][c] -= factor * aug[col][c];
            }
        }
    }
    let mut x = [0.0f64; 4];
    for row in (0..4).rev() {
        let mut acc = aug[row][4];
        for c in row + 1..4 {
            acc -= aug[row][c] * x[c];
        }
        x[row] = acc / aug[row][row];
    }
    if x.iter().all(|v| v.is_finite()) {
        Some(x)
    } else {
        None
    }
}
