//! Closed-form oracles shared by the acceptance suite.
//!
//! Both oracles reduce the balanced dq machine to complex form
//! (`x̄ = x_d + j·x_q`), where the four real equations collapse to two
//! complex ones:
//!
//! ```text
//! ū_s = (R1 + (λ + jω)·L1)·ī_s + (λ + jω)·M·ī_r
//!   0 = (λ + jω_sl)·M·ī_s + (R2 + (λ + jω_sl)·L2)·ī_r
//! ```
//!
//! Setting `λ = 0` gives the steady-state equivalent circuit (divide the
//! rotor row by slip to recover the classical `R2/s` branch); setting
//! `ū_s = 0` and solving `det = 0` for `λ` gives the decay modes of the
//! shorted machine. Neither path shares any code with the simulator's
//! matrix assembly, so agreement is meaningful.

use num_complex::Complex64;
use wecs_core::GeneratorParams;

/// Steady-state stator and rotor current phasors for a d-axis drive `u_d`
/// at the given slip, from the single-phase equivalent circuit.
///
/// Components map as `i_d = i_s.re`, `i_q = i_s.im`, `i_dr = i_r.re`,
/// `i_qr = i_r.im`.
pub fn phasor_currents(p: &GeneratorParams, slip: f64, u_d: f64) -> (Complex64, Complex64) {
    let j = Complex64::i();
    let w = p.omega_s;
    let z_m = j * w * p.m;
    let z_r = Complex64::new(p.r2 / slip, w * (p.l2 - p.m));
    let z_s = Complex64::new(p.r1, w * (p.l1 - p.m));
    let z = z_s + z_m * z_r / (z_m + z_r);
    let i_s = Complex64::new(u_d, 0.0) / z;
    // The dq rotor current is the negative of the circuit's divider branch
    // current.
    let i_r = -i_s * z_m / (z_m + z_r);
    (i_s, i_r)
}

/// Air-gap torque from the rotor branch power: `3·p·(R2/s)·|ī_r|² / (2·ω)`.
///
/// Negative for negative slip (generating), matching the motor sign
/// convention of the electromagnetic torque.
pub fn air_gap_torque(p: &GeneratorParams, slip: f64, i_r: Complex64) -> f64 {
    3.0 * f64::from(p.pole_pairs) * (p.r2 / slip) * i_r.norm_sqr() / (2.0 * p.omega_s)
}

/// Decay modes of the shorted (zero-voltage) electrical subsystem at fixed
/// slip.
///
/// The complex pencil's determinant is the quadratic `a·λ² + b·λ + c` with
///
/// ```text
/// a = L1·L2 − M²
/// b = L1·R2 + L2·R1 + j·(ω_sl·L1·L2 + ω·L1·L2 − M²·(ω + ω_sl))
/// c = (R1 + jω·L1)·(R2 + jω_sl·L2) + ω·ω_sl·M²
/// ```
///
/// Its two roots, together with their conjugates, are the four eigenvalues
/// of the real 4×4 system matrix.
pub fn shorted_machine_eigenvalues(p: &GeneratorParams, slip: f64) -> (Complex64, Complex64) {
    let j = Complex64::i();
    let w = p.omega_s;
    let w_sl = slip * w;
    let a = Complex64::new(p.l1 * p.l2 - p.m * p.m, 0.0);
    let b = Complex64::new(p.l1 * p.r2 + p.l2 * p.r1, 0.0)
        + j * (w_sl * p.l1 * p.l2 + w * p.l1 * p.l2 - p.m * p.m * (w + w_sl));
    let c = Complex64::new(p.r1, w * p.l1) * Complex64::new(p.r2, w_sl * p.l2)
        + w * w_sl * p.m * p.m;
    let disc = (b * b - 4.0 * a * c).sqrt();
    ((-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a))
}

/// Complex mode shape `(ī_s, ī_r)` for eigenvalue `lambda`, read off the
/// stator row of the shorted-machine pencil. The rotor row's residual is
/// zero exactly when `lambda` is a root, so callers should check it with
/// [`rotor_row_residual`].
pub fn shorted_machine_eigenvector(p: &GeneratorParams, lambda: Complex64) -> (Complex64, Complex64) {
    let s = lambda + Complex64::i() * p.omega_s;
    (s * p.m, -(s * p.l1 + p.r1))
}

/// Residual of the rotor row at (`lambda`, eigenvector); ≈ 0 for true roots.
pub fn rotor_row_residual(
    p: &GeneratorParams,
    slip: f64,
    lambda: Complex64,
    i_s: Complex64,
    i_r: Complex64,
) -> f64 {
    let s = lambda + Complex64::i() * (slip * p.omega_s);
    let term1 = s * p.m * i_s;
    let term2 = (s * p.l2 + p.r2) * i_r;
    (term1 + term2).norm() / (term1.norm() + term2.norm())
}
