//! Two-mode Gaussian states and the symplectic maps that prepare the
//! interferometer state: displacement, single-mode squeezing, the
//! nonlinear beam splitter (two-mode squeezer) and phase shifts.
//!
//! Conventions: ħ = 1, quadratures `x = (a + a†)/√2`, `p = (a - a†)/(i√2)`,
//! so the vacuum covariance is `I/2` and a coherent amplitude `α` has mean
//! `√2 (Re α, Im α)`. Vectors are ordered `(x_a, p_a, x_b, p_b)`.

use std::f64::consts::{SQRT_2, TAU};
use std::fmt;

use nalgebra::{Matrix2, Matrix4, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_range, Error, Result};

/// Largest accepted squeezing strength. `cosh(4g)` must stay well inside
/// the double range.
pub const MAX_SQUEEZING: f64 = 20.0;

const SYMMETRY_TOL: f64 = 1e-12;
const UNCERTAINTY_TOL: f64 = 1e-9;

/// One of the two interferometer arms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    B,
}

impl Mode {
    fn offset(self) -> usize {
        match self {
            Mode::A => 0,
            Mode::B => 2,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::A => f.write_str("a"),
            Mode::B => f.write_str("b"),
        }
    }
}

fn wrap_phase(phase: f64) -> f64 {
    let wrapped = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if wrapped >= TAU {
        0.0
    } else {
        wrapped
    }
}

/// Polar form `|z| e^{iθ}` of a coherent amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexAmplitude {
    modulus: f64,
    phase: f64,
}

impl ComplexAmplitude {
    pub fn new(modulus: f64, phase: f64) -> Result<Self> {
        check_range(
            "modulus",
            modulus,
            0.0,
            f64::MAX.sqrt(),
            "must be finite and >= 0",
        )?;
        check_finite("phase", phase)?;
        Ok(Self {
            modulus,
            phase: wrap_phase(phase),
        })
    }

    /// Amplitude carrying `mean_photons = |z|²` on average.
    pub fn from_mean_photons(mean_photons: f64, phase: f64) -> Result<Self> {
        check_range(
            "mean photon number",
            mean_photons,
            0.0,
            f64::MAX,
            "must be finite and >= 0",
        )?;
        Self::new(mean_photons.sqrt(), phase)
    }

    pub fn zero() -> Self {
        Self {
            modulus: 0.0,
            phase: 0.0,
        }
    }

    pub fn modulus(&self) -> f64 {
        self.modulus
    }

    /// Phase in `[0, 2π)`.
    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn mean_photons(&self) -> f64 {
        self.modulus * self.modulus
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.phase)
    }
}

/// Nonlinear beam splitter parameters, `ξ = g e^{iθ_g}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NbsParams {
    gain: f64,
    pump_phase: f64,
}

impl NbsParams {
    pub fn new(gain: f64, pump_phase: f64) -> Result<Self> {
        check_range("gain", gain, 0.0, MAX_SQUEEZING, "must lie in [0, 20]")?;
        check_finite("pump phase", pump_phase)?;
        Ok(Self { gain, pump_phase })
    }

    pub fn gain(&self) -> f64 {
        self.gain
    }

    pub fn pump_phase(&self) -> f64 {
        self.pump_phase
    }

    pub fn xi(&self) -> Complex64 {
        Complex64::from_polar(self.gain, self.pump_phase)
    }
}

/// Single-mode squeezing `ς = r e^{iθ_ς}` of `S(ς) = exp[(ς* b² - ς b†²)/2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeParams {
    r: f64,
    theta: f64,
}

impl SqueezeParams {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        check_range("r", r, 0.0, MAX_SQUEEZING, "must lie in [0, 20]")?;
        check_finite("squeezing phase", theta)?;
        Ok(Self { r, theta })
    }

    /// Squeezing that puts `mean_photons = sinh² r` photons in the mode.
    pub fn from_mean_photons(mean_photons: f64, theta: f64) -> Result<Self> {
        check_range(
            "mean photon number",
            mean_photons,
            0.0,
            f64::MAX,
            "must be finite and >= 0",
        )?;
        Self::new(mean_photons.sqrt().asinh(), theta)
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn mean_photons(&self) -> f64 {
        self.r.sinh().powi(2)
    }
}

/// Interferometer input: coherent light in mode `a`, and either coherent
/// light or squeezed vacuum in mode `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InputSpec {
    TwoCoherent {
        alpha: ComplexAmplitude,
        beta: ComplexAmplitude,
    },
    CoherentSqueezed {
        alpha: ComplexAmplitude,
        squeeze: SqueezeParams,
    },
}

impl InputSpec {
    pub fn alpha(&self) -> ComplexAmplitude {
        match *self {
            InputSpec::TwoCoherent { alpha, .. } | InputSpec::CoherentSqueezed { alpha, .. } => {
                alpha
            }
        }
    }

    /// Total mean photon number entering the interferometer.
    pub fn total_mean_photons(&self) -> f64 {
        match self {
            InputSpec::TwoCoherent { alpha, beta } => alpha.mean_photons() + beta.mean_photons(),
            InputSpec::CoherentSqueezed { alpha, squeeze } => {
                alpha.mean_photons() + squeeze.mean_photons()
            }
        }
    }
}

/// Two-mode Gaussian state: quadrature means and symmetrized covariance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    mean: Vector4<f64>,
    cov: Matrix4<f64>,
}

impl GaussianState {
    /// Builds a state from raw moments, checking that `cov` is a physical
    /// covariance matrix.
    pub fn from_parts(mean: Vector4<f64>, cov: Matrix4<f64>) -> Result<Self> {
        if mean.iter().chain(cov.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidCovariance("non-finite entries".into()));
        }
        let state = Self { mean, cov };
        state.validate()?;
        Ok(state)
    }

    pub fn mean(&self) -> &Vector4<f64> {
        &self.mean
    }

    pub fn cov(&self) -> &Matrix4<f64> {
        &self.cov
    }

    /// Checks symmetry, positive definiteness and the uncertainty relation.
    pub fn validate(&self) -> Result<()> {
        let asym = (self.cov - self.cov.transpose()).abs().max();
        if asym > SYMMETRY_TOL * self.cov.abs().max().max(1.0) {
            return Err(Error::InvalidCovariance(format!("asymmetry {asym:e}")));
        }
        if self.cov.cholesky().is_none() {
            return Err(Error::InvalidCovariance("not positive definite".into()));
        }
        let (low, _) = self.symplectic_eigenvalues();
        if low < 0.5 - self.eigenvalue_tolerance(UNCERTAINTY_TOL) {
            return Err(Error::InvalidCovariance(format!(
                "symplectic eigenvalue {low} below 1/2"
            )));
        }
        Ok(())
    }

    /// Tolerance on symplectic eigenvalues, widened by the rounding floor
    /// of the Cholesky factorization for strongly squeezed states.
    pub(crate) fn eigenvalue_tolerance(&self, tol: f64) -> f64 {
        tol + 64.0 * f64::EPSILON * self.cov.abs().max()
    }

    /// Symplectic eigenvalues `(ν₋, ν₊)`, both `1/2` for a pure state.
    ///
    /// With `V = L Lᵀ`, the matrix `K = Lᵀ Ω L` is antisymmetric and
    /// similar to `V Ω`, so its singular values are the symplectic
    /// eigenvalues, each appearing twice. Returns `(0, ∞)` when `V` is not
    /// positive definite.
    pub fn symplectic_eigenvalues(&self) -> (f64, f64) {
        let Some(chol) = self.cov.cholesky() else {
            return (0.0, f64::INFINITY);
        };
        let l = chol.l();
        let k = l.transpose() * symplectic_form() * l;
        let sv = k.singular_values();
        (sv.min(), sv.max())
    }

    /// `⟨n̂⟩` of one mode.
    pub fn mean_photon(&self, mode: Mode) -> f64 {
        let o = mode.offset();
        let (x, p) = (self.mean[o], self.mean[o + 1]);
        (self.cov[(o, o)] + self.cov[(o + 1, o + 1)] - 1.0) / 2.0 + (x * x + p * p) / 2.0
    }

    fn transformed(&self, s: &Matrix4<f64>) -> Self {
        let cov = s * self.cov * s.transpose();
        Self {
            mean: s * self.mean,
            // re-symmetrize so rounding cannot accumulate across operations
            cov: (cov + cov.transpose()) * 0.5,
        }
    }
}

/// `Ω = ⊕ [[0, 1], [-1, 0]]`.
pub fn symplectic_form() -> Matrix4<f64> {
    let mut w = Matrix4::zeros();
    w[(0, 1)] = 1.0;
    w[(1, 0)] = -1.0;
    w[(2, 3)] = 1.0;
    w[(3, 2)] = -1.0;
    w
}

/// Two-mode vacuum.
pub fn vacuum() -> GaussianState {
    GaussianState {
        mean: Vector4::zeros(),
        cov: Matrix4::identity() * 0.5,
    }
}

fn coherent_quadratures(alpha: &ComplexAmplitude) -> (f64, f64) {
    let z = alpha.to_complex();
    (SQRT_2 * z.re, SQRT_2 * z.im)
}

/// Reflection block `[[cos θ, sin θ], [sin θ, -cos θ]]` that represents
/// `z ↦ e^{iθ} z*` on `(x, p)`.
fn conjugating_block(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, s, s, -c)
}

/// Covariance of `S(ς)|0⟩`: `(cosh 2r I - sinh 2r R(θ))/2`, since
/// `S† b S = cosh r b - e^{iθ} sinh r b†`.
fn squeezed_vacuum_block(squeeze: &SqueezeParams) -> Matrix2<f64> {
    let two_r = 2.0 * squeeze.r();
    (Matrix2::identity() * two_r.cosh() - conjugating_block(squeeze.theta()) * two_r.sinh()) * 0.5
}

/// Gaussian state of the interferometer input.
pub fn prepare_input(spec: &InputSpec) -> GaussianState {
    let mut state = vacuum();
    let (xa, pa) = coherent_quadratures(&spec.alpha());
    state.mean[0] = xa;
    state.mean[1] = pa;
    match spec {
        InputSpec::TwoCoherent { beta, .. } => {
            let (xb, pb) = coherent_quadratures(beta);
            state.mean[2] = xb;
            state.mean[3] = pb;
        }
        InputSpec::CoherentSqueezed { squeeze, .. } => {
            state
                .cov
                .fixed_view_mut::<2, 2>(2, 2)
                .copy_from(&squeezed_vacuum_block(squeeze));
        }
    }
    state
}

/// Symplectic matrix of the two-mode squeezer
/// `a' = cosh g a - e^{iθ_g} sinh g b†`, `b' = cosh g b - e^{iθ_g} sinh g a†`.
pub fn nbs_symplectic(params: &NbsParams) -> Matrix4<f64> {
    let (ch, sh) = (params.gain().cosh(), params.gain().sinh());
    let mix = conjugating_block(params.pump_phase()) * (-sh);
    let mut s = Matrix4::identity() * ch;
    s.fixed_view_mut::<2, 2>(0, 2).copy_from(&mix);
    s.fixed_view_mut::<2, 2>(2, 0).copy_from(&mix);
    s
}

/// Passes the state through the nonlinear beam splitter.
pub fn apply_nbs(state: &GaussianState, params: &NbsParams) -> GaussianState {
    state.transformed(&nbs_symplectic(params))
}

/// Applies the phase shift `e^{iφ n̂}` to one mode.
pub fn phase_rotate(state: &GaussianState, mode: Mode, phi: f64) -> GaussianState {
    let (s, c) = phi.sin_cos();
    let o = mode.offset();
    let mut rot = Matrix4::identity();
    rot[(o, o)] = c;
    rot[(o, o + 1)] = -s;
    rot[(o + 1, o)] = s;
    rot[(o + 1, o + 1)] = c;
    state.transformed(&rot)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn max_diff(x: &GaussianState, y: &GaussianState) -> f64 {
        (x.mean - y.mean)
            .abs()
            .max()
            .max((x.cov - y.cov).abs().max())
    }

    fn two_coherent(na: f64, ta: f64, nb: f64, tb: f64) -> InputSpec {
        InputSpec::TwoCoherent {
            alpha: ComplexAmplitude::from_mean_photons(na, ta).unwrap(),
            beta: ComplexAmplitude::from_mean_photons(nb, tb).unwrap(),
        }
    }

    #[test]
    fn vacuum_definition() {
        let v = vacuum();
        assert_eq!(*v.mean(), Vector4::zeros());
        assert_eq!(*v.cov(), Matrix4::from_diagonal_element(0.5));
        assert_eq!(v.mean_photon(Mode::A), 0.0);
        assert_eq!(v.mean_photon(Mode::B), 0.0);
        let (lo, hi) = v.symplectic_eigenvalues();
        assert_close(lo, 0.5, 1e-15);
        assert_close(hi, 0.5, 1e-15);
    }

    #[test]
    fn zero_coherent_input_is_vacuum() {
        assert_eq!(prepare_input(&two_coherent(0.0, 0.0, 0.0, 0.0)), vacuum());
    }

    #[test]
    fn coherent_input_photon_numbers() {
        let s = prepare_input(&InputSpec::TwoCoherent {
            alpha: ComplexAmplitude::new(1.0, 0.0).unwrap(),
            beta: ComplexAmplitude::new(2.0, FRAC_PI_2).unwrap(),
        });
        assert_close(s.mean_photon(Mode::A), 1.0, 1e-14);
        assert_close(s.mean_photon(Mode::B), 4.0, 1e-14);
        assert_close(s.mean()[0], SQRT_2, 1e-15);
        assert_close(s.mean()[3], 2.0 * SQRT_2, 1e-14);
    }

    #[test]
    fn squeezed_input_photon_number() {
        let s = prepare_input(&InputSpec::CoherentSqueezed {
            alpha: ComplexAmplitude::zero(),
            squeeze: SqueezeParams::new(0.5, 0.0).unwrap(),
        });
        // sinh²(0.5), also obtained from the Fock expansion in fock::tests
        assert_close(s.mean_photon(Mode::B), 0.271_540_317_407_621_9, 1e-12);
        assert_eq!(s.mean_photon(Mode::A), 0.0);
        assert_eq!(s.mean()[2], 0.0);
        let (lo, hi) = s.symplectic_eigenvalues();
        assert_close(lo, 0.5, 1e-12);
        assert_close(hi, 0.5, 1e-12);
    }

    #[test]
    fn nbs_identity_at_zero_gain() {
        for theta in [0.0, 1.0, PI] {
            let out = apply_nbs(&vacuum(), &NbsParams::new(0.0, theta).unwrap());
            assert_eq!(out, vacuum());
        }
    }

    #[test]
    fn nbs_on_vacuum_gives_tmsv_occupation() {
        let out = apply_nbs(&vacuum(), &NbsParams::new(1.0, 0.0).unwrap());
        let expected = 1f64.sinh().powi(2);
        assert_close(out.mean_photon(Mode::A), expected, 1e-12);
        assert_close(out.mean_photon(Mode::B), expected, 1e-12);
        assert_close(expected, 1.381_097_845_541_816_5, 1e-14);
    }

    #[test]
    fn nbs_mean_follows_mode_transform() {
        // a' = cosh g α - e^{iθ_g} sinh g β*
        let (g, tg) = (0.7, 0.9);
        let spec = two_coherent(1.5, 0.4, 2.0, 2.1);
        let out = apply_nbs(&prepare_input(&spec), &NbsParams::new(g, tg).unwrap());
        let InputSpec::TwoCoherent { alpha, beta } = spec else {
            unreachable!()
        };
        let (a, b) = (alpha.to_complex(), beta.to_complex());
        let e = Complex64::from_polar(1.0, tg);
        let a_out = a * g.cosh() - e * g.sinh() * b.conj();
        let b_out = b * g.cosh() - e * g.sinh() * a.conj();
        let m = out.mean() / SQRT_2;
        assert_close(m[0], a_out.re, 1e-12);
        assert_close(m[1], a_out.im, 1e-12);
        assert_close(m[2], b_out.re, 1e-12);
        assert_close(m[3], b_out.im, 1e-12);
    }

    #[test]
    fn nbs_matrix_is_symplectic() {
        let omega = symplectic_form();
        let s = nbs_symplectic(&NbsParams::new(1.3, 2.2).unwrap());
        let diff = (s * omega * s.transpose() - omega).abs().max();
        assert!(diff < 1e-12, "{diff}");
    }

    #[test]
    fn phase_rotation_quarter_turn() {
        let s = prepare_input(&two_coherent(1.0, 0.0, 0.0, 0.0));
        let r = phase_rotate(&s, Mode::A, FRAC_PI_2);
        assert_close(r.mean()[0], 0.0, 1e-15);
        assert_close(r.mean()[1], SQRT_2, 1e-15);
        assert_eq!(phase_rotate(&s, Mode::A, 0.0), s);
    }

    #[test]
    fn phase_rotation_keeps_photon_number() {
        let s = apply_nbs(
            &prepare_input(&InputSpec::CoherentSqueezed {
                alpha: ComplexAmplitude::new(1.2, 0.3).unwrap(),
                squeeze: SqueezeParams::new(0.6, 1.1).unwrap(),
            }),
            &NbsParams::new(0.8, 0.2).unwrap(),
        );
        for mode in [Mode::A, Mode::B] {
            let r = phase_rotate(&s, mode, 1.234);
            assert_close(r.mean_photon(Mode::A), s.mean_photon(Mode::A), 1e-12);
            assert_close(r.mean_photon(Mode::B), s.mean_photon(Mode::B), 1e-12);
        }
    }

    #[test]
    fn same_phase_squeezers_compose() {
        let s = prepare_input(&two_coherent(1.0, 0.3, 2.0, 1.0));
        let p1 = NbsParams::new(0.4, 0.7).unwrap();
        let p2 = NbsParams::new(0.9, 0.7).unwrap();
        let p12 = NbsParams::new(1.3, 0.7).unwrap();
        let twice = apply_nbs(&apply_nbs(&s, &p1), &p2);
        assert!(max_diff(&twice, &apply_nbs(&s, &p12)) < 1e-10);
    }

    #[test]
    fn opposite_phase_squeezer_inverts() {
        let s = prepare_input(&InputSpec::CoherentSqueezed {
            alpha: ComplexAmplitude::new(1.0, 0.5).unwrap(),
            squeeze: SqueezeParams::new(0.8, 0.1).unwrap(),
        });
        let fwd = NbsParams::new(1.1, 0.4).unwrap();
        let back = NbsParams::new(1.1, 0.4 + PI).unwrap();
        assert!(max_diff(&apply_nbs(&apply_nbs(&s, &fwd), &back), &s) < 1e-10);
    }

    #[test]
    fn parameter_guards() {
        assert!(NbsParams::new(-0.1, 0.0).is_err());
        assert!(NbsParams::new(20.5, 0.0).is_err());
        assert!(NbsParams::new(f64::NAN, 0.0).is_err());
        assert!(SqueezeParams::new(21.0, 0.0).is_err());
        assert!(ComplexAmplitude::new(-1.0, 0.0).is_err());
        let z = ComplexAmplitude::new(1.0, -FRAC_PI_2).unwrap();
        assert_close(z.phase(), 3.0 * FRAC_PI_2, 1e-15);
    }

    #[test]
    fn from_parts_rejects_unphysical_covariance() {
        let sub_vacuum = Matrix4::from_diagonal_element(0.3);
        assert!(matches!(
            GaussianState::from_parts(Vector4::zeros(), sub_vacuum),
            Err(Error::InvalidCovariance(_))
        ));
        let mut asym = Matrix4::from_diagonal_element(0.5);
        asym[(0, 1)] = 0.1;
        assert!(GaussianState::from_parts(Vector4::zeros(), asym).is_err());
        assert!(
            GaussianState::from_parts(Vector4::zeros(), Matrix4::from_diagonal_element(0.7))
                .is_ok()
        );
    }
}
