//! Brute-force verifier in a truncated two-mode Fock basis.
//!
//! Input states are expanded in number states, the two-mode squeezer
//! `U = exp(-ξ a†b† + ξ* a b)` is applied by exponentiating its truncated
//! generator, and every statistic is a direct sum over the resulting
//! number distribution. Nothing here uses the Gaussian formalism, so the
//! oracle stays independent of the `gaussian`/`moments`/`qfi` paths.
//!
//! A truncation is admissible when the population on the highest retained
//! number state of each mode is at most [`TAIL_POPULATION`] (the tail
//! rule). [`evolve`] grows the cutoff in half-octave steps until the tail
//! rule holds and the results at consecutive cutoffs agree.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::expm::expm_action;
use crate::gaussian::{ComplexAmplitude, InputSpec, NbsParams, SqueezeParams};
use crate::moments::PhotonMoments;
use crate::qfi::PhaseConfiguration;

/// Largest population allowed on the top number state of a mode.
pub const TAIL_POPULATION: f64 = 1e-12;
/// Largest norm deficit of a prepared input.
pub const PREPARATION_DEFICIT: f64 = 1e-10;
/// Largest norm deficit after the two-mode squeezer.
pub const EVOLUTION_DEFICIT: f64 = 1e-8;
/// Default finite-difference step for [`phase_derivative_check`].
pub const DEFAULT_PHASE_STEP: f64 = 1e-4;

/// Cutoff search settings for [`evolve`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// First cutoff tried (per mode).
    pub min_cutoff: usize,
    /// Hard cap on the per-mode cutoff.
    pub max_cutoff: usize,
    /// Relative change allowed between results at consecutive cutoffs.
    pub stability_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            min_cutoff: 16,
            max_cutoff: 512,
            stability_tol: 1e-8,
        }
    }
}

/// Two-mode state amplitudes `ψ[n_a, n_b]`, row-major in `n_a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockTensor {
    cutoff_a: usize,
    cutoff_b: usize,
    amplitudes: Vec<Complex64>,
}

fn tail_check(cutoff: usize, top: f64, deficit: f64, max_deficit: f64) -> Result<()> {
    if top <= TAIL_POPULATION && deficit <= max_deficit {
        Ok(())
    } else {
        Err(Error::CutoffTooSmall {
            cutoff,
            tail: top,
            deficit,
        })
    }
}

fn check_single_mode(coeffs: &[Complex64]) -> Result<()> {
    let cutoff = coeffs.len();
    let top = coeffs.last().map_or(0.0, |c| c.norm_sqr());
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
    tail_check(cutoff, top, 1.0 - norm, PREPARATION_DEFICIT)
}

/// Number-state expansion of the coherent state `|α⟩`,
/// `c_n = e^{-|α|²/2} αⁿ/√n!`.
pub fn coherent_fock(alpha: &ComplexAmplitude, cutoff: usize) -> Result<Vec<Complex64>> {
    let z = alpha.to_complex();
    let mut coeffs = Vec::with_capacity(cutoff);
    let mut c = Complex64::new((-alpha.mean_photons() / 2.0).exp(), 0.0);
    for n in 0..cutoff {
        if n > 0 {
            c = c * z / (n as f64).sqrt();
        }
        coeffs.push(c);
    }
    check_single_mode(&coeffs)?;
    Ok(coeffs)
}

/// Number-state expansion of the squeezed vacuum `S(ς)|0⟩`:
/// `c_{2m} = (cosh r)^{-1/2} (-e^{iθ} tanh r)^m √((2m)!)/(2^m m!)`, odd
/// coefficients zero.
pub fn squeezed_vacuum_fock(sq: &SqueezeParams, cutoff: usize) -> Result<Vec<Complex64>> {
    let ratio = -Complex64::from_polar(sq.r().tanh(), sq.theta());
    let mut coeffs = vec![Complex64::default(); cutoff];
    let mut c = Complex64::new(sq.r().cosh().powf(-0.5), 0.0);
    for m in 0.. {
        let n = 2 * m;
        if n >= cutoff {
            break;
        }
        if m > 0 {
            let (two_m, m_f) = (n as f64, m as f64);
            c = c * ratio * ((two_m * (two_m - 1.0)).sqrt() / (2.0 * m_f));
        }
        coeffs[n] = c;
    }
    check_single_mode(&coeffs)?;
    Ok(coeffs)
}

impl FockTensor {
    /// Product state `ψ_a ⊗ ψ_b`.
    pub fn product(mode_a: &[Complex64], mode_b: &[Complex64]) -> Self {
        let amplitudes = mode_a
            .iter()
            .flat_map(|ca| mode_b.iter().map(move |cb| ca * cb))
            .collect();
        Self {
            cutoff_a: mode_a.len(),
            cutoff_b: mode_b.len(),
            amplitudes,
        }
    }

    /// Number state `|n_a, n_b⟩`.
    pub fn basis(cutoff_a: usize, cutoff_b: usize, n_a: usize, n_b: usize) -> Self {
        let mut amplitudes = vec![Complex64::default(); cutoff_a * cutoff_b];
        amplitudes[n_a * cutoff_b + n_b] = Complex64::new(1.0, 0.0);
        Self {
            cutoff_a,
            cutoff_b,
            amplitudes,
        }
    }

    /// Input state of the interferometer at per-mode cutoff `cutoff`.
    pub fn prepare(spec: &InputSpec, cutoff: usize) -> Result<Self> {
        let a = coherent_fock(&spec.alpha(), cutoff)?;
        let b = match spec {
            InputSpec::TwoCoherent { beta, .. } => coherent_fock(beta, cutoff)?,
            InputSpec::CoherentSqueezed { squeeze, .. } => squeezed_vacuum_fock(squeeze, cutoff)?,
        };
        Ok(Self::product(&a, &b))
    }

    pub fn cutoffs(&self) -> (usize, usize) {
        (self.cutoff_a, self.cutoff_b)
    }

    pub fn amplitude(&self, n_a: usize, n_b: usize) -> Complex64 {
        self.amplitudes[n_a * self.cutoff_b + n_b]
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FockTensor) -> Complex64 {
        assert_eq!(self.cutoffs(), other.cutoffs(), "cutoff mismatch");
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum()
    }

    /// Populations on the top number state of mode `a` and of mode `b`.
    pub fn tail_populations(&self) -> (f64, f64) {
        let cb = self.cutoff_b;
        let top_a = self.amplitudes[(self.cutoff_a - 1) * cb..]
            .iter()
            .map(|z| z.norm_sqr())
            .sum();
        let top_b = self
            .amplitudes
            .chunks(cb)
            .map(|row| row[cb - 1].norm_sqr())
            .sum();
        (top_a, top_b)
    }

    fn check_tail(&self, max_deficit: f64) -> Result<()> {
        let (ta, tb) = self.tail_populations();
        tail_check(
            self.cutoff_a.max(self.cutoff_b),
            ta.max(tb),
            1.0 - self.norm_sqr(),
            max_deficit,
        )
    }

    /// Joint number distribution normalized to one.
    fn probabilities(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let norm = self.norm_sqr();
        let cb = self.cutoff_b;
        self.amplitudes
            .iter()
            .enumerate()
            .map(move |(i, z)| ((i / cb) as f64, (i % cb) as f64, z.norm_sqr() / norm))
    }

    /// Number moments by direct summation over the distribution.
    pub fn photon_moments(&self) -> PhotonMoments {
        let (mut mean_a, mut mean_b) = (0.0, 0.0);
        for (na, nb, p) in self.probabilities() {
            mean_a += p * na;
            mean_b += p * nb;
        }
        let (mut var_a, mut var_b, mut cov_ab) = (0.0, 0.0, 0.0);
        for (na, nb, p) in self.probabilities() {
            let (da, db) = (na - mean_a, nb - mean_b);
            var_a += p * da * da;
            var_b += p * db * db;
            cov_ab += p * da * db;
        }
        PhotonMoments {
            mean_a,
            mean_b,
            var_a,
            var_b,
            cov_ab,
        }
    }

    /// Pure-state QFI `4(⟨G²⟩ - ⟨G⟩²)` for the configuration's generator.
    pub fn qfi(&self, config: PhaseConfiguration) -> f64 {
        let generator = |na: f64, nb: f64| match config {
            PhaseConfiguration::TwoArm => (na + nb) / 2.0,
            PhaseConfiguration::UpperArm => na,
            PhaseConfiguration::LowerArm => nb,
        };
        let mean: f64 = self
            .probabilities()
            .map(|(na, nb, p)| p * generator(na, nb))
            .sum();
        let var: f64 = self
            .probabilities()
            .map(|(na, nb, p)| p * (generator(na, nb) - mean).powi(2))
            .sum();
        4.0 * var
    }

    /// Applies `exp(iφ₁ n̂_a) exp(iφ₂ n̂_b)`.
    pub fn apply_phases(&self, phi_1: f64, phi_2: f64) -> FockTensor {
        let cb = self.cutoff_b;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let (na, nb) = ((i / cb) as f64, (i % cb) as f64);
                z * Complex64::from_polar(1.0, phi_1 * na + phi_2 * nb)
            })
            .collect();
        FockTensor {
            amplitudes,
            ..*self
        }
    }

    /// Operator `a` on mode `a`, `b` on mode `b`.
    pub fn lower(&self, mode_b: bool) -> FockTensor {
        let (ca, cb) = self.cutoffs();
        let mut out = vec![Complex64::default(); ca * cb];
        for na in 0..ca {
            for nb in 0..cb {
                let (src_a, src_b, n) = if mode_b {
                    (na, nb + 1, nb + 1)
                } else {
                    (na + 1, nb, na + 1)
                };
                if src_a < ca && src_b < cb {
                    out[na * cb + nb] = self.amplitudes[src_a * cb + src_b] * (n as f64).sqrt();
                }
            }
        }
        FockTensor {
            amplitudes: out,
            ..*self
        }
    }

    /// Operator `a†` on mode `a`, `b†` on mode `b`.
    pub fn raise(&self, mode_b: bool) -> FockTensor {
        let (ca, cb) = self.cutoffs();
        let mut out = vec![Complex64::default(); ca * cb];
        for na in 0..ca {
            for nb in 0..cb {
                let (dst_a, dst_b, n) = if mode_b {
                    (na, nb + 1, nb + 1)
                } else {
                    (na + 1, nb, na + 1)
                };
                if dst_a < ca && dst_b < cb {
                    out[dst_a * cb + dst_b] = self.amplitudes[na * cb + nb] * (n as f64).sqrt();
                }
            }
        }
        FockTensor {
            amplitudes: out,
            ..*self
        }
    }
}

/// Writes `(-ξ a†b† + ξ* a b) x` into `out` on the truncated basis.
fn apply_generator(
    xi: Complex64,
    cutoff_a: usize,
    cutoff_b: usize,
    sqrt: &[f64],
    x: &[Complex64],
    out: &mut [Complex64],
) {
    let (up, down) = (-xi, xi.conj());
    for na in 0..cutoff_a {
        for nb in 0..cutoff_b {
            let mut acc = Complex64::default();
            if na > 0 && nb > 0 {
                acc += up * (sqrt[na] * sqrt[nb]) * x[(na - 1) * cutoff_b + nb - 1];
            }
            if na + 1 < cutoff_a && nb + 1 < cutoff_b {
                acc += down * (sqrt[na + 1] * sqrt[nb + 1]) * x[(na + 1) * cutoff_b + nb + 1];
            }
            out[na * cutoff_b + nb] = acc;
        }
    }
}

fn squeeze_unchecked(state: &FockTensor, params: &NbsParams) -> FockTensor {
    if params.gain() == 0.0 {
        return state.clone();
    }
    let (ca, cb) = state.cutoffs();
    let sqrt: Vec<f64> = (0..=ca.max(cb)).map(|n| (n as f64).sqrt()).collect();
    let xi = params.xi();
    let amplitudes = expm_action(
        |x, out| apply_generator(xi, ca, cb, &sqrt, x, out),
        &state.amplitudes,
    );
    FockTensor {
        amplitudes,
        ..*state
    }
}

/// Applies the two-mode squeezer `exp(-ξ a†b† + ξ* a b)`, `ξ = g e^{iθ_g}`.
///
/// Fails with [`Error::CutoffTooSmall`] when the output violates the tail
/// rule; the caller should retry at a larger cutoff.
pub fn apply_two_mode_squeezer(state: &FockTensor, params: &NbsParams) -> Result<FockTensor> {
    let out = squeeze_unchecked(state, params);
    out.check_tail(EVOLUTION_DEFICIT)?;
    Ok(out)
}

/// Post-squeezer state at an accepted cutoff.
#[derive(Debug, Clone)]
pub struct OracleState {
    pub tensor: FockTensor,
    pub cutoff: usize,
}

impl OracleState {
    pub fn qfi(&self, config: PhaseConfiguration) -> f64 {
        self.tensor.qfi(config)
    }

    pub fn photon_moments(&self) -> PhotonMoments {
        self.tensor.photon_moments()
    }
}

fn fingerprint(t: &FockTensor) -> [f64; 5] {
    let m = t.photon_moments();
    [
        m.mean_a,
        m.mean_b,
        m.var_a,
        m.var_b,
        m.var_a + m.var_b + 2.0 * m.cov_ab,
    ]
}

fn stable(prev: &[f64; 5], cur: &[f64; 5], tol: f64) -> bool {
    prev.iter()
        .zip(cur)
        .all(|(p, c)| (p - c).abs() <= tol * c.abs().max(1e-12))
}

/// Prepares the input, applies the squeezer and selects the cutoff: the
/// cutoff grows by factors of √2 from `min_cutoff` until the output
/// satisfies the tail rule and all number moments agree with the previous
/// cutoff to `stability_tol`.
pub fn evolve(spec: &InputSpec, params: &NbsParams, opts: &OracleOptions) -> Result<OracleState> {
    let mut previous: Option<[f64; 5]> = None;
    for cutoff in cutoff_ladder(opts) {
        let input = match FockTensor::prepare(spec, cutoff) {
            Ok(t) => t,
            Err(Error::CutoffTooSmall { .. }) => {
                previous = None;
                continue;
            }
            Err(e) => return Err(e),
        };
        let out = squeeze_unchecked(&input, params);
        let current = fingerprint(&out);
        let accepted = out.check_tail(EVOLUTION_DEFICIT).is_ok()
            && previous.is_some_and(|p| stable(&p, &current, opts.stability_tol));
        if accepted {
            return Ok(OracleState {
                tensor: out,
                cutoff,
            });
        }
        previous = Some(current);
    }
    Err(Error::Infeasible {
        max_cutoff: opts.max_cutoff,
    })
}

/// Cutoffs `min·2^{k/2}` (rounded) up to and including `max_cutoff`.
fn cutoff_ladder(opts: &OracleOptions) -> Vec<usize> {
    let min = opts.min_cutoff.max(2);
    let mut ladder: Vec<usize> = (0..)
        .map(|k| (min as f64 * 2f64.powf(k as f64 / 2.0)).round() as usize)
        .take_while(|&c| c <= opts.max_cutoff)
        .collect();
    ladder.dedup();
    ladder
}

/// QFI of the interferometer state by brute force in the Fock basis.
pub fn oracle_qfi(
    spec: &InputSpec,
    params: &NbsParams,
    config: PhaseConfiguration,
    opts: &OracleOptions,
) -> Result<f64> {
    Ok(evolve(spec, params, opts)?.qfi(config))
}

/// QFI of the sum phase from a central finite difference of the actually
/// phase-shifted state `e^{iφ₁ n̂_a} e^{iφ₂ n̂_b}|Ψ⟩`, varying `φ = φ₁ + φ₂`
/// by `±step` at fixed `φ₁ - φ₂`:
/// `F = 4(⟨Ψ'|Ψ'⟩ - |⟨Ψ'|Ψ⟩|²)`.
pub fn phase_derivative_check(
    spec: &InputSpec,
    params: &NbsParams,
    phi_1: f64,
    phi_2: f64,
    step: f64,
    opts: &OracleOptions,
) -> Result<f64> {
    let state = evolve(spec, params, opts)?;
    phase_derivative_on(&state.tensor, phi_1, phi_2, step)
}

/// Finite-difference QFI on an already evolved tensor.
pub fn phase_derivative_on(psi: &FockTensor, phi_1: f64, phi_2: f64, step: f64) -> Result<f64> {
    // φ₁ ± h/2 and φ₂ ± h/2 must actually move in floating point
    let half = step / 2.0;
    let moves = |phi: f64| phi + half != phi && phi - half != phi;
    if !(step > 1e-12) || !step.is_finite() || !moves(phi_1) || !moves(phi_2) {
        return Err(Error::StepUnderflow(step));
    }
    let norm = psi.norm_sqr();
    let plus = psi.apply_phases(phi_1 + half, phi_2 + half);
    let minus = psi.apply_phases(phi_1 - half, phi_2 - half);
    let at = psi.apply_phases(phi_1, phi_2);
    let deriv = FockTensor {
        amplitudes: plus
            .amplitudes
            .iter()
            .zip(&minus.amplitudes)
            .map(|(p, m)| (p - m) / (2.0 * step))
            .collect(),
        ..*psi
    };
    let dd = deriv.norm_sqr() / norm;
    let overlap = deriv.inner(&at).norm_sqr() / (norm * norm);
    Ok(4.0 * (dd - overlap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn assert_rel(a: f64, b: f64, tol: f64) {
        assert!(
            (a - b).abs() <= tol * b.abs().max(1e-300),
            "{a} vs {b} (rel {tol})"
        );
    }

    fn vacuum_spec() -> InputSpec {
        InputSpec::TwoCoherent {
            alpha: ComplexAmplitude::zero(),
            beta: ComplexAmplitude::zero(),
        }
    }

    #[test]
    fn coherent_coefficients() {
        let zero = coherent_fock(&ComplexAmplitude::zero(), 8).unwrap();
        assert_eq!(zero[0], Complex64::new(1.0, 0.0));
        assert!(zero[1..].iter().all(|c| c.norm() == 0.0));

        let one = coherent_fock(&ComplexAmplitude::new(1.0, 0.0).unwrap(), 40).unwrap();
        let e = (-0.5f64).exp();
        assert_rel(one[0].re, e, 1e-15);
        assert_rel(one[1].re, e, 1e-15);
        assert_rel(e, 0.606_530_659_712_633_4, 1e-15);

        let two = coherent_fock(&ComplexAmplitude::new(2.0, 1.0).unwrap(), 40).unwrap();
        let mean: f64 = two
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        assert!((mean - 4.0).abs() < 1e-10);
    }

    #[test]
    fn coherent_cutoff_too_small() {
        let err = coherent_fock(&ComplexAmplitude::new(3.0, 0.0).unwrap(), 10).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { cutoff: 10, .. }));
    }

    #[test]
    fn squeezed_coefficients() {
        let none = squeezed_vacuum_fock(&SqueezeParams::new(0.0, 0.3).unwrap(), 6).unwrap();
        assert_eq!(none[0], Complex64::new(1.0, 0.0));

        let half = squeezed_vacuum_fock(&SqueezeParams::new(0.5, 0.0).unwrap(), 60).unwrap();
        assert_rel(half[0].norm(), 0.941_710_615_831_675_7, 1e-12);
        assert_rel(half[2].norm(), 0.307_719_176_458_370_4, 1e-12);
        assert!(half.iter().skip(1).step_by(2).all(|c| c.norm() == 0.0));
        let mean: f64 = half
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        assert_rel(mean, 0.5f64.sinh().powi(2), 1e-12);

        let one = squeezed_vacuum_fock(&SqueezeParams::new(1.0, 2.0).unwrap(), 160).unwrap();
        let mean: f64 = one
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        assert_rel(mean, 1.381_097_845_541_815_7, 1e-10);
    }

    #[test]
    fn squeezer_identity_at_zero_gain() {
        let input = FockTensor::prepare(&vacuum_spec(), 8).unwrap();
        let out = apply_two_mode_squeezer(&input, &NbsParams::new(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(out, input);
    }

    #[test]
    fn tmsv_statistics_and_schmidt_coefficients() {
        let (g, tg) = (0.8_f64, 0.6);
        let input = FockTensor::prepare(&vacuum_spec(), 64).unwrap();
        let out = apply_two_mode_squeezer(&input, &NbsParams::new(g, tg).unwrap()).unwrap();
        let m = out.photon_moments();
        let nbar = 0.788_732_235_597_442_7; // sinh²(0.8)
        assert!((m.mean_a - nbar).abs() < 1e-8);
        assert!((m.mean_b - nbar).abs() < 1e-8);
        assert!((out.norm_sqr() - 1.0).abs() < 1e-8);
        // |Ψ⟩ = Σ (-e^{iθ} tanh g)^n / cosh g |n, n⟩
        let ratio = -Complex64::from_polar(g.tanh(), tg);
        for n in 0..20 {
            let expected = ratio.powi(n as i32) / g.cosh();
            assert!((out.amplitude(n, n) - expected).norm() < 1e-8, "n={n}");
            if n > 0 {
                assert!(out.amplitude(n, n - 1).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn tmsv_number_statistics_at_unit_gain() {
        let input = FockTensor::prepare(&vacuum_spec(), 80).unwrap();
        let out = apply_two_mode_squeezer(&input, &NbsParams::new(1.0, 0.0).unwrap()).unwrap();
        let m = out.photon_moments();
        let var_sum = m.var_a + m.var_b + 2.0 * m.cov_ab;
        assert_rel(var_sum, 13.154_116_418_008_243, 1e-9);
        assert_rel(
            var_sum + (m.mean_a + m.mean_b).powi(2),
            20.783_841_453_849_224,
            1e-9,
        );
    }

    // The unitary's sign convention: U† a U = cosh g a - e^{iθ_g} sinh g b†.
    #[test]
    fn heisenberg_action_matches_mode_transform() {
        let (g, tg) = (0.35_f64, 1.1);
        let params = NbsParams::new(g, tg).unwrap();
        let c = 40;
        let low: Vec<(usize, usize)> = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).collect();
        let evolved: Vec<FockTensor> = low
            .iter()
            .map(|&(a, b)| squeeze_unchecked(&FockTensor::basis(c, c, a, b), &params))
            .collect();
        let e = Complex64::from_polar(1.0, tg);
        for (j, &(ma, mb)) in low.iter().enumerate() {
            for (k, &(na, nb)) in low.iter().enumerate() {
                // ⟨m|U† a U|n⟩
                let lhs = evolved[j].inner(&evolved[k].lower(false));
                let basis_n = FockTensor::basis(c, c, na, nb);
                let basis_m = FockTensor::basis(c, c, ma, mb);
                let rhs = basis_m.inner(&basis_n.lower(false)) * g.cosh()
                    - e * g.sinh() * basis_m.inner(&basis_n.raise(true));
                assert!(
                    (lhs - rhs).norm() < 1e-12,
                    "({ma},{mb}) ({na},{nb}): {lhs} vs {rhs}"
                );
            }
        }
    }

    #[test]
    fn output_tail_rule_enforced() {
        let input = FockTensor::prepare(&vacuum_spec(), 12).unwrap();
        let err = apply_two_mode_squeezer(&input, &NbsParams::new(1.0, 0.0).unwrap()).unwrap_err();
        assert!(matches!(err, Error::CutoffTooSmall { .. }));
    }

    #[test]
    fn oracle_vacuum_qfi() {
        let opts = OracleOptions::default();
        let params = NbsParams::new(0.8, 0.0).unwrap();
        let f = oracle_qfi(&vacuum_spec(), &params, PhaseConfiguration::TwoArm, &opts).unwrap();
        assert_rel(f, 5.643_323_100_271_93, 1e-7);
        let up = oracle_qfi(&vacuum_spec(), &params, PhaseConfiguration::UpperArm, &opts).unwrap();
        assert_rel(up, f, 1e-7);
    }

    #[test]
    fn oracle_two_coherent_unmatched_phases() {
        let spec = InputSpec::TwoCoherent {
            alpha: ComplexAmplitude::new(1.0, 0.0).unwrap(),
            beta: ComplexAmplitude::new(1.0, 0.0).unwrap(),
        };
        let params = NbsParams::new(0.5, 0.0).unwrap();
        let f = oracle_qfi(
            &spec,
            &params,
            PhaseConfiguration::TwoArm,
            &OracleOptions::default(),
        )
        .unwrap();
        // 2cosh 2 + sinh² 1 - 2 sinh 2
        assert_rel(f, 1.651_768_412_015_041, 1e-7);
    }

    #[test]
    fn oracle_squeezed_reduction() {
        let alpha = ComplexAmplitude::new(2.0, 0.3).unwrap();
        let params = NbsParams::new(0.5, 0.2).unwrap();
        let opts = OracleOptions::default();
        let sq = InputSpec::CoherentSqueezed {
            alpha,
            squeeze: SqueezeParams::new(0.0, 0.0).unwrap(),
        };
        let coh = InputSpec::TwoCoherent {
            alpha,
            beta: ComplexAmplitude::zero(),
        };
        for config in PhaseConfiguration::ALL {
            let a = oracle_qfi(&sq, &params, config, &opts).unwrap();
            let b = oracle_qfi(&coh, &params, config, &opts).unwrap();
            assert_rel(a, b, 1e-12);
        }
    }

    #[test]
    fn oracle_infeasible_beyond_cap() {
        let opts = OracleOptions {
            max_cutoff: 16,
            ..OracleOptions::default()
        };
        let spec = InputSpec::TwoCoherent {
            alpha: ComplexAmplitude::new(2.0, 0.0).unwrap(),
            beta: ComplexAmplitude::new(2.0, PI).unwrap(),
        };
        let err = evolve(&spec, &NbsParams::new(1.0, 0.0).unwrap(), &opts).unwrap_err();
        assert_eq!(err, Error::Infeasible { max_cutoff: 16 });
    }

    #[test]
    fn cutoff_ladder_steps() {
        let ladder = cutoff_ladder(&OracleOptions::default());
        assert_eq!(ladder[..5], [16, 23, 32, 45, 64]);
        assert_eq!(*ladder.last().unwrap(), 512);
        let tiny = OracleOptions {
            min_cutoff: 2,
            max_cutoff: 4,
            ..OracleOptions::default()
        };
        assert_eq!(cutoff_ladder(&tiny), [2, 3, 4]);
    }

    #[test]
    fn finite_difference_matches_generator() {
        let opts = OracleOptions::default();
        let params = NbsParams::new(0.8, 0.0).unwrap();
        let fd =
            phase_derivative_check(&vacuum_spec(), &params, 0.3, 0.1, DEFAULT_PHASE_STEP, &opts)
                .unwrap();
        assert!((fd - 5.643_323_100_271_93).abs() < 1e-3, "{fd}");

        let spec = InputSpec::TwoCoherent {
            alpha: ComplexAmplitude::new(1.0, 0.4).unwrap(),
            beta: ComplexAmplitude::new(1.5, 2.0).unwrap(),
        };
        let zero = NbsParams::new(0.0, 0.0).unwrap();
        let fd = phase_derivative_check(&spec, &zero, 0.0, 0.0, DEFAULT_PHASE_STEP, &opts).unwrap();
        assert!((fd - 3.25).abs() < 1e-4, "{fd}");
    }

    #[test]
    fn finite_difference_ignores_phase_difference() {
        let spec = InputSpec::CoherentSqueezed {
            alpha: ComplexAmplitude::new(1.0, 0.4).unwrap(),
            squeeze: SqueezeParams::new(0.4, 1.0).unwrap(),
        };
        let state = evolve(
            &spec,
            &NbsParams::new(0.6, 0.3).unwrap(),
            &OracleOptions::default(),
        )
        .unwrap();
        // same sum φ = 1.0, different φ₁ - φ₂
        let f1 = phase_derivative_on(&state.tensor, 0.5, 0.5, DEFAULT_PHASE_STEP).unwrap();
        let f2 = phase_derivative_on(&state.tensor, 1.4, -0.4, DEFAULT_PHASE_STEP).unwrap();
        assert!((f1 - f2).abs() <= 1e-6 * f1);
    }

    #[test]
    fn finite_difference_step_underflow() {
        let t = FockTensor::prepare(&vacuum_spec(), 4).unwrap();
        assert!(matches!(
            phase_derivative_on(&t, 0.0, 0.0, 0.0),
            Err(Error::StepUnderflow(_))
        ));
        assert!(matches!(
            phase_derivative_on(&t, 1e6, 0.0, 1e-11),
            Err(Error::StepUnderflow(_))
        ));
    }
}
