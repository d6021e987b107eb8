//! Quantum Fisher information of the interferometer state, by generator
//! variance on a Gaussian state and by closed-form expressions, plus the
//! Cramér–Rao and Hofmann bounds derived from it.
//!
//! For a pure state imprinted with `e^{iφG}` the QFI is `4 Δ²G`. The
//! generators are `(n̂_a + n̂_b)/2` for equal shifts in both arms, and
//! `n̂_a` or `n̂_b` when only one arm is shifted.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_range, Error, Result};
use crate::gaussian::{GaussianState, InputSpec, NbsParams};
use crate::moments::{expected_n_squared, photon_moments, variance_of_sum};

const PURITY_TOL: f64 = 1e-6;

/// Where the phase delay sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PhaseConfiguration {
    /// Only mode `a` is shifted.
    UpperArm,
    /// Only mode `b` is shifted.
    LowerArm,
    /// Both arms, sensing the sum phase `φ₁ + φ₂`.
    TwoArm,
}

impl PhaseConfiguration {
    pub const ALL: [PhaseConfiguration; 3] = [
        PhaseConfiguration::UpperArm,
        PhaseConfiguration::LowerArm,
        PhaseConfiguration::TwoArm,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PhaseConfiguration::UpperArm => "upper",
            PhaseConfiguration::LowerArm => "lower",
            PhaseConfiguration::TwoArm => "two-arm",
        }
    }
}

impl fmt::Display for PhaseConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PhaseConfiguration {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "upper" | "upper-arm" => Ok(PhaseConfiguration::UpperArm),
            "lower" | "lower-arm" => Ok(PhaseConfiguration::LowerArm),
            "two-arm" | "two" => Ok(PhaseConfiguration::TwoArm),
            other => Err(format!("unknown phase configuration `{other}`")),
        }
    }
}

/// Which computation produced a QFI value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ComputationPath {
    ClosedForm,
    GeneratorVariance,
    FockOracle,
}

impl ComputationPath {
    pub fn as_str(&self) -> &'static str {
        match self {
            ComputationPath::ClosedForm => "closed",
            ComputationPath::GeneratorVariance => "gaussian",
            ComputationPath::FockOracle => "oracle",
        }
    }
}

impl fmt::Display for ComputationPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A QFI value tagged with how and for which configuration it was computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QfiResult {
    pub fisher: f64,
    pub config: PhaseConfiguration,
    pub path: ComputationPath,
}

impl QfiResult {
    pub fn new(fisher: f64, config: PhaseConfiguration, path: ComputationPath) -> Result<Self> {
        check_range(
            "fisher information",
            fisher,
            0.0,
            f64::INFINITY,
            "must be finite and >= 0",
        )?;
        Ok(Self {
            fisher,
            config,
            path,
        })
    }

    /// Phase uncertainty bound `1/√F`; undefined when `F = 0`.
    pub fn qcrb(&self) -> Result<f64> {
        qcrb(self.fisher)
    }
}

/// QFI of the pure post-NBS state for the given phase configuration,
/// as four times the variance of the phase generator.
pub fn qfi_from_state(state: &GaussianState, config: PhaseConfiguration) -> Result<QfiResult> {
    state.validate()?;
    let (_, nu_max) = state.symplectic_eigenvalues();
    if nu_max > 0.5 + state.eigenvalue_tolerance(PURITY_TOL) {
        return Err(Error::NotPure {
            max_eigenvalue: nu_max,
        });
    }
    let m = photon_moments(state)?;
    let fisher = match config {
        PhaseConfiguration::TwoArm => variance_of_sum(&m),
        PhaseConfiguration::UpperArm => 4.0 * m.var_a,
        PhaseConfiguration::LowerArm => 4.0 * m.var_b,
    };
    QfiResult::new(fisher.max(0.0), config, ComputationPath::GeneratorVariance)
}

fn non_negative(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, 0.0, f64::MAX, "must be finite and >= 0")
}

/// Two coherent inputs. Two-arm values carry the full phase dependence
/// through `θ_α + θ_β - θ_g`; single-arm values are the phase-matched
/// maxima (`θ_α + θ_β - θ_g = π`) and ignore the phase arguments.
pub fn closed_form_two_coherent(
    config: PhaseConfiguration,
    n_alpha: f64,
    n_beta: f64,
    theta_alpha: f64,
    theta_beta: f64,
    g: f64,
    theta_g: f64,
) -> Result<f64> {
    non_negative("N_alpha", n_alpha)?;
    non_negative("N_beta", n_beta)?;
    non_negative("g", g)?;
    for (name, phase) in [
        ("theta_alpha", theta_alpha),
        ("theta_beta", theta_beta),
        ("theta_g", theta_g),
    ] {
        check_finite(name, phase)?;
    }
    let n_sum = n_alpha + n_beta;
    let cross = 2.0 * (4.0 * g).sinh() * (n_alpha * n_beta).sqrt();
    let base = n_sum * (4.0 * g).cosh() + (2.0 * g).sinh().powi(2);
    let arm = 2.0 * (n_alpha - n_beta) * (2.0 * g).cosh();
    Ok(match config {
        PhaseConfiguration::TwoArm => {
            base + cross * (theta_alpha + theta_beta - theta_g - PI).cos()
        }
        PhaseConfiguration::UpperArm => base + cross + n_sum + arm,
        PhaseConfiguration::LowerArm => base + cross + n_sum - arm,
    })
}

/// Coherent light in `a`, squeezed vacuum in `b`. Two-arm values depend on
/// `Φ = θ_ς + 2θ_α - 2θ_g`; single-arm values are the `Φ = π` maxima.
pub fn closed_form_coherent_squeezed(
    config: PhaseConfiguration,
    n_alpha: f64,
    theta_alpha: f64,
    r: f64,
    theta_varsigma: f64,
    g: f64,
    theta_g: f64,
) -> Result<f64> {
    non_negative("N_alpha", n_alpha)?;
    non_negative("r", r)?;
    non_negative("g", g)?;
    for (name, phase) in [
        ("theta_alpha", theta_alpha),
        ("theta_varsigma", theta_varsigma),
        ("theta_g", theta_g),
    ] {
        check_finite(name, phase)?;
    }
    let big_phi = match config {
        PhaseConfiguration::TwoArm => theta_varsigma + 2.0 * theta_alpha - 2.0 * theta_g,
        _ => PI,
    };
    let (c2g, s2g) = ((2.0 * g).cosh(), (2.0 * g).sinh());
    let two_arm = c2g * c2g * ((2.0 * r).sinh().powi(2) / 2.0 + n_alpha)
        + s2g
            * s2g
            * (n_alpha * ((2.0 * r).cosh() - (2.0 * r).sinh() * big_phi.cos()) + r.cosh().powi(2));
    let squeeze_term = ((4.0 * r).cosh() - 1.0) / 4.0;
    Ok(match config {
        PhaseConfiguration::TwoArm => two_arm,
        PhaseConfiguration::UpperArm => {
            two_arm + n_alpha * (1.0 + 2.0 * c2g) - squeeze_term * (2.0 * c2g - 1.0)
        }
        PhaseConfiguration::LowerArm => {
            two_arm + n_alpha * (1.0 - 2.0 * c2g) + squeeze_term * (2.0 * c2g + 1.0)
        }
    })
}

/// Closed-form QFI for an arbitrary input, dispatching on its family.
pub fn closed_form(
    spec: &InputSpec,
    params: &NbsParams,
    config: PhaseConfiguration,
) -> Result<QfiResult> {
    let (g, theta_g) = (params.gain(), params.pump_phase());
    let fisher = match spec {
        InputSpec::TwoCoherent { alpha, beta } => closed_form_two_coherent(
            config,
            alpha.mean_photons(),
            beta.mean_photons(),
            alpha.phase(),
            beta.phase(),
            g,
            theta_g,
        )?,
        InputSpec::CoherentSqueezed { alpha, squeeze } => closed_form_coherent_squeezed(
            config,
            alpha.mean_photons(),
            alpha.phase(),
            squeeze.r(),
            squeeze.theta(),
            g,
            theta_g,
        )?,
    };
    QfiResult::new(fisher, config, ComputationPath::ClosedForm)
}

/// Input family of a phase-matched evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputFamily {
    TwoCoherent,
    CoherentSqueezed,
}

impl InputFamily {
    pub fn as_str(&self) -> &'static str {
        match self {
            InputFamily::TwoCoherent => "two-coherent",
            InputFamily::CoherentSqueezed => "coherent-squeezed",
        }
    }
}

impl FromStr for InputFamily {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "two-coherent" => Ok(InputFamily::TwoCoherent),
            "coherent-squeezed" => Ok(InputFamily::CoherentSqueezed),
            other => Err(format!("unknown input family `{other}`")),
        }
    }
}

/// Phase-matched maximal QFI of one configuration and input family.
///
/// `second` is `N_β` for two coherent inputs and the squeezing `r` for the
/// coherent ⊗ squeezed-vacuum input.
pub fn phase_matched_qfi(
    family: InputFamily,
    config: PhaseConfiguration,
    n_alpha: f64,
    second: f64,
    g: f64,
) -> Result<f64> {
    match family {
        InputFamily::TwoCoherent => {
            closed_form_two_coherent(config, n_alpha, second, PI, 0.0, g, 0.0)
        }
        InputFamily::CoherentSqueezed => {
            closed_form_coherent_squeezed(config, n_alpha, 0.0, second, PI, g, 0.0)
        }
    }
}

/// Quantum Cramér–Rao bound `1/√F`.
pub fn qcrb(fisher: f64) -> Result<f64> {
    if !(fisher > 0.0) || !fisher.is_finite() {
        return Err(Error::Domain {
            name: "fisher information",
            value: fisher,
            requirement: "must be positive and finite",
        });
    }
    Ok(1.0 / fisher.sqrt())
}

/// Hofmann's Heisenberg-type limit `1/√⟨N̂²⟩` with `N̂ = n̂_a + n̂_b`.
pub fn hofmann_limit(state: &GaussianState) -> Result<f64> {
    let n2 = expected_n_squared(&photon_moments(state)?);
    if !(n2 > 0.0) {
        return Err(Error::Domain {
            name: "<N^2>",
            value: n2,
            requirement: "must be positive (state has no photons)",
        });
    }
    Ok(1.0 / n2.sqrt())
}

/// Best two-arm QFI over two coherent inputs carrying `n_in` photons in
/// total: balanced split (`η = 1/2`) with matched phases.
pub fn optimal_two_coherent_qfi(n_in: f64, g: f64) -> Result<f64> {
    non_negative("N_in", n_in)?;
    non_negative("g", g)?;
    Ok(n_in * (4.0 * g).exp() + (2.0 * g).sinh().powi(2))
}

/// Best two-arm QFI over coherent ⊗ squeezed-vacuum inputs carrying `n_in`
/// photons: all photons in the squeezed vacuum (`η = 1`), `Φ = π`.
pub fn optimal_coherent_squeezed_qfi(n_in: f64, g: f64) -> Result<f64> {
    non_negative("N_in", n_in)?;
    non_negative("g", g)?;
    let (c, s) = ((2.0 * g).cosh(), (2.0 * g).sinh());
    Ok((1.0 + n_in) * (2.0 * n_in * c * c + s * s))
}
