//! Closed-form parameter sweeps: QCRB against the input photon fraction η
//! at fixed total photon number, and optimal QFIs against the total input
//! photon number.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::gaussian::{
    apply_nbs, prepare_input, ComplexAmplitude, InputSpec, NbsParams, SqueezeParams,
};
use crate::moments::{expected_n_squared, photon_moments};
use crate::qfi::{
    optimal_coherent_squeezed_qfi, optimal_two_coherent_qfi, phase_matched_qfi, qcrb, InputFamily,
    PhaseConfiguration,
};

/// One η grid point with phase-matched inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaRow {
    pub eta: f64,
    pub qfi_upper: f64,
    pub qfi_lower: f64,
    pub qfi_two_arm: f64,
    pub qcrb_upper: f64,
    pub qcrb_lower: f64,
    pub qcrb_two_arm: f64,
}

/// One total-photon-number grid point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NinRow {
    pub n_in: f64,
    pub qfi_opt_two_coherent: f64,
    pub qfi_opt_coherent_squeezed: f64,
    /// `⟨N̂²⟩` of the post-squeezer state for the optimal
    /// coherent ⊗ squeezed-vacuum input (all photons squeezed).
    pub hofmann_n2: f64,
}

fn check_points(points: usize) -> Result<usize> {
    if points < 2 {
        return Err(Error::Domain {
            name: "points",
            value: points as f64,
            requirement: "need at least 2 grid points",
        });
    }
    Ok(points)
}

/// Splits `n_in` as `(n_in (1-η), n_in η)` with `η = k/(points-1)`.
///
/// Both parts use integer numerators so that the split at `k` and at
/// `points-1-k` are exact mirror images.
fn split(n_in: f64, k: usize, points: usize) -> (f64, f64, f64) {
    let last = (points - 1) as f64;
    let eta = k as f64 / last;
    let n_a = n_in * (points - 1 - k) as f64 / last;
    let n_b = n_in * k as f64 / last;
    (eta, n_a, n_b)
}

fn eta_row(family: InputFamily, n_in: f64, g: f64, k: usize, points: usize) -> Result<EtaRow> {
    let (eta, n_a, n_b) = split(n_in, k, points);
    let second = match family {
        InputFamily::TwoCoherent => n_b,
        InputFamily::CoherentSqueezed => n_b.sqrt().asinh(),
    };
    let qfi = |config| phase_matched_qfi(family, config, n_a, second, g);
    let qfi_upper = qfi(PhaseConfiguration::UpperArm)?;
    let qfi_lower = qfi(PhaseConfiguration::LowerArm)?;
    let qfi_two_arm = qfi(PhaseConfiguration::TwoArm)?;
    Ok(EtaRow {
        eta,
        qfi_upper,
        qfi_lower,
        qfi_two_arm,
        qcrb_upper: qcrb(qfi_upper)?,
        qcrb_lower: qcrb(qfi_lower)?,
        qcrb_two_arm: qcrb(qfi_two_arm)?,
    })
}

/// QCRB of the three phase configurations on `points` equally spaced
/// values of `η ∈ [0, 1]`, at the optimal input phases.
///
/// For two coherent inputs `N_α = (1-η) N_in`, `N_β = η N_in`; for
/// coherent ⊗ squeezed vacuum `N_α = (1-η) N_in`, `sinh² r = η N_in`.
pub fn sweep_eta(family: InputFamily, n_in: f64, g: f64, points: usize) -> Result<Vec<EtaRow>> {
    check_range("N_in", n_in, 0.0, f64::MAX, "must be finite and >= 0")?;
    check_range(
        "g",
        g,
        0.0,
        crate::gaussian::MAX_SQUEEZING,
        "must lie in [0, 20]",
    )?;
    let points = check_points(points)?;
    (0..points)
        .into_par_iter()
        .map(|k| eta_row(family, n_in, g, k, points))
        .collect()
}

/// `⟨N̂²⟩` after the squeezer for the squeezed-vacuum-only input with
/// `n_in` photons, from the Gaussian number moments.
pub fn optimal_squeezed_n_squared(n_in: f64, g: f64) -> Result<f64> {
    let spec = InputSpec::CoherentSqueezed {
        alpha: ComplexAmplitude::zero(),
        squeeze: SqueezeParams::from_mean_photons(n_in, std::f64::consts::PI)?,
    };
    let state = apply_nbs(&prepare_input(&spec), &NbsParams::new(g, 0.0)?);
    Ok(expected_n_squared(&photon_moments(&state)?))
}

/// Optimal two-arm QFIs of both input families, and the Hofmann `⟨N̂²⟩`,
/// on `points` equally spaced values of `N_in ∈ [0, n_max]`.
pub fn sweep_nin(g: f64, n_max: f64, points: usize) -> Result<Vec<NinRow>> {
    check_range(
        "g",
        g,
        0.0,
        crate::gaussian::MAX_SQUEEZING,
        "must lie in [0, 20]",
    )?;
    if !(n_max > 0.0) || !n_max.is_finite() {
        return Err(Error::Domain {
            name: "n_max",
            value: n_max,
            requirement: "must be positive and finite",
        });
    }
    let points = check_points(points)?;
    let last = (points - 1) as f64;
    (0..points)
        .into_par_iter()
        .map(|k| {
            let n_in = n_max * k as f64 / last;
            Ok(NinRow {
                n_in,
                qfi_opt_two_coherent: optimal_two_coherent_qfi(n_in, g)?,
                qfi_opt_coherent_squeezed: optimal_coherent_squeezed_qfi(n_in, g)?,
                hofmann_n2: optimal_squeezed_n_squared(n_in, g)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eta_grid_contains_endpoints_and_half() {
        let rows = sweep_eta(InputFamily::TwoCoherent, 200.0, 1.5, 201).unwrap();
        assert_eq!(rows.len(), 201);
        assert_eq!(rows[0].eta, 0.0);
        assert_eq!(rows[100].eta, 0.5);
        assert_eq!(rows[200].eta, 1.0);
        assert!(rows.windows(2).all(|w| w[0].eta < w[1].eta));
    }

    #[test]
    fn two_coherent_columns_mirror() {
        let rows = sweep_eta(InputFamily::TwoCoherent, 37.0, 0.9, 57).unwrap();
        for (k, row) in rows.iter().enumerate() {
            assert_eq!(row.qcrb_upper, rows[rows.len() - 1 - k].qcrb_lower);
        }
    }

    #[test]
    fn squeezed_sweep_endpoint() {
        let rows = sweep_eta(InputFamily::CoherentSqueezed, 200.0, 1.5, 201).unwrap();
        let last = rows.last().unwrap();
        let expected = optimal_coherent_squeezed_qfi(200.0, 1.5).unwrap();
        assert!((last.qfi_two_arm - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn nin_sweep_vacuum_row() {
        let rows = sweep_nin(1.5, 200.0, 11).unwrap();
        let s = 3f64.sinh().powi(2);
        assert_eq!(rows[0].n_in, 0.0);
        assert!((rows[0].qfi_opt_two_coherent - s).abs() < 1e-12 * s);
        assert!((rows[0].qfi_opt_coherent_squeezed - s).abs() < 1e-12 * s);
        assert_eq!(rows[10].n_in, 200.0);
    }

    #[test]
    fn sweep_usage_errors() {
        assert!(sweep_eta(InputFamily::TwoCoherent, -1.0, 1.5, 10).is_err());
        assert!(sweep_eta(InputFamily::TwoCoherent, 10.0, 1.5, 1).is_err());
        assert!(sweep_nin(1.5, 200.0, 1).is_err());
        assert!(sweep_nin(1.5, -3.0, 10).is_err());
    }
}
