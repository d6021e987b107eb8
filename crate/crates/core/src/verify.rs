//! Cross-validation of the three QFI paths and the algebraic identities
//! between the closed forms.

use std::f64::consts::{FRAC_PI_3, PI, TAU};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{evolve, phase_derivative_on, OracleOptions, DEFAULT_PHASE_STEP};
use crate::gaussian::{
    apply_nbs, prepare_input, ComplexAmplitude, GaussianState, InputSpec, NbsParams, SqueezeParams,
};
use crate::moments::{expected_n_squared, photon_moments, PhotonMoments};
use crate::qfi::{
    closed_form, closed_form_coherent_squeezed, closed_form_two_coherent, qfi_from_state,
    PhaseConfiguration,
};

pub const CLOSED_VS_GAUSSIAN_TOL: f64 = 1e-10;
pub const CLOSED_VS_ORACLE_TOL: f64 = 1e-6;
pub const MOMENTS_TOL: f64 = 1e-7;
pub const PHASE_LOCK_TOL: f64 = 1e-6;
pub const IDENTITY_TOL: f64 = 1e-12;
pub const FINITE_DIFFERENCE_TOL: f64 = 1e-4;
pub const PHASE_DIFFERENCE_TOL: f64 = 1e-6;
pub const PURITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Grid {
    Small,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub grid: Grid,
    pub max_cutoff: usize,
    /// Mutation check: feed `-θ_g` to the Gaussian and Fock paths so the
    /// phase-convention checks must fail.
    pub flip_theta_g: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid: Grid::Full,
            max_cutoff: OracleOptions::default().max_cutoff,
            flip_theta_g: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub evaluated: usize,
    pub failures: Vec<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Relative difference with a tiny absolute floor for exact zeros.
pub fn rel_diff(value: f64, reference: f64) -> f64 {
    (value - reference).abs() / reference.abs().max(1e-12)
}

/// An interferometer configuration on the test grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub spec: InputSpec,
    pub params: NbsParams,
}

impl GridPoint {
    /// Two coherent inputs with `θ_β` chosen so `θ_α + θ_β - θ_g = π`.
    pub fn two_coherent(
        n_alpha: f64,
        n_beta: f64,
        theta_alpha: f64,
        theta_g: f64,
        g: f64,
    ) -> Result<Self> {
        Ok(Self {
            spec: InputSpec::TwoCoherent {
                alpha: ComplexAmplitude::from_mean_photons(n_alpha, theta_alpha)?,
                beta: ComplexAmplitude::from_mean_photons(n_beta, PI + theta_g - theta_alpha)?,
            },
            params: NbsParams::new(g, theta_g)?,
        })
    }

    /// Coherent ⊗ squeezed vacuum with `θ_ς` chosen so `Φ = π`.
    pub fn coherent_squeezed(
        n_alpha: f64,
        r: f64,
        theta_alpha: f64,
        theta_g: f64,
        g: f64,
    ) -> Result<Self> {
        Ok(Self {
            spec: InputSpec::CoherentSqueezed {
                alpha: ComplexAmplitude::from_mean_photons(n_alpha, theta_alpha)?,
                squeeze: SqueezeParams::new(r, PI - 2.0 * theta_alpha + 2.0 * theta_g)?,
            },
            params: NbsParams::new(g, theta_g)?,
        })
    }

    /// Parameters actually handed to the state-based paths.
    fn route_params(&self, flip: bool) -> NbsParams {
        if flip {
            NbsParams::new(self.params.gain(), -self.params.pump_phase()).expect("valid gain")
        } else {
            self.params
        }
    }

    pub fn gaussian_state(&self) -> GaussianState {
        apply_nbs(&prepare_input(&self.spec), &self.params)
    }

    pub fn label(&self) -> String {
        let g = self.params.gain();
        let tg = self.params.pump_phase();
        match self.spec {
            InputSpec::TwoCoherent { alpha, beta } => format!(
                "coh&coh Na={} Nb={} th_a={:.4} th_b={:.4} g={g} th_g={tg:.4}",
                alpha.mean_photons(),
                beta.mean_photons(),
                alpha.phase(),
                beta.phase()
            ),
            InputSpec::CoherentSqueezed { alpha, squeeze } => format!(
                "coh&squ Na={} r={} th_a={:.4} th_s={:.4} g={g} th_g={tg:.4}",
                alpha.mean_photons(),
                squeeze.r(),
                alpha.phase(),
                squeeze.theta()
            ),
        }
    }
}

struct GridSpec {
    gains: &'static [f64],
    photons: &'static [f64],
    squeezings: &'static [f64],
}

const PHASES: [f64; 3] = [0.0, FRAC_PI_3, PI];

fn grid_spec(grid: Grid) -> GridSpec {
    match grid {
        Grid::Small => GridSpec {
            gains: &[0.2, 0.5],
            photons: &[0.0, 1.0],
            squeezings: &[0.0, 0.5],
        },
        Grid::Full => GridSpec {
            gains: &[0.2, 0.5, 1.0],
            photons: &[0.0, 1.0, 4.0],
            squeezings: &[0.0, 0.5, 1.0],
        },
    }
}

/// Phase-matched points with every `(θ_α, θ_g)` pair from `{0, π/3, π}`.
pub fn phase_product_points(grid: Grid) -> Vec<GridPoint> {
    let gs = grid_spec(grid);
    let mut points = Vec::new();
    for &g in gs.gains {
        for &ta in &PHASES {
            for &tg in &PHASES {
                for &na in gs.photons {
                    for &nb in gs.photons {
                        points.push(GridPoint::two_coherent(na, nb, ta, tg, g).unwrap());
                    }
                    for &r in gs.squeezings {
                        points.push(GridPoint::coherent_squeezed(na, r, ta, tg, g).unwrap());
                    }
                }
            }
        }
    }
    points
}

/// Points for the Fock oracle: the photon/squeezing/gain product, with the
/// phase pair cycling through `{0, π/3, π}²` across points.
pub fn oracle_points(grid: Grid) -> Vec<GridPoint> {
    let gs = grid_spec(grid);
    let mut points = Vec::new();
    let mut cycle = 0usize;
    let mut next_phases = || {
        let p = (PHASES[cycle % 3], PHASES[(cycle / 3) % 3]);
        cycle += 1;
        p
    };
    for &g in gs.gains {
        for &na in gs.photons {
            for &nb in gs.photons {
                let (ta, tg) = next_phases();
                points.push(GridPoint::two_coherent(na, nb, ta, tg, g).unwrap());
            }
            for &r in gs.squeezings {
                let (ta, tg) = next_phases();
                points.push(GridPoint::coherent_squeezed(na, r, ta, tg, g).unwrap());
            }
        }
    }
    points
}

fn moments_fields(m: &PhotonMoments) -> [(&'static str, f64); 5] {
    [
        ("mean_a", m.mean_a),
        ("mean_b", m.mean_b),
        ("var_a", m.var_a),
        ("var_b", m.var_b),
        ("cov_ab", m.cov_ab),
    ]
}

fn check_closed_vs_gaussian(points: &[GridPoint], flip: bool) -> Result<Vec<Check>> {
    // (agreement, purity, hofmann) failures per point
    type Failures = (Vec<String>, Vec<String>, Vec<String>);
    let per_point: Vec<Result<Failures>> = points
        .par_iter()
        .map(|pt| {
            let state = apply_nbs(&prepare_input(&pt.spec), &pt.route_params(flip));
            let mut agree = Vec::new();
            for config in PhaseConfiguration::ALL {
                let cf = closed_form(&pt.spec, &pt.params, config)?.fisher;
                let gv = qfi_from_state(&state, config)?.fisher;
                let d = rel_diff(gv, cf);
                if !(d <= CLOSED_VS_GAUSSIAN_TOL) {
                    agree.push(format!(
                        "{} [{config}]: closed {cf} gaussian {gv} rel {d:e}",
                        pt.label()
                    ));
                }
            }
            let (lo, hi) = state.symplectic_eigenvalues();
            let mut purity = Vec::new();
            if (lo - 0.5).abs() > PURITY_TOL || (hi - 0.5).abs() > PURITY_TOL {
                purity.push(format!(
                    "{}: symplectic eigenvalues ({lo}, {hi})",
                    pt.label()
                ));
            }
            let m = photon_moments(&state)?;
            let f_two = qfi_from_state(&state, PhaseConfiguration::TwoArm)?.fisher;
            let n2 = expected_n_squared(&m);
            let mut hofmann = Vec::new();
            if f_two > n2 {
                hofmann.push(format!("{}: F_T {f_two} > <N^2> {n2}", pt.label()));
            }
            Ok((agree, purity, hofmann))
        })
        .collect();
    let mut agree = Vec::new();
    let mut purity = Vec::new();
    let mut hofmann = Vec::new();
    for r in per_point {
        let (a, p, h) = r?;
        agree.extend(a);
        purity.extend(p);
        hofmann.extend(h);
    }
    let n = points.len();
    Ok(vec![
        Check {
            name: "closed form vs gaussian generator variance (1e-10 rel)",
            evaluated: 3 * n,
            failures: agree,
        },
        Check {
            name: "purity: symplectic eigenvalues 1/2 (1e-9)",
            evaluated: n,
            failures: purity,
        },
        Check {
            name: "hofmann dominance F_T <= <N^2>",
            evaluated: n,
            failures: hofmann,
        },
    ])
}

struct OracleOutcome {
    qfi: Vec<String>,
    moments: Vec<String>,
    finite_difference: Vec<String>,
}

fn check_oracle_point(
    pt: &GridPoint,
    opts: &OracleOptions,
    flip: bool,
    with_fd: bool,
) -> Result<OracleOutcome> {
    let params = pt.route_params(flip);
    let oracle = evolve(&pt.spec, &params, opts)?;
    let mut out = OracleOutcome {
        qfi: Vec::new(),
        moments: Vec::new(),
        finite_difference: Vec::new(),
    };
    for config in PhaseConfiguration::ALL {
        let cf = closed_form(&pt.spec, &pt.params, config)?.fisher;
        let of = oracle.qfi(config);
        let d = rel_diff(of, cf);
        if !(d <= CLOSED_VS_ORACLE_TOL) {
            out.qfi.push(format!(
                "{} [{config}]: closed {cf} oracle {of} rel {d:e}",
                pt.label()
            ));
        }
    }
    let gauss = photon_moments(&apply_nbs(&prepare_input(&pt.spec), &params))?;
    let fock = oracle.photon_moments();
    for ((name, g), (_, f)) in moments_fields(&gauss)
        .into_iter()
        .zip(moments_fields(&fock))
    {
        // cov_ab can vanish; compare it on the scale of the variances
        let scale = if name == "cov_ab" {
            (gauss.var_a * gauss.var_b).sqrt()
        } else {
            g.abs()
        };
        let d = (f - g).abs() / scale.max(1e-12);
        if !(d <= MOMENTS_TOL) {
            out.moments.push(format!(
                "{}: {name} gaussian {g} oracle {f} rel {d:e}",
                pt.label()
            ));
        }
    }
    if with_fd {
        let reference = oracle.qfi(PhaseConfiguration::TwoArm);
        let fd = phase_derivative_on(&oracle.tensor, 0.3, 0.2, DEFAULT_PHASE_STEP)?;
        let fd_shifted = phase_derivative_on(&oracle.tensor, 0.9, -0.4, DEFAULT_PHASE_STEP)?;
        let d = rel_diff(fd, reference);
        if !(d <= FINITE_DIFFERENCE_TOL) {
            out.finite_difference.push(format!(
                "{}: finite difference {fd} oracle {reference} rel {d:e}",
                pt.label()
            ));
        }
        let dd = rel_diff(fd_shifted, fd);
        if !(dd <= PHASE_DIFFERENCE_TOL) {
            out.finite_difference
                .push(format!("{}: phi1-phi2 dependence rel {dd:e}", pt.label()));
        }
    }
    Ok(out)
}

fn check_oracle(points: &[GridPoint], opts: &OracleOptions, flip: bool) -> Result<Vec<Check>> {
    // finite differences on every third point keep the run short
    let outcomes: Vec<Result<OracleOutcome>> = points
        .par_iter()
        .enumerate()
        .map(|(i, pt)| check_oracle_point(pt, opts, flip, i % 3 == 0))
        .collect();
    let (mut qfi, mut moments, mut fd) = (Vec::new(), Vec::new(), Vec::new());
    for o in outcomes {
        let o = o?;
        qfi.extend(o.qfi);
        moments.extend(o.moments);
        fd.extend(o.finite_difference);
    }
    let n = points.len();
    Ok(vec![
        Check {
            name: "closed form vs fock oracle (1e-6 rel)",
            evaluated: 3 * n,
            failures: qfi,
        },
        Check {
            name: "photon moments gaussian vs fock oracle (1e-7 rel)",
            evaluated: 5 * n,
            failures: moments,
        },
        Check {
            name: "finite-difference generator check (1e-4 rel, phi1-phi2 1e-6)",
            evaluated: n.div_ceil(3),
            failures: fd,
        },
    ])
}

/// Scans `f` on `samples` equally spaced points of `[0, 2π)` and returns
/// the argmax.
pub fn scan_argmax(samples: usize, f: impl Fn(f64) -> f64) -> f64 {
    (0..samples)
        .map(|k| TAU * k as f64 / samples as f64)
        .map(|x| (x, f(x)))
        .fold((0.0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        })
        .0
}

/// Oracle two-arm QFI at 16 values of θ_α (θ_β = 0.7, θ_g = 0.4, g = 0.5,
/// N_α = N_β = 1) against the `cos(θ_α + θ_β - θ_g - π)` dependence, plus
/// the location of the phase maxima of both two-arm closed forms.
///
/// θ_β and θ_g are nonzero so that the cross term is not even in θ_g and
/// a sign error in the pump phase shows up.
fn check_phase_lock(opts: &OracleOptions, flip: bool) -> Result<Check> {
    let (g, theta_beta, theta_g) = (0.5, 0.7, 0.4);
    let samples: Vec<Result<Option<String>>> = (0..16)
        .into_par_iter()
        .map(|k| {
            let theta_alpha = TAU * k as f64 / 16.0;
            let spec = InputSpec::TwoCoherent {
                alpha: ComplexAmplitude::new(1.0, theta_alpha)?,
                beta: ComplexAmplitude::new(1.0, theta_beta)?,
            };
            let routed = NbsParams::new(g, if flip { -theta_g } else { theta_g })?;
            let of = evolve(&spec, &routed, opts)?.qfi(PhaseConfiguration::TwoArm);
            let cf = closed_form_two_coherent(
                PhaseConfiguration::TwoArm,
                1.0,
                1.0,
                theta_alpha,
                theta_beta,
                g,
                theta_g,
            )?;
            let d = rel_diff(of, cf);
            Ok((!(d <= PHASE_LOCK_TOL))
                .then(|| format!("theta_a={theta_alpha:.4}: oracle {of} closed {cf} rel {d:e}")))
        })
        .collect();
    let mut failures = Vec::new();
    for s in samples {
        failures.extend(s?);
    }
    let step = TAU / 64.0;
    let coh_peak = scan_argmax(64, |d| {
        closed_form_two_coherent(PhaseConfiguration::TwoArm, 2.0, 3.0, d, 0.0, 0.7, 0.0).unwrap()
    });
    let squ_peak = scan_argmax(64, |phi| {
        closed_form_coherent_squeezed(PhaseConfiguration::TwoArm, 2.0, 0.0, 0.6, phi, 0.7, 0.0)
            .unwrap()
    });
    for (name, peak) in [("theta sum", coh_peak), ("Phi", squ_peak)] {
        if (peak - PI).abs() > step {
            failures.push(format!("{name} maximum at {peak}, expected pi"));
        }
    }
    Ok(Check {
        name: "phase lock: oracle reproduces cos(th_a+th_b-th_g-pi) (1e-6 rel), maxima at pi",
        evaluated: 18,
        failures,
    })
}

fn push_if(failures: &mut Vec<String>, value: f64, reference: f64, tol: f64, what: String) {
    let d = rel_diff(value, reference);
    if !(d <= tol) {
        failures.push(format!("{what}: {value} vs {reference} rel {d:e}"));
    }
}

/// Same as [`push_if`] but relative to `scale`, for differences of large
/// QFI values where the cancellation floor is set by the values themselves.
fn push_if_scaled(
    failures: &mut Vec<String>,
    value: f64,
    reference: f64,
    scale: f64,
    tol: f64,
    what: String,
) {
    let d = (value - reference).abs() / scale.abs().max(1e-12);
    if !(d <= tol) {
        failures.push(format!("{what}: {value} vs {reference} rel {d:e}"));
    }
}

fn check_reductions() -> Result<Check> {
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for &g in &[0.2, 0.5, 1.0, 1.5] {
        for config in PhaseConfiguration::ALL {
            for &na in &[0.0, 1.0, 4.0, 25.0] {
                let sq = closed_form_coherent_squeezed(config, na, 0.0, 0.0, PI, g, 0.0)?;
                let coh = closed_form_two_coherent(config, na, 0.0, PI, 0.0, g, 0.0)?;
                push_if(
                    &mut failures,
                    sq,
                    coh,
                    IDENTITY_TOL,
                    format!("r=0 {config} Na={na} g={g}"),
                );
                evaluated += 1;
            }
            let vac = (2.0 * g).sinh().powi(2);
            let c1 = closed_form_two_coherent(config, 0.0, 0.0, PI, 0.0, g, 0.0)?;
            let c2 = closed_form_coherent_squeezed(config, 0.0, 0.0, 0.0, PI, g, 0.0)?;
            push_if(
                &mut failures,
                c1,
                vac,
                IDENTITY_TOL,
                format!("vacuum coh {config} g={g}"),
            );
            push_if(
                &mut failures,
                c2,
                vac,
                IDENTITY_TOL,
                format!("vacuum squ {config} g={g}"),
            );
            evaluated += 2;
        }
    }
    for &(na, nb) in &[(0.0, 0.0), (1.0, 1.0), (4.0, 0.5), (30.0, 7.0)] {
        for &phase in &[0.0, 1.0, PI] {
            let f =
                closed_form_two_coherent(PhaseConfiguration::TwoArm, na, nb, phase, 0.3, 0.0, 0.0)?;
            push_if(
                &mut failures,
                f,
                na + nb,
                IDENTITY_TOL,
                format!("g=0 Na={na} Nb={nb}"),
            );
            evaluated += 1;
        }
    }
    Ok(Check {
        name: "reduction identities (1e-12 rel)",
        evaluated,
        failures,
    })
}

/// Checks the single-arm minus two-arm differences of the phase-matched
/// closed forms, and the arm swap symmetry.
pub fn arm_difference_failures(n_alpha: f64, n_beta: f64, r: f64, g: f64) -> Result<Vec<String>> {
    use PhaseConfiguration::*;
    let mut failures = Vec::new();
    let (c2g, n_sum, n_diff) = ((2.0 * g).cosh(), n_alpha + n_beta, n_alpha - n_beta);
    let coh = |c| closed_form_two_coherent(c, n_alpha, n_beta, PI, 0.0, g, 0.0);
    let (two, upper, lower) = (coh(TwoArm)?, coh(UpperArm)?, coh(LowerArm)?);
    let label = format!("Na={n_alpha} Nb={n_beta} r={r} g={g}");
    let scale = two.max(upper).max(lower);
    push_if_scaled(
        &mut failures,
        upper - two,
        n_sum + 2.0 * n_diff * c2g,
        scale,
        IDENTITY_TOL,
        format!("coh upper {label}"),
    );
    push_if_scaled(
        &mut failures,
        lower - two,
        n_sum - 2.0 * n_diff * c2g,
        scale,
        IDENTITY_TOL,
        format!("coh lower {label}"),
    );

    let squ = |c| closed_form_coherent_squeezed(c, n_alpha, 0.0, r, PI, g, 0.0);
    let (two_s, upper_s, lower_s) = (squ(TwoArm)?, squ(UpperArm)?, squ(LowerArm)?);
    let scale = two_s.max(upper_s).max(lower_s);
    let sq_term = ((4.0 * r).cosh() - 1.0) / 4.0;
    push_if_scaled(
        &mut failures,
        upper_s - two_s,
        n_alpha * (1.0 + 2.0 * c2g) - sq_term * (2.0 * c2g - 1.0),
        scale,
        IDENTITY_TOL,
        format!("squ upper {label}"),
    );
    push_if_scaled(
        &mut failures,
        lower_s - two_s,
        n_alpha * (1.0 - 2.0 * c2g) + sq_term * (2.0 * c2g + 1.0),
        scale,
        IDENTITY_TOL,
        format!("squ lower {label}"),
    );
    // swapping (N_α, upper) with (N_β, lower) leaves the cells unchanged
    let swapped = closed_form_two_coherent(LowerArm, n_beta, n_alpha, PI, 0.0, g, 0.0)?;
    push_if(
        &mut failures,
        swapped,
        upper,
        IDENTITY_TOL,
        format!("swap {label}"),
    );
    Ok(failures)
}

fn check_arm_differences() -> Result<Check> {
    let mut failures = Vec::new();
    let mut evaluated = 0;
    for &g in &[0.1, 0.7, 1.5, 2.0] {
        for &(na, nb) in &[(0.0, 3.0), (2.0, 2.0), (17.0, 1.5), (50.0, 33.0)] {
            for &r in &[0.0, 0.4, 1.3, 2.0] {
                failures.extend(arm_difference_failures(na, nb, r, g)?);
                evaluated += 5;
            }
        }
    }
    Ok(Check {
        name: "arm-difference and swap identities (1e-12 rel)",
        evaluated,
        failures,
    })
}

/// Runs every check. Fails only when the oracle cannot reach an admissible
/// cutoff within `max_cutoff`; tolerance violations are reported in the
/// returned report.
pub fn run(opts: &VerifyOptions) -> Result<VerifyReport> {
    let oracle_opts = OracleOptions {
        max_cutoff: opts.max_cutoff,
        ..OracleOptions::default()
    };
    let mut checks = Vec::new();
    checks.extend(check_oracle(
        &oracle_points(opts.grid),
        &oracle_opts,
        opts.flip_theta_g,
    )?);
    checks.push(check_phase_lock(&oracle_opts, opts.flip_theta_g)?);
    checks.extend(check_closed_vs_gaussian(
        &phase_product_points(opts.grid),
        opts.flip_theta_g,
    )?);
    checks.push(check_reductions()?);
    checks.push(check_arm_differences()?);
    Ok(VerifyReport { checks })
}
