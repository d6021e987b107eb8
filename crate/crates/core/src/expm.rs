//! Action of the exponential of a sparse anti-Hermitian operator on a
//! vector, `exp(G) v`, by time stepping with truncated Taylor series.
//!
//! The step length is chosen from the growth rate of `G` on the current
//! vector, `ρ = max(‖Gv‖/‖v‖, (‖G²v‖/‖v‖)^{1/2})`, so a state living in the
//! low-photon corner of a large truncated basis is not penalized for the
//! operator norm of the whole basis. Each step sums Taylor terms until
//! they drop below `TERM_TOL` relative to the partial sum; a step that
//! fails to converge within `MAX_TERMS` is retried at half length.

use num_complex::Complex64;

const STEP_SCALE: f64 = 2.0;
const TERM_TOL: f64 = 1e-17;
const MAX_TERMS: usize = 60;

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [Complex64], a: f64, x: &[Complex64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += xi * a;
    }
}

/// Computes `exp(G) v`, where `apply(x, out)` writes `G x` into `out`.
pub(crate) fn expm_action<F>(apply: F, v: &[Complex64]) -> Vec<Complex64>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    let n = v.len();
    let mut current = v.to_vec();
    let mut g1 = vec![Complex64::default(); n];
    let mut g2 = vec![Complex64::default(); n];
    let mut term = vec![Complex64::default(); n];
    let mut scratch = vec![Complex64::default(); n];
    let mut remaining = 1.0_f64;

    while remaining > 0.0 {
        let v_norm = norm(&current);
        if v_norm == 0.0 {
            break;
        }
        apply(&current, &mut g1);
        apply(&g1, &mut g2);
        let rho = (norm(&g1) / v_norm).max((norm(&g2) / v_norm).sqrt());
        if rho == 0.0 {
            break;
        }
        let mut h = remaining.min(STEP_SCALE / rho);

        let next = loop {
            let mut sum = current.clone();
            axpy(&mut sum, h, &g1);
            axpy(&mut sum, h * h / 2.0, &g2);
            term.copy_from_slice(&g2);
            let mut coeff = h * h / 2.0;
            let mut converged = false;
            for k in 3..=MAX_TERMS {
                apply(&term, &mut scratch);
                std::mem::swap(&mut term, &mut scratch);
                coeff *= h / k as f64;
                axpy(&mut sum, coeff, &term);
                if coeff * norm(&term) <= TERM_TOL * norm(&sum) {
                    converged = true;
                    break;
                }
            }
            if converged {
                break sum;
            }
            h /= 2.0;
        };
        current = next;
        remaining -= h;
        if remaining < 1e-15 {
            remaining = 0.0;
        }
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;

    // Rotation generator on C²: exp(t [[0, -1], [1, 0]]) v.
    #[test]
    fn rotation_generator() {
        let t = 7.3;
        let apply = |x: &[Complex64], out: &mut [Complex64]| {
            out[0] = -x[1] * t;
            out[1] = x[0] * t;
        };
        let v = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        let out = expm_action(apply, &v);
        assert!((out[0].re - t.cos()).abs() < 1e-13);
        assert!((out[1].re - t.sin()).abs() < 1e-13);
    }

    #[test]
    fn zero_generator_is_identity() {
        let v = vec![Complex64::new(0.3, -0.2), Complex64::new(1.0, 0.5)];
        let out = expm_action(|_, o: &mut [Complex64]| o.fill(Complex64::default()), &v);
        assert_eq!(out, v);
    }

    #[test]
    fn phase_generator() {
        // diagonal i·diag(0, 1, ..., 39) times 3: exp gives e^{3ik}
        let apply = |x: &[Complex64], out: &mut [Complex64]| {
            for (k, (o, xi)) in out.iter_mut().zip(x).enumerate() {
                *o = xi * Complex64::new(0.0, 3.0 * k as f64);
            }
        };
        let v = vec![Complex64::new(1.0, 0.0); 40];
        let out = expm_action(apply, &v);
        for (k, z) in out.iter().enumerate() {
            let expected = Complex64::from_polar(1.0, 3.0 * k as f64);
            assert!((z - expected).norm() < 1e-12, "k={k}: {z} vs {expected}");
        }
    }
}
