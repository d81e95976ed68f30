//! The transcendental characteristic equation of the delayed slow flow, its
//! perturbation-series Hopf solution in powers of `eps`, and a Newton
//! refinement that pins pure-imaginary roots exactly.
//!
//! Everything here concerns the antisymmetric channel (`beta = -1`); the
//! symmetric channel has no Hopf bifurcation to locate.

use num_complex::Complex;
use thiserror::Error;

use crate::model::{ModeSign, Params};
use crate::real::{cst, Real};

/// Lower edge of the series domain, `sqrt(2)/3`, where the Hopf frequency of
/// the delay-free approximation reaches zero.
pub fn alpha_min<F: Real>() -> F {
    cst::<F>(2.0).sqrt() / cst::<F>(3.0)
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("characteristic equation is only derived for the antisymmetric channel (beta = -1)")]
    UnsupportedMode,
    #[error("series coefficients require alpha >= sqrt(2)/3, got alpha = {alpha}")]
    OutOfDomain { alpha: f64 },
    #[error("series truncation must keep 1, 2 or 3 terms, got {n_terms}")]
    InvalidTruncation { n_terms: usize },
    #[error("Newton seed is not finite: (T, Omega) = ({delay}, {omega})")]
    NonFiniteSeed { delay: f64, omega: f64 },
    #[error("seed frequency |Omega| = {omega:.3e} < 1e-6: zero-eigenvalue point, not a Hopf")]
    DegenerateHopf { omega: f64 },
    #[error("Newton did not reach tolerance after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("Jacobian is singular (|det| = {det:.3e} < 1e-14)")]
    SingularJacobian { det: f64 },
}

/// Left-hand side of the characteristic equation for exponential solutions
/// `(A, B) ~ e^(lambda eta)` of the delayed slow flow, with
/// `E = exp(-eps T lambda)`.
pub fn char_eq<F: Real>(
    lambda: Complex<F>,
    p: &Params<F>,
) -> Result<Complex<F>, SpectralError> {
    if p.beta != ModeSign::Antisymmetric {
        return Err(SpectralError::UnsupportedMode);
    }
    Ok(char_eq_raw(lambda, p.alpha, p.delay, p.eps))
}

/// `char_eq` without parameter validation; also used by the Newton iteration
/// where intermediate iterates may wander outside the `Params` domain.
fn char_eq_raw<F: Real>(lambda: Complex<F>, alpha: F, delay: F, eps: F) -> Complex<F> {
    let (s, c) = delay.sin_cos();
    let half = cst::<F>(0.5);
    let a2 = alpha * alpha;
    let half_sin_sq = a2 * s * s * half;
    let half_cos = alpha * c * half;
    let e = (lambda * (-eps * delay)).exp();
    let delayed =
        e * (lambda * (alpha * c) + (a2 + half_cos - half_sin_sq)) + e * e * (a2 * cst(0.25));
    let instantaneous = lambda * lambda
        + lambda * (F::one() + cst::<F>(2.0) * alpha * c)
        + (a2 * cst::<F>(0.75) + half_cos - half_sin_sq);
    delayed + instantaneous
}

/// `|char_eq(i Omega)|` at the antisymmetric channel: the quantity a Hopf
/// point drives to zero.
pub fn hopf_residual<F: Real>(alpha: F, eps: F, delay: F, omega: F) -> F {
    char_eq_raw(Complex::new(F::zero(), omega), alpha, delay, eps).norm()
}

/// Coefficients of the delay and frequency series
/// `T = T0 + eps T1 + eps^2 T2`, `Omega = Omega0 + eps Omega1 + eps^2 Omega2`.
///
/// At the degenerate corner `alpha = sqrt(2)/3` exactly, `Omega0 = 0` and the
/// higher frequency coefficients diverge (returned as infinities); the delay
/// coefficients stay finite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesCoeffs<F> {
    pub t0: F,
    pub t1: F,
    pub t2: F,
    pub omega0: F,
    pub omega1: F,
    pub omega2: F,
}

impl<F: Real> SeriesCoeffs<F> {
    /// Partial sum of the delay series with `n_terms` in 1..=3.
    pub fn delay_at(&self, eps: F, n_terms: usize) -> Result<F, SpectralError> {
        Ok(partial_sum(&[self.t0, self.t1, self.t2], eps, n_terms)?)
    }

    /// Partial sum of the frequency series with `n_terms` in 1..=3.
    pub fn omega_at(&self, eps: F, n_terms: usize) -> Result<F, SpectralError> {
        Ok(partial_sum(&[self.omega0, self.omega1, self.omega2], eps, n_terms)?)
    }
}

fn partial_sum<F: Real>(coeffs: &[F; 3], eps: F, n_terms: usize) -> Result<F, SpectralError> {
    if !(1..=3).contains(&n_terms) {
        return Err(SpectralError::InvalidTruncation { n_terms });
    }
    let mut acc = coeffs[0];
    let mut pow = F::one();
    for &c in coeffs.iter().take(n_terms).skip(1) {
        pow = pow * eps;
        acc = acc + pow * c;
    }
    Ok(acc)
}

/// Series coefficients as functions of the coupling strength.
pub fn series_coeffs<F: Real>(alpha: F) -> Result<SeriesCoeffs<F>, SpectralError> {
    let a2 = alpha * alpha;
    let mut disc = cst::<F>(9.0) * a2 - cst::<F>(2.0);
    if disc < -cst::<F>(1e-12) {
        return Err(SpectralError::OutOfDomain {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
        });
    }
    if disc.abs() <= cst(1e-12) {
        disc = F::zero(); // degenerate corner, within round-off
    }
    let t0 = clamped_acos(-F::one() / (cst::<F>(3.0) * alpha));
    let omega0 = disc.sqrt() / cst::<F>(3.0);
    let root_9a2_1 = (cst::<F>(9.0) * a2 - F::one()).sqrt();
    let t1 = -root_9a2_1 * t0 / cst::<F>(9.0);
    let omega1 =
        -(cst::<F>(18.0) * a2 - cst::<F>(5.0)) * t0 / (cst::<F>(54.0) * disc.sqrt());
    let a4 = a2 * a2;
    let t2 = (root_9a2_1 * (cst::<F>(27.0) * a2 - cst::<F>(6.0)) * t0 * t0
        + (cst::<F>(162.0) * a4 - cst::<F>(36.0) * a2 + cst::<F>(2.0)) * t0)
        / (cst::<F>(1458.0) * a2 - cst::<F>(162.0));
    let omega2 = if disc == F::zero() {
        F::neg_infinity() // one-sided limit as alpha -> sqrt(2)/3 from above
    } else {
        let a6 = a4 * a2;
        disc.sqrt()
            * ((-cst::<F>(8019.0) * a6 + cst::<F>(5346.0) * a4 - cst::<F>(1206.0) * a2
                + cst::<F>(91.0))
                * t0
                * t0
                + root_9a2_1
                    * (cst::<F>(648.0) * a4 - cst::<F>(324.0) * a2 + cst::<F>(40.0))
                    * t0)
            / (cst::<F>(157464.0) * a4 - cst::<F>(69984.0) * a2 + cst::<F>(7776.0))
    };
    Ok(SeriesCoeffs {
        t0,
        t1,
        t2,
        omega0,
        omega1,
        omega2,
    })
}

fn clamped_acos<F: Real>(x: F) -> F {
    let one = F::one();
    if x < -one && x > -one - cst(1e-12) {
        F::PI()
    } else {
        x.acos()
    }
}

/// How a Hopf point was located.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HopfMethod {
    SeriesN1,
    SeriesN2,
    SeriesN3,
    Newton,
    Simulation,
}

impl HopfMethod {
    pub fn tag(self) -> &'static str {
        match self {
            HopfMethod::SeriesN1 => "series_n1",
            HopfMethod::SeriesN2 => "series_n2",
            HopfMethod::SeriesN3 => "series_n3",
            HopfMethod::Newton => "newton",
            HopfMethod::Simulation => "simulation",
        }
    }

    fn from_n(n_terms: usize) -> Self {
        match n_terms {
            1 => HopfMethod::SeriesN1,
            2 => HopfMethod::SeriesN2,
            _ => HopfMethod::SeriesN3,
        }
    }
}

impl std::fmt::Display for HopfMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

/// A located stability boundary of the in-phase mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopfPoint<F> {
    pub alpha: F,
    pub delay: F,
    pub omega: F,
    pub method: HopfMethod,
}

/// Hopf point from the `n_terms`-term truncation of the delay and frequency
/// series.
pub fn hopf_series<F: Real>(
    alpha: F,
    eps: F,
    n_terms: usize,
) -> Result<HopfPoint<F>, SpectralError> {
    let coeffs = series_coeffs(alpha)?;
    Ok(HopfPoint {
        alpha,
        delay: coeffs.delay_at(eps, n_terms)?,
        omega: coeffs.omega_at(eps, n_terms)?,
        method: HopfMethod::from_n(n_terms),
    })
}

/// Refine a Hopf point by 2D Newton iteration on `(T, Omega)` until both the
/// real and imaginary parts of `char_eq(i Omega)` are below `newton_tol`.
///
/// The Jacobian is taken by central finite differences with step `1e-6`.
/// Roots come in conjugate pairs; the returned frequency is the non-negative
/// representative.
pub fn hopf_newton<F: Real>(
    alpha: F,
    eps: F,
    seed: &HopfPoint<F>,
    max_iter: usize,
    newton_tol: F,
) -> Result<HopfPoint<F>, SpectralError> {
    if !(seed.delay.is_finite() && seed.omega.is_finite()) {
        return Err(SpectralError::NonFiniteSeed {
            delay: seed.delay.to_f64().unwrap_or(f64::NAN),
            omega: seed.omega.to_f64().unwrap_or(f64::NAN),
        });
    }
    if seed.omega.abs() < cst(1e-6) {
        return Err(SpectralError::DegenerateHopf {
            omega: seed.omega.to_f64().unwrap_or(f64::NAN),
        });
    }
    let f = |delay: F, omega: F| char_eq_raw(Complex::new(F::zero(), omega), alpha, delay, eps);
    let step = cst::<F>(1e-6);
    let mut delay = seed.delay;
    let mut omega = seed.omega;
    let mut residual = F::infinity();
    for _ in 0..=max_iter {
        let val = f(delay, omega);
        residual = val.norm();
        if val.re.abs() < newton_tol && val.im.abs() < newton_tol {
            return Ok(HopfPoint {
                alpha,
                delay,
                omega: omega.abs(),
                method: HopfMethod::Newton,
            });
        }
        let two_step = cst::<F>(2.0) * step;
        let d_delay = (f(delay + step, omega) - f(delay - step, omega)) / two_step;
        let d_omega = (f(delay, omega + step) - f(delay, omega - step)) / two_step;
        // solve [d_delay d_omega] * (dT, dOm) = val, split into re/im rows
        let det = d_delay.re * d_omega.im - d_omega.re * d_delay.im;
        if det.abs() < cst(1e-14) {
            return Err(SpectralError::SingularJacobian {
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        let dt = (val.re * d_omega.im - val.im * d_omega.re) / det;
        let dom = (val.im * d_delay.re - val.re * d_delay.im) / det;
        delay = delay - dt;
        omega = omega - dom;
    }
    Err(SpectralError::NoConvergence {
        iterations: max_iter,
        residual: residual.to_f64().unwrap_or(f64::NAN),
    })
}
