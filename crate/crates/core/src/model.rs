//! Closed-form quantities of the averaged model: the in-phase periodic mode,
//! the 2x2 slow-flow matrix obtained when delayed amplitudes are replaced by
//! instantaneous ones, and the analytic bifurcation curves of that matrix.
//!
//! All delays are expressed in radians of fast time; the slow-flow matrix
//! acts on the amplitude pair `(A, B)` over slow time `eta = eps * t`.

use num_complex::Complex;
use thiserror::Error;

use crate::real::{cst, Real};

/// Boundary slack for domain checks that are exact in real arithmetic but
/// sit on a round-off knife edge in floating point.
const EDGE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("in-phase mode does not exist: 1 + alpha*cos(T) = {discriminant:.3e} <= 0")]
    ModeNonexistent { discriminant: f64 },
    #[error("{curve}: alpha = {alpha} outside the solvable range {range}")]
    OutOfDomain {
        curve: &'static str,
        alpha: f64,
        range: &'static str,
    },
    #[error("zero trace at (alpha={alpha}, T={delay}) has determinant {det:.3e} <= 0; saddle, not Hopf")]
    NotAHopf { alpha: f64, delay: f64, det: f64 },
    #[error("parameter {name} = {value} is invalid: {requirement}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },
}

/// Sign selecting one of the two decoupled perturbation channels: the sum
/// `w1 + w2` of the deviations (symmetric, +1) or their difference `w1 - w2`
/// (antisymmetric, -1). Hopf analysis concerns the antisymmetric channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModeSign {
    Symmetric,
    Antisymmetric,
}

impl ModeSign {
    /// The +-1 coefficient carried by the delayed coupling term.
    #[inline]
    pub fn value<F: Real>(self) -> F {
        match self {
            ModeSign::Symmetric => F::one(),
            ModeSign::Antisymmetric => -F::one(),
        }
    }

    pub fn from_value(v: f64) -> Option<Self> {
        if v == 1.0 {
            Some(ModeSign::Symmetric)
        } else if v == -1.0 {
            Some(ModeSign::Antisymmetric)
        } else {
            None
        }
    }
}

/// Physical parameter set: coupling strength, delay, perturbation parameter,
/// and the perturbation-channel sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<F> {
    pub alpha: F,
    /// Delay `T`, in radians of fast time. Non-negative.
    pub delay: F,
    /// Perturbation parameter `eps`. Non-negative.
    pub eps: F,
    pub beta: ModeSign,
}

impl<F: Real> Params<F> {
    pub fn new(alpha: F, delay: F, eps: F, beta: ModeSign) -> Result<Self, ModelError> {
        if !alpha.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "alpha",
                value: alpha.to_f64().unwrap_or(f64::NAN),
                requirement: "must be finite",
            });
        }
        if !(delay.is_finite() && delay >= F::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "T",
                value: delay.to_f64().unwrap_or(f64::NAN),
                requirement: "must be finite and >= 0",
            });
        }
        if !(eps.is_finite() && eps >= F::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "eps",
                value: eps.to_f64().unwrap_or(f64::NAN),
                requirement: "must be finite and >= 0",
            });
        }
        Ok(Self {
            alpha,
            delay,
            eps,
            beta,
        })
    }
}

/// The in-phase periodic solution `y(t) = R cos(omega t)` both oscillators
/// share, to first order in `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InPhaseMode<F> {
    /// Amplitude `R = 2 sqrt(1 + alpha cos T)`.
    pub amplitude: F,
    /// Frequency `omega = 1 + eps * k`.
    pub omega: F,
    /// Frequency correction `k = -(alpha/2) sin T`.
    pub freq_correction: F,
}

impl<F: Real> InPhaseMode<F> {
    #[inline]
    pub fn position(&self, t: F) -> F {
        self.amplitude * (self.omega * t).cos()
    }

    #[inline]
    pub fn velocity(&self, t: F) -> F {
        -self.amplitude * self.omega * (self.omega * t).sin()
    }
}

/// Amplitude, frequency correction and frequency of the in-phase mode.
///
/// Fails with [`ModelError::ModeNonexistent`] when `1 + alpha cos T <= 0`,
/// i.e. at or beyond the mode-birth boundary where the amplitude vanishes.
pub fn in_phase_mode<F: Real>(p: &Params<F>) -> Result<InPhaseMode<F>, ModelError> {
    let disc = F::one() + p.alpha * p.delay.cos();
    // the boundary itself (zero amplitude) counts as nonexistent; the slack
    // absorbs round-off when T sits exactly on the curve
    if disc <= cst(EDGE_TOL) {
        return Err(ModelError::ModeNonexistent {
            discriminant: disc.to_f64().unwrap_or(f64::NAN),
        });
    }
    let amplitude = cst::<F>(2.0) * disc.sqrt();
    let freq_correction = -p.alpha * cst::<F>(0.5) * p.delay.sin();
    Ok(InPhaseMode {
        amplitude,
        omega: F::one() + p.eps * freq_correction,
        freq_correction,
    })
}

/// Coefficient matrix of the slow flow once delayed amplitudes are replaced
/// by instantaneous ones, acting on `(A, B)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlowFlowMatrix<F> {
    pub m11: F,
    pub m12: F,
    pub m21: F,
    pub m22: F,
}

impl<F: Real> SlowFlowMatrix<F> {
    #[inline]
    pub fn trace(&self) -> F {
        self.m11 + self.m22
    }

    #[inline]
    pub fn det(&self) -> F {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    /// Eigenvalues, complex-safe.
    pub fn eigenvalues(&self) -> [Complex<F>; 2] {
        let half = cst::<F>(0.5);
        let tr = self.trace();
        let disc = tr * tr - cst::<F>(4.0) * self.det();
        if disc >= F::zero() {
            let root = disc.sqrt();
            [
                Complex::new((tr + root) * half, F::zero()),
                Complex::new((tr - root) * half, F::zero()),
            ]
        } else {
            let root = (-disc).sqrt();
            [
                Complex::new(tr * half, root * half),
                Complex::new(tr * half, -root * half),
            ]
        }
    }

    /// Matrix-vector product.
    #[inline]
    pub fn apply(&self, a: F, b: F) -> (F, F) {
        (self.m11 * a + self.m12 * b, self.m21 * a + self.m22 * b)
    }
}

/// Slow-flow matrix of the delay-free approximation, for either channel sign.
pub fn ode_slow_flow_matrix<F: Real>(p: &Params<F>) -> SlowFlowMatrix<F> {
    let beta: F = p.beta.value();
    let half = cst::<F>(0.5);
    let (s, c) = p.delay.sin_cos();
    let ha = p.alpha * half;
    SlowFlowMatrix {
        m11: -F::one() + ha * (beta - cst(3.0)) * c,
        m12: ha * (F::one() - beta) * s,
        m21: -ha * (F::one() - beta) * s,
        m22: -ha * (F::one() - beta) * c,
    }
}

/// Solutions of `cos T = x` for `T >= 0`, ordered by increasing `T`:
/// branch 0 is the principal `arccos`, odd branches mirror it below the next
/// multiple of 2 pi, even branches shift it up.
fn arccos_branch<F: Real>(x: F, branch: u32) -> F {
    let base = x.acos();
    let two_pi = F::PI() * cst(2.0);
    let k = cst::<F>(((branch + 1) / 2) as f64);
    if branch % 2 == 0 {
        two_pi * k + base
    } else {
        two_pi * k - base
    }
}

/// Clamp an inverse-cosine argument that may have drifted past +-1 by
/// round-off at a domain edge.
fn clamp_cos_arg<F: Real>(x: F) -> F {
    let one = F::one();
    if x < -one && x > -one - cst(EDGE_TOL) {
        -one
    } else if x > one && x < one + cst(EDGE_TOL) {
        one
    } else {
        x
    }
}

/// Delay on the zero-trace locus `alpha = -1/(3 cos T)` of the antisymmetric
/// slow-flow matrix, principal branch `T` in `(pi/2, pi]`. Requires
/// `alpha >= 1/3`.
///
/// The locus itself carries no stability meaning below `alpha = sqrt(2)/3`,
/// where the determinant is negative; [`hopf_curve_ode`] adds that check.
pub fn zero_trace_curve<F: Real>(alpha: F) -> Result<F, ModelError> {
    zero_trace_curve_branch(alpha, 0)
}

/// Like [`zero_trace_curve`], on the given 2-pi-periodic/mirror branch.
pub fn zero_trace_curve_branch<F: Real>(alpha: F, branch: u32) -> Result<F, ModelError> {
    let third = F::one() / cst::<F>(3.0);
    if alpha < third {
        return Err(ModelError::OutOfDomain {
            curve: "zero-trace (Hopf) curve",
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            range: "alpha >= 1/3",
        });
    }
    Ok(arccos_branch(
        clamp_cos_arg(-F::one() / (cst::<F>(3.0) * alpha)),
        branch,
    ))
}

/// Delay at which the antisymmetric slow-flow matrix undergoes a Hopf
/// bifurcation: zero trace with positive determinant, principal branch.
///
/// A zero-trace point with negative determinant is a saddle, not a Hopf, and
/// is rejected as [`ModelError::NotAHopf`]; this happens for
/// `alpha < sqrt(2)/3`. The degenerate corner `alpha = sqrt(2)/3` itself
/// (determinant exactly zero, the intersection with the saddle-node curve)
/// is admitted to round-off.
pub fn hopf_curve_ode<F: Real>(alpha: F) -> Result<F, ModelError> {
    hopf_curve_ode_branch(alpha, 0)
}

/// Like [`hopf_curve_ode`], on the given 2-pi-periodic/mirror branch.
pub fn hopf_curve_ode_branch<F: Real>(alpha: F, branch: u32) -> Result<F, ModelError> {
    let delay = zero_trace_curve_branch(alpha, branch)?;
    let m = ode_slow_flow_matrix(&Params {
        alpha,
        delay,
        eps: F::zero(),
        beta: ModeSign::Antisymmetric,
    });
    let det = m.det(); // alpha^2 - 2/9 on this curve
    if det < -cst::<F>(EDGE_TOL) {
        return Err(ModelError::NotAHopf {
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            delay: delay.to_f64().unwrap_or(f64::NAN),
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(delay)
}

/// Delay at which the antisymmetric slow-flow matrix is singular
/// (`alpha = -cos T / (1 + cos^2 T)`), principal branch `T` in `(pi/2, pi]`.
///
/// Solved in closed form through the quadratic `alpha c^2 + c + alpha = 0`
/// in `c = cos T`, taking the root with `|c| <= 1`. Requires
/// `0 < alpha <= 1/2`.
pub fn saddle_node_curve<F: Real>(alpha: F) -> Result<F, ModelError> {
    saddle_node_curve_branch(alpha, 0)
}

/// Like [`saddle_node_curve`], on the given branch.
pub fn saddle_node_curve_branch<F: Real>(alpha: F, branch: u32) -> Result<F, ModelError> {
    let half = cst::<F>(0.5);
    if alpha <= F::zero() || alpha > half {
        return Err(ModelError::OutOfDomain {
            curve: "saddle-node curve",
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            range: "0 < alpha <= 1/2",
        });
    }
    let disc = F::one() - cst::<F>(4.0) * alpha * alpha;
    let c = (-F::one() + disc.sqrt()) / (cst::<F>(2.0) * alpha);
    Ok(arccos_branch(clamp_cos_arg(c), branch))
}

/// Delay at which the in-phase mode is born (`alpha = -1/cos T`), principal
/// branch. Requires `alpha >= 1`.
pub fn mode_birth_curve<F: Real>(alpha: F) -> Result<F, ModelError> {
    mode_birth_curve_branch(alpha, 0)
}

/// Like [`mode_birth_curve`], on the given branch.
pub fn mode_birth_curve_branch<F: Real>(alpha: F, branch: u32) -> Result<F, ModelError> {
    if alpha < F::one() {
        return Err(ModelError::OutOfDomain {
            curve: "mode-birth curve",
            alpha: alpha.to_f64().unwrap_or(f64::NAN),
            range: "alpha >= 1",
        });
    }
    Ok(arccos_branch(clamp_cos_arg(-F::one() / alpha), branch))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn params(alpha: f64, delay: f64, eps: f64, beta: ModeSign) -> Params<f64> {
        Params::new(alpha, delay, eps, beta).unwrap()
    }

    const ANTI: ModeSign = ModeSign::Antisymmetric;
    const SYM: ModeSign = ModeSign::Symmetric;

    #[test]
    fn uncoupled_mode_is_the_classical_limit_cycle() {
        let m = in_phase_mode(&params(0.0, 1.0, 0.1, ANTI)).unwrap();
        assert_eq!(m.amplitude, 2.0);
        assert_eq!(m.omega, 1.0);
        assert_eq!(m.freq_correction, 0.0);
    }

    #[test]
    fn quarter_period_delay_mode() {
        let m = in_phase_mode(&params(1.0, PI / 2.0, 0.5, ANTI)).unwrap();
        assert_abs_diff_eq!(m.amplitude, 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(m.freq_correction, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(m.omega, 0.75, epsilon = 1e-15);
    }

    #[test]
    fn mode_vanishes_on_the_birth_boundary() {
        let err = in_phase_mode(&params(1.0, PI, 0.1, ANTI)).unwrap_err();
        assert!(matches!(err, ModelError::ModeNonexistent { .. }));
        // spot check in floating point at (alpha=2, T=2*pi/3)
        let err = in_phase_mode(&params(2.0, 2.0 * PI / 3.0, 0.1, ANTI)).unwrap_err();
        assert!(matches!(err, ModelError::ModeNonexistent { .. }));
    }

    #[test]
    fn amplitude_tends_to_zero_at_mode_birth() {
        let alpha = 2.0;
        let t_birth = mode_birth_curve(alpha).unwrap();
        let mut prev = f64::INFINITY;
        for delta in [1e-2, 1e-4, 1e-6, 1e-8] {
            let m = in_phase_mode(&params(alpha, t_birth - delta, 0.1, ANTI)).unwrap();
            // R ~ 2 sqrt(alpha sin(T) delta), so each 100x shrink of delta
            // shrinks R by 10x
            assert!(m.amplitude < prev / 5.0);
            prev = m.amplitude;
        }
        assert!(prev < 1e-3);
    }

    #[test]
    fn slow_flow_matrix_uncoupled_limit() {
        let m = ode_slow_flow_matrix(&params(0.0, 1.3, 0.1, ANTI));
        assert_eq!((m.m11, m.m12, m.m21, m.m22), (-1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn slow_flow_matrix_closed_forms() {
        for &(alpha, delay) in &[(0.7, 0.4), (1.2, 2.0), (0.3, 3.0)] {
            let p = params(alpha, delay, 0.0, ANTI);
            let m = ode_slow_flow_matrix(&p);
            let (s, c) = delay.sin_cos();
            assert_abs_diff_eq!(m.m11, -1.0 - 2.0 * alpha * c, epsilon = 1e-15);
            assert_abs_diff_eq!(m.m12, alpha * s, epsilon = 1e-15);
            assert_abs_diff_eq!(m.m21, -alpha * s, epsilon = 1e-15);
            assert_abs_diff_eq!(m.m22, -alpha * c, epsilon = 1e-15);
            assert_abs_diff_eq!(m.trace(), -1.0 - 3.0 * alpha * c, epsilon = 1e-14);
            assert_abs_diff_eq!(
                m.det(),
                alpha * alpha + alpha * c + alpha * alpha * c * c,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn symmetric_channel_matrix_is_diagonal() {
        let m = ode_slow_flow_matrix(&params(1.0, PI / 3.0, 0.0, SYM));
        assert_abs_diff_eq!(m.m11, -1.5, epsilon = 1e-15);
        assert_eq!((m.m12, m.m21, m.m22), (0.0, 0.0, 0.0));
    }

    #[test]
    fn trace_vanishes_at_the_curve_intersection() {
        let alpha = 2f64.sqrt() / 3.0;
        let m = ode_slow_flow_matrix(&params(alpha, 3.0 * PI / 4.0, 0.0, ANTI));
        assert!(m.trace().abs() < 1e-12);
    }

    #[test]
    fn hopf_curve_values() {
        // the zero-trace locus extends down to alpha = 1/3 where T = pi ...
        assert_abs_diff_eq!(zero_trace_curve(1.0 / 3.0).unwrap(), PI, epsilon = 1e-7);
        assert_abs_diff_eq!(
            hopf_curve_ode(2f64.sqrt() / 3.0).unwrap(),
            3.0 * PI / 4.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            hopf_curve_ode(1.0).unwrap(),
            (-1.0f64 / 3.0).acos(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(hopf_curve_ode(1.0).unwrap(), 1.910633236249, epsilon = 1e-9);
    }

    #[test]
    fn hopf_curve_rejects_saddles_and_small_alpha() {
        assert!(matches!(
            hopf_curve_ode(0.2),
            Err(ModelError::OutOfDomain { .. })
        ));
        // ... but on 1/3 <= alpha < sqrt(2)/3 the determinant is negative
        // there (a saddle), so no Hopf is reported
        assert!(matches!(
            hopf_curve_ode(0.4),
            Err(ModelError::NotAHopf { .. })
        ));
        assert!(matches!(
            hopf_curve_ode(1.0 / 3.0),
            Err(ModelError::NotAHopf { .. })
        ));
    }

    #[test]
    fn zero_trace_with_positive_det_along_the_hopf_curve() {
        for i in 0..50 {
            let alpha = 0.48 + (1.5 - 0.48) * i as f64 / 49.0;
            let delay = hopf_curve_ode(alpha).unwrap();
            let m = ode_slow_flow_matrix(&params(alpha, delay, 0.0, ANTI));
            assert!(m.trace().abs() < 1e-12, "alpha={alpha}");
            assert!(m.det() > 0.0, "alpha={alpha}");
            assert!(delay > PI / 2.0 && delay <= PI);
        }
    }

    #[test]
    fn singular_matrix_along_the_saddle_node_curve() {
        for i in 0..50 {
            let alpha = 0.01 + (0.5 - 0.01) * i as f64 / 49.0;
            let delay = saddle_node_curve(alpha).unwrap();
            let m = ode_slow_flow_matrix(&params(alpha, delay, 0.0, ANTI));
            assert!(m.det().abs() < 1e-12, "alpha={alpha}: det={}", m.det());
            assert!(delay > PI / 2.0 && delay <= PI);
        }
    }

    #[test]
    fn saddle_node_values() {
        assert_abs_diff_eq!(saddle_node_curve(0.5).unwrap(), PI, epsilon = 1e-7);
        assert_abs_diff_eq!(
            saddle_node_curve(2f64.sqrt() / 3.0).unwrap(),
            3.0 * PI / 4.0,
            epsilon = 1e-12
        );
        // quadratic-formula oracle: alpha = 0.4 gives c = -1/2 exactly
        assert_abs_diff_eq!(
            saddle_node_curve(0.4).unwrap(),
            2.0 * PI / 3.0,
            epsilon = 1e-12
        );
        assert!(saddle_node_curve(0.0).is_err());
        assert!(saddle_node_curve(0.51).is_err());
    }

    #[test]
    fn saddle_node_round_trip() {
        // independent check: the returned delay must solve
        // alpha = -cos T / (1 + cos^2 T)
        for i in 1..=40 {
            let alpha = 0.5 * i as f64 / 40.0;
            let t = saddle_node_curve(alpha).unwrap();
            let c = t.cos();
            assert_abs_diff_eq!(alpha, -c / (1.0 + c * c), epsilon = 1e-12);
        }
    }

    #[test]
    fn mode_birth_values() {
        assert_abs_diff_eq!(mode_birth_curve(1.0).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(mode_birth_curve(2.0).unwrap(), 2.0 * PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            mode_birth_curve(2f64.sqrt()).unwrap(),
            3.0 * PI / 4.0,
            epsilon = 1e-15
        );
        assert!(mode_birth_curve(0.99).is_err());
    }

    #[test]
    fn branches_enumerate_all_nonnegative_solutions() {
        let alpha = 1.2;
        let t0 = mode_birth_curve_branch(alpha, 0).unwrap();
        let t1 = mode_birth_curve_branch(alpha, 1).unwrap();
        let t2 = mode_birth_curve_branch(alpha, 2).unwrap();
        assert_abs_diff_eq!(t1, 2.0 * PI - t0, epsilon = 1e-12);
        assert_abs_diff_eq!(t2, 2.0 * PI + t0, epsilon = 1e-12);
        for t in [t0, t1, t2] {
            assert_abs_diff_eq!(t.cos(), -1.0 / alpha, epsilon = 1e-12);
        }
        assert!(t0 < t1 && t1 < t2);
    }

    /// Pointwise residual of `y = R cos(omega t)` in the in-phase equation
    /// over one period: returns (max norm, amplitude of the fundamental
    /// cos/sin component).
    fn lindstedt_residual(alpha: f64, delay: f64, eps: f64) -> (f64, f64) {
        let mode = in_phase_mode(&params(alpha, delay, eps, ANTI)).unwrap();
        let (r, w) = (mode.amplitude, mode.omega);
        let period = 2.0 * PI / w;
        let n = 2048;
        let (mut max_norm, mut cp, mut sp) = (0.0f64, 0.0, 0.0);
        for i in 0..n {
            let t = period * i as f64 / n as f64;
            let y = r * (w * t).cos();
            let yd = -r * w * (w * t).sin();
            let ydd = -r * w * w * (w * t).cos();
            let yd_delayed = -r * w * (w * (t - delay)).sin();
            let resid = ydd + y - eps * (1.0 - y * y) * yd - eps * alpha * yd_delayed;
            max_norm = max_norm.max(resid.abs());
            cp += resid * (w * t).cos();
            sp += resid * (w * t).sin();
        }
        let fundamental = (cp * cp + sp * sp).sqrt() * 2.0 / n as f64;
        (max_norm, fundamental)
    }

    #[test]
    fn secular_terms_are_removed_to_second_order() {
        // the resonant (fundamental-harmonic) part of the residual is what
        // the amplitude/frequency conditions kill; it scales as eps^2
        for &(alpha, delay) in &[(1.0, 1.0), (0.7, 2.0), (0.5, 2.7)] {
            for eps in [0.2, 0.1] {
                let (_, f1) = lindstedt_residual(alpha, delay, eps);
                let (_, f2) = lindstedt_residual(alpha, delay, eps / 2.0);
                let ratio = f1 / f2;
                assert!(
                    (3.0..=5.0).contains(&ratio),
                    "(alpha={alpha}, T={delay}, eps={eps}): fundamental ratio {ratio}"
                );
            }
        }
    }

    #[test]
    fn full_residual_is_first_order_from_the_third_harmonic() {
        // the non-resonant R^3/4 sin(3 tau) forcing survives by construction,
        // so the pointwise max-norm halves (not quarters) with eps
        let (m1, _) = lindstedt_residual(1.0, 1.0, 0.2);
        let (m2, _) = lindstedt_residual(1.0, 1.0, 0.1);
        let ratio = m1 / m2;
        assert!((1.7..=2.3).contains(&ratio), "max-norm ratio {ratio}");
    }

    #[test]
    fn params_validation() {
        assert!(Params::new(1.0, -0.1, 0.1, ANTI).is_err());
        assert!(Params::new(1.0, 1.0, -0.1, ANTI).is_err());
        assert!(Params::new(f64::NAN, 1.0, 0.1, ANTI).is_err());
        assert!(Params::new(1.0, 0.0, 0.0, ANTI).is_ok());
        assert_eq!(ModeSign::from_value(-1.0), Some(ANTI));
        assert_eq!(ModeSign::from_value(1.0), Some(SYM));
        assert_eq!(ModeSign::from_value(0.5), None);
    }

    #[test]
    fn eigenvalues_match_trace_and_det() {
        let m = ode_slow_flow_matrix(&params(0.9, 2.2, 0.0, ANTI));
        let [l1, l2] = m.eigenvalues();
        assert_abs_diff_eq!((l1 + l2).re, m.trace(), epsilon = 1e-12);
        assert_abs_diff_eq!((l1 * l2).re, m.det(), epsilon = 1e-12);
        assert_abs_diff_eq!((l1 + l2).im, 0.0, epsilon = 1e-12);
    }
}
