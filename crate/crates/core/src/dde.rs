//! Fixed-step integration of delay-differential systems with one constant
//! lag, by the method of steps: classical RK4 advances the solution while
//! delayed values are read from the already-computed trajectory through
//! cubic Hermite interpolation.
//!
//! The step is shrunk so that an integer number of steps spans the lag.
//! Delayed lookups therefore land on completed segments only: the lag
//! covers at least four steps, so no stage of the active step is ever read
//! back. For zero lag the scheme reduces to plain RK4 on an ODE.
//!
//! Right-hand sides are provided for the two systems under study: the
//! delayed slow flow on the amplitude pair `(A, B)`, and the full coupled
//! pair of van der Pol oscillators with velocity delay coupling.

use std::io::{self, Write};

use thiserror::Error;

use crate::model::{in_phase_mode, ModelError, Params};
use crate::real::{cst, Real};

#[derive(Debug, Error)]
pub enum DdeError<F: Real> {
    #[error("state left the finite range at t = {time} (component magnitude above ~1e150 or non-finite)")]
    NonFiniteState {
        time: F,
        /// Trajectory up to and including the offending node.
        trajectory: Box<Trajectory<F>>,
    },
    #[error("step size must be positive and finite, got {step}")]
    InvalidStep { step: F },
    #[error("integration span must be positive and finite, got t_end = {t_end}")]
    InvalidSpan { t_end: F },
    #[error("lag must be non-negative and finite, got {delay}")]
    InvalidDelay { delay: F },
    #[error("state dimension must be at least 1")]
    ZeroDimension,
}

type RhsFn<F> = Box<dyn Fn(F, &[F], &[F], &mut [F]) + Send + Sync>;
type HistoryFn<F> = Box<dyn Fn(F, &mut [F]) + Send + Sync>;

/// A delay-differential initial value problem with a single constant lag.
///
/// The right-hand side receives `(t, state, delayed_state)` and writes the
/// derivative; the history function covers all `t <= 0`.
pub struct DdeProblem<F> {
    dim: usize,
    delay: F,
    rhs: RhsFn<F>,
    history: HistoryFn<F>,
}

impl<F: Real> DdeProblem<F> {
    pub fn new(
        dim: usize,
        delay: F,
        rhs: impl Fn(F, &[F], &[F], &mut [F]) + Send + Sync + 'static,
        history: impl Fn(F, &mut [F]) + Send + Sync + 'static,
    ) -> Result<Self, DdeError<F>> {
        if dim == 0 {
            return Err(DdeError::ZeroDimension);
        }
        if !(delay.is_finite() && delay >= F::zero()) {
            return Err(DdeError::InvalidDelay { delay });
        }
        Ok(Self {
            dim,
            delay,
            rhs: Box::new(rhs),
            history: Box::new(history),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delay(&self) -> F {
        self.delay
    }

    pub fn history_at(&self, t: F, out: &mut [F]) {
        (self.history)(t, out);
    }

    pub fn rhs_at(&self, t: F, state: &[F], delayed: &[F], out: &mut [F]) {
        (self.rhs)(t, state, delayed, out);
    }
}

/// Uniform-step trajectory holding states and derivatives at every node,
/// interpolable to a C1 piecewise cubic anywhere inside its span.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<F> {
    t0: F,
    step: F,
    dim: usize,
    states: Vec<F>,
    derivs: Vec<F>,
}

impl<F: Real> Trajectory<F> {
    pub fn node_count(&self) -> usize {
        self.states.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> F {
        self.step
    }

    pub fn start_time(&self) -> F {
        self.t0
    }

    pub fn end_time(&self) -> F {
        self.time(self.node_count() - 1)
    }

    pub fn span(&self) -> F {
        self.end_time() - self.t0
    }

    pub fn time(&self, node: usize) -> F {
        self.t0 + cst::<F>(node as f64) * self.step
    }

    pub fn state(&self, node: usize) -> &[F] {
        &self.states[node * self.dim..(node + 1) * self.dim]
    }

    pub fn deriv(&self, node: usize) -> &[F] {
        &self.derivs[node * self.dim..(node + 1) * self.dim]
    }

    /// Cubic Hermite evaluation at `t`, clamped to the covered span.
    /// Node times reproduce the stored states exactly.
    pub fn eval(&self, t: F, out: &mut [F]) {
        let n_seg = self.node_count() - 1;
        let pos = ((t - self.t0) / self.step)
            .max(F::zero())
            .min(cst(n_seg as f64));
        let mut seg = pos.floor();
        let mut theta = pos - seg;
        // snap to nodes so that querying a node time is exact; the slack
        // scales with the index because pos carries relative rounding
        let snap = F::epsilon() * (pos + F::one()) * cst(8.0);
        if theta < snap {
            theta = F::zero();
        } else if theta > F::one() - snap {
            seg = seg + F::one();
            theta = F::zero();
        }
        let seg = (seg.to_usize().unwrap_or(0)).min(n_seg);
        if theta == F::zero() {
            out.copy_from_slice(self.state(seg));
            return;
        }
        self.hermite(seg, theta, out);
    }

    /// Hermite basis combination on segment `seg` at local coordinate
    /// `theta` in [0, 1].
    fn hermite(&self, seg: usize, theta: F, out: &mut [F]) {
        let one = F::one();
        let omt = one - theta;
        let h00 = (one + cst::<F>(2.0) * theta) * omt * omt;
        let h10 = theta * omt * omt;
        let h01 = theta * theta * (cst::<F>(3.0) - cst::<F>(2.0) * theta);
        let h11 = theta * theta * (theta - one);
        let x0 = self.state(seg);
        let x1 = self.state(seg + 1);
        let d0 = self.deriv(seg);
        let d1 = self.deriv(seg + 1);
        for i in 0..self.dim {
            out[i] = h00 * x0[i] + h01 * x1[i] + self.step * (h10 * d0[i] + h11 * d1[i]);
        }
    }

    /// New trajectory with states and derivatives pushed through a linear
    /// map of the state space (a linear map is what keeps the stored
    /// derivatives meaningful).
    pub fn map_linear(
        &self,
        new_dim: usize,
        mut map: impl FnMut(&[F], &mut [F]),
    ) -> Trajectory<F> {
        let n = self.node_count();
        let mut states = vec![F::zero(); n * new_dim];
        let mut derivs = vec![F::zero(); n * new_dim];
        for node in 0..n {
            map(
                self.state(node),
                &mut states[node * new_dim..(node + 1) * new_dim],
            );
            map(
                self.deriv(node),
                &mut derivs[node * new_dim..(node + 1) * new_dim],
            );
        }
        Trajectory {
            t0: self.t0,
            step: self.step,
            dim: new_dim,
            states,
            derivs,
        }
    }

    /// Write the node data as CSV: header `t,<name>,...`, one row per node,
    /// 15 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W, names: Option<&[&str]>) -> io::Result<()> {
        write!(w, "t")?;
        for i in 0..self.dim {
            match names {
                Some(ns) if i < ns.len() => write!(w, ",{}", ns[i])?,
                _ => write!(w, ",state_{i}")?,
            }
        }
        writeln!(w)?;
        for node in 0..self.node_count() {
            write!(w, "{:.14e}", self.time(node).to_f64().unwrap_or(f64::NAN))?;
            for v in self.state(node) {
                write!(w, ",{:.14e}", v.to_f64().unwrap_or(f64::NAN))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Blow-up guard: states beyond this magnitude end the integration early.
fn norm_limit<F: Real>() -> F {
    F::max_value().sqrt() * cst(1e-4)
}

/// Integrate from `t = 0` to at least `t_end` with requested step
/// `h_request`.
///
/// With a positive lag the actual step is `delay / m` with
/// `m = max(4, ceil(delay / h_request))`, so delayed stage lookups fall on
/// completed segments. Strongly unstable runs end early with
/// [`DdeError::NonFiniteState`] carrying the partial trajectory and the
/// blow-up time.
pub fn integrate<F: Real>(
    prob: &DdeProblem<F>,
    t_end: F,
    h_request: F,
) -> Result<Trajectory<F>, DdeError<F>> {
    if !(h_request.is_finite() && h_request > F::zero()) {
        return Err(DdeError::InvalidStep { step: h_request });
    }
    if !(t_end.is_finite() && t_end > F::zero()) {
        return Err(DdeError::InvalidSpan { t_end });
    }
    let dim = prob.dim;
    let delay = prob.delay;
    let (h, lag_steps) = if delay > F::zero() {
        let m = (delay / h_request).ceil().to_usize().unwrap_or(4).max(4);
        (delay / cst(m as f64), m)
    } else {
        (h_request, 0usize)
    };
    let n_steps = (t_end / h).ceil().to_usize().expect("step count overflow").max(1);

    let mut states = vec![F::zero(); (n_steps + 1) * dim];
    let mut derivs = vec![F::zero(); (n_steps + 1) * dim];
    let mut k1 = vec![F::zero(); dim];
    let mut k2 = vec![F::zero(); dim];
    let mut k3 = vec![F::zero(); dim];
    let mut k4 = vec![F::zero(); dim];
    let mut stage = vec![F::zero(); dim];
    let mut lag0 = vec![F::zero(); dim];
    let mut lag_half = vec![F::zero(); dim];
    let mut lag1 = vec![F::zero(); dim];

    prob.history_at(F::zero(), &mut stage);
    states[..dim].copy_from_slice(&stage);

    let limit = norm_limit::<F>();
    let half = cst::<F>(0.5);
    let sixth = F::one() / cst::<F>(6.0);

    // delayed node lookup: node index offset by the lag, or history
    let fetch_node = |node: isize, states: &[F], out: &mut [F]| {
        if node < 0 {
            prob.history_at(cst::<F>(node as f64) * h, out);
        } else {
            let j = node as usize;
            out.copy_from_slice(&states[j * dim..(j + 1) * dim]);
        }
    };
    // delayed half-step lookup on segment [node, node+1]
    let fetch_mid = |node: isize, states: &[F], derivs: &[F], out: &mut [F]| {
        if node < 0 {
            prob.history_at((cst::<F>(node as f64) + half) * h, out);
        } else {
            let j = node as usize;
            let x0 = &states[j * dim..(j + 1) * dim];
            let x1 = &states[(j + 1) * dim..(j + 2) * dim];
            let d0 = &derivs[j * dim..(j + 1) * dim];
            let d1 = &derivs[(j + 1) * dim..(j + 2) * dim];
            // Hermite weights at theta = 1/2
            let eighth = cst::<F>(0.125);
            for i in 0..dim {
                out[i] = (x0[i] + x1[i]) * half + h * (d0[i] - d1[i]) * eighth;
            }
        }
    };

    // derivative at node 0
    if lag_steps > 0 {
        fetch_node(-(lag_steps as isize), &states, &mut lag0);
    } else {
        lag0.copy_from_slice(&states[..dim]);
    }
    prob.rhs_at(F::zero(), &states[..dim], &lag0, &mut k1);
    derivs[..dim].copy_from_slice(&k1);

    for i in 0..n_steps {
        let t = cst::<F>(i as f64) * h;
        let cur = i * dim;
        let nxt = (i + 1) * dim;
        if lag_steps > 0 {
            let base = i as isize - lag_steps as isize;
            fetch_node(base, &states, &mut lag0);
            fetch_mid(base, &states, &derivs, &mut lag_half);
            fetch_node(base + 1, &states, &mut lag1);

            prob.rhs_at(t, &states[cur..cur + dim], &lag0, &mut k1);
            for j in 0..dim {
                stage[j] = states[cur + j] + half * h * k1[j];
            }
            prob.rhs_at(t + half * h, &stage, &lag_half, &mut k2);
            for j in 0..dim {
                stage[j] = states[cur + j] + half * h * k2[j];
            }
            prob.rhs_at(t + half * h, &stage, &lag_half, &mut k3);
            for j in 0..dim {
                stage[j] = states[cur + j] + h * k3[j];
            }
            prob.rhs_at(t + h, &stage, &lag1, &mut k4);
        } else {
            // zero lag: ordinary RK4, the delayed argument is the stage state
            let state = &states[cur..cur + dim];
            prob.rhs_at(t, state, state, &mut k1);
            for j in 0..dim {
                stage[j] = states[cur + j] + half * h * k1[j];
            }
            prob.rhs_at(t + half * h, &stage, &stage, &mut k2);
            for j in 0..dim {
                stage[j] = states[cur + j] + half * h * k2[j];
            }
            prob.rhs_at(t + half * h, &stage, &stage, &mut k3);
            for j in 0..dim {
                stage[j] = states[cur + j] + h * k3[j];
            }
            prob.rhs_at(t + h, &stage, &stage, &mut k4);
        }
        let two = cst::<F>(2.0);
        let mut bad = false;
        for j in 0..dim {
            let v = states[cur + j] + h * sixth * (k1[j] + two * k2[j] + two * k3[j] + k4[j]);
            bad |= !v.is_finite() || v.abs() > limit;
            states[nxt + j] = v;
        }
        // derivative at the fresh node (also on the blow-up path, so the
        // stored pairing of state and derivative stays consistent)
        if lag_steps > 0 {
            fetch_node(i as isize + 1 - lag_steps as isize, &states, &mut lag0);
        } else {
            lag0.copy_from_slice(&states[nxt..nxt + dim]);
        }
        prob.rhs_at(
            cst::<F>((i + 1) as f64) * h,
            &states[nxt..nxt + dim],
            &lag0,
            &mut k1,
        );
        derivs[nxt..nxt + dim].copy_from_slice(&k1);
        if bad {
            let time = cst::<F>((i + 1) as f64) * h;
            states.truncate(nxt + dim);
            derivs.truncate(nxt + dim);
            return Err(DdeError::NonFiniteState {
                time,
                trajectory: Box::new(Trajectory {
                    t0: F::zero(),
                    step: h,
                    dim,
                    states,
                    derivs,
                }),
            });
        }
    }

    Ok(Trajectory {
        t0: F::zero(),
        step: h,
        dim,
        states,
        derivs,
    })
}

/// The delayed slow flow on the amplitude pair `(A, B)`, with lag
/// `eps * T` in slow time and constant history.
pub fn slow_flow_problem<F: Real>(p: &Params<F>, history: [F; 2]) -> DdeProblem<F> {
    let beta: F = p.beta.value();
    let half = cst::<F>(0.5);
    let (s, c) = p.delay.sin_cos();
    let a = p.alpha;
    // instantaneous coefficients
    let aa = -F::one() - cst::<F>(1.5) * a * c;
    let ab = half * a * s;
    let ba = -half * a * s;
    let bb = -half * a * c;
    // delayed coefficients
    let ad = half * a * beta * c;
    let bd = -half * a * beta * s;
    let cd = half * a * beta * s;
    let dd = half * a * beta * c;
    let lag = p.eps * p.delay;
    DdeProblem::new(
        2,
        lag,
        move |_t, x: &[F], xd: &[F], out: &mut [F]| {
            out[0] = aa * x[0] + ab * x[1] + ad * xd[0] + bd * xd[1];
            out[1] = ba * x[0] + bb * x[1] + cd * xd[0] + dd * xd[1];
        },
        move |_t, out: &mut [F]| {
            out[0] = history[0];
            out[1] = history[1];
        },
    )
    .expect("dimension and lag are valid by construction")
}

/// The full coupled pair as a first-order system `(x1, v1, x2, v2)` with
/// velocity delay coupling and lag `T` in fast time.
///
/// The history is the in-phase mode for both oscillators, with
/// `perturbation = [dx, dv]` added to oscillator 1's history only, so the
/// antisymmetric channel starts excited when the perturbation is nonzero.
pub fn full_system_problem<F: Real>(
    p: &Params<F>,
    perturbation: [F; 2],
) -> Result<DdeProblem<F>, ModelError> {
    let mode = in_phase_mode(p)?;
    let eps = p.eps;
    let alpha = p.alpha;
    Ok(DdeProblem::new(
        4,
        p.delay,
        move |_t, x: &[F], xd: &[F], out: &mut [F]| {
            out[0] = x[1];
            out[1] = -x[0] + eps * (F::one() - x[0] * x[0]) * x[1] + eps * alpha * xd[3];
            out[2] = x[3];
            out[3] = -x[2] + eps * (F::one() - x[2] * x[2]) * x[3] + eps * alpha * xd[1];
        },
        move |t, out: &mut [F]| {
            let y = mode.position(t);
            let v = mode.velocity(t);
            out[0] = y + perturbation[0];
            out[1] = v + perturbation[1];
            out[2] = y;
            out[3] = v;
        },
    )
    .expect("dimension and lag are valid by construction"))
}

/// Project a full-system trajectory onto the antisymmetric deviation
/// `(x1 - x2, v1 - v2)` whose growth decides in-phase stability.
pub fn antiphase_deviation<F: Real>(traj: &Trajectory<F>) -> Trajectory<F> {
    assert_eq!(traj.dim(), 4, "expected a full-system trajectory");
    traj.map_linear(2, |x, out| {
        out[0] = x[0] - x[2];
        out[1] = x[1] - x[3];
    })
}
