//! Simulation-based stability scanning: classify slow-flow trajectories as
//! growing or decaying by a least-squares fit of the log-amplitude, locate
//! the critical delay by bisection, sweep the coupling strength, and
//! assemble the error table comparing series predictions against the
//! simulated transition.

use std::io::{self, Write};

use rayon::prelude::*;
use thiserror::Error;

use crate::dde::{integrate, slow_flow_problem, DdeError, Trajectory};
use crate::model::{ModeSign, Params};
use crate::real::{cst, Real};
use crate::spectral::{alpha_min, hopf_newton, hopf_series, HopfPoint, SpectralError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScanError {
    #[error("trajectory too short for a growth fit: span {span:.3} (need >= 40) with {nodes} nodes (need >= 200)")]
    TooShort { span: f64, nodes: usize },
    #[error("growth rate does not change sign over the bracket: rate({t_lo:.6}) = {rate_lo:.3e}, rate({t_hi:.6}) = {rate_hi:.3e}")]
    NoSignChange {
        t_lo: f64,
        t_hi: f64,
        rate_lo: f64,
        rate_hi: f64,
    },
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}

/// Exponential growth rate fitted to the tail of a trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthEstimate<F> {
    /// Least-squares slope of `ln ||state||` per unit time. `+inf` marks a
    /// run that blew up, `-inf` one that decayed below the floating-point
    /// floor before the fit window.
    pub rate: F,
    /// Goodness of the linear fit, in [0, 1].
    pub r_squared: F,
    /// Time window the fit used.
    pub window: (F, F),
}

/// Tuning knobs for growth probes and bisection.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanConfig<F> {
    /// Requested integration step in slow time.
    pub step: F,
    /// Minimum probe window.
    pub base_window: F,
    /// Hard cap on the probe window.
    pub window_cap: F,
    /// Window floor `rotation_coeff / Omega0(alpha)` resolving slow
    /// rotations near the degenerate corner.
    pub rotation_coeff: F,
    /// Window floor `rate_coeff / |expected rate|`.
    pub rate_coeff: F,
    /// Bisection tolerance on the delay.
    pub tol: F,
    /// Constant history for the amplitude pair.
    pub history: [F; 2],
    /// Tolerance for the Newton cross-check.
    pub newton_tol: F,
    pub newton_max_iter: usize,
}

impl<F: Real> Default for ScanConfig<F> {
    fn default() -> Self {
        Self {
            step: cst(0.01),
            base_window: cst(60.0),
            window_cap: cst(2400.0),
            rotation_coeff: cst(40.0),
            rate_coeff: cst(20.0),
            tol: cst(1e-3),
            history: [F::one(), F::zero()],
            newton_tol: cst(1e-10),
            newton_max_iter: 50,
        }
    }
}

impl<F: Real> ScanConfig<F> {
    /// Settings for table-grade runs: a tighter bisection tolerance than the
    /// interactive default.
    pub fn precise() -> Self {
        Self {
            tol: cst(2e-4),
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<(), ScanError> {
        for (name, v) in [
            ("step", self.step),
            ("base_window", self.base_window),
            ("window_cap", self.window_cap),
            ("rotation_coeff", self.rotation_coeff),
            ("rate_coeff", self.rate_coeff),
            ("tol", self.tol),
        ] {
            if !(v.is_finite() && v > F::zero()) {
                return Err(ScanError::InvalidConfig(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if self.window_cap < self.base_window {
            return Err(ScanError::InvalidConfig(
                "window_cap must be at least base_window".into(),
            ));
        }
        Ok(())
    }

    /// Probe window for a given expected-rate scale.
    fn window_for(&self, alpha: F, rate_scale: F) -> F {
        let mut w = self.base_window;
        let rot = rotation_floor(alpha, self.rotation_coeff);
        if rot > w {
            w = rot;
        }
        if rate_scale > F::zero() {
            let by_rate = self.rate_coeff / rate_scale;
            if by_rate > w {
                w = by_rate;
            }
        } else {
            w = self.window_cap;
        }
        w.min(self.window_cap)
    }
}

/// Window needed to average over the slow rotation of the amplitude pair;
/// falls back to zero (no constraint) where the rotation frequency of the
/// delay-free approximation is not defined.
fn rotation_floor<F: Real>(alpha: F, coeff: F) -> F {
    let disc = cst::<F>(9.0) * alpha * alpha - cst::<F>(2.0);
    if disc > F::zero() {
        coeff * cst::<F>(3.0) / disc.sqrt()
    } else {
        F::zero()
    }
}

/// Least-squares slope of `ln ||state||_2` over the second half of the
/// trajectory, discarding the transient first half.
pub fn growth_rate<F: Real>(traj: &Trajectory<F>) -> Result<GrowthEstimate<F>, ScanError> {
    let nodes = traj.node_count();
    let span = traj.span();
    if span < cst(40.0) || nodes < 200 {
        return Err(ScanError::TooShort {
            span: span.to_f64().unwrap_or(f64::NAN),
            nodes,
        });
    }
    let half = nodes / 2;
    // stop the fit where the norm underflows toward zero
    let floor = F::min_positive_value().sqrt();
    let mut last = half;
    for node in half..nodes {
        if norm2(traj.state(node)) <= floor {
            break;
        }
        last = node;
    }
    if last < half + 10 {
        return Ok(GrowthEstimate {
            rate: F::neg_infinity(),
            r_squared: F::one(),
            window: (traj.time(half), traj.time(last)),
        });
    }
    let count = cst::<F>((last - half + 1) as f64);
    let mut t_mean = F::zero();
    let mut y_mean = F::zero();
    for node in half..=last {
        t_mean += traj.time(node);
        y_mean += norm2(traj.state(node)).ln();
    }
    t_mean /= count;
    y_mean /= count;
    let mut sxx = F::zero();
    let mut sxy = F::zero();
    let mut syy = F::zero();
    for node in half..=last {
        let dt = traj.time(node) - t_mean;
        let dy = norm2(traj.state(node)).ln() - y_mean;
        sxx += dt * dt;
        sxy += dt * dy;
        syy += dy * dy;
    }
    let rate = sxy / sxx;
    let r_squared = if syy > F::zero() {
        (sxy * sxy) / (sxx * syy)
    } else {
        F::one()
    };
    Ok(GrowthEstimate {
        rate,
        r_squared,
        window: (traj.time(half), traj.time(last)),
    })
}

fn norm2<F: Real>(state: &[F]) -> F {
    let mut acc = F::zero();
    for &v in state {
        acc += v * v;
    }
    acc.sqrt()
}

/// Integrate the slow flow at `(alpha, T, eps)` over `window` slow-time
/// units and classify: the fitted rate, with blow-up mapped to `+inf`.
pub fn slow_flow_rate<F: Real>(
    alpha: F,
    delay: F,
    eps: F,
    window: F,
    cfg: &ScanConfig<F>,
) -> Result<F, ScanError> {
    let p = Params::new(alpha, delay, eps, ModeSign::Antisymmetric)
        .map_err(|e| ScanError::InvalidConfig(e.to_string()))?;
    let prob = slow_flow_problem(&p, cfg.history);
    match integrate(&prob, window, cfg.step) {
        Ok(traj) => Ok(growth_rate(&traj)?.rate),
        Err(DdeError::NonFiniteState { .. }) => Ok(F::infinity()),
        Err(e) => Err(ScanError::InvalidConfig(e.to_string())),
    }
}

/// Locate the delay where the slow-flow growth rate changes sign, by
/// bisection on `[t_lo, t_hi]` down to width `tol`.
///
/// Probe windows adapt: `max(base, rate_coeff/|expected rate|)` with the
/// expected rate taken from the smallest rate magnitude measured so far
/// (seeded by the zero-`eps` trace estimate), plus a rotation floor, capped
/// at `window_cap`.
pub fn critical_delay<F: Real>(
    alpha: F,
    eps: F,
    t_lo: F,
    t_hi: F,
    tol: F,
    cfg: &ScanConfig<F>,
) -> Result<F, ScanError> {
    cfg.validate()?;
    if !(tol.is_finite() && tol > F::zero()) {
        return Err(ScanError::InvalidConfig(format!(
            "tol must be positive, got {tol}"
        )));
    }
    if !(t_lo.is_finite() && t_hi.is_finite() && t_lo < t_hi) {
        return Err(ScanError::InvalidConfig(format!(
            "need t_lo < t_hi, got [{t_lo}, {t_hi}]"
        )));
    }
    // expected-rate scale from the zero-eps trace: |-1 - 3 alpha cos T| / 2
    let trace_rate = |t: F| {
        ((-F::one() - cst::<F>(3.0) * alpha * t.cos()) * cst::<F>(0.5)).abs()
    };
    let scale_floor = self_scale_floor(cfg);
    let mut scale = trace_rate(t_lo)
        .min(trace_rate(t_hi))
        .max(scale_floor);

    let probe = |t: F, scale: F| -> Result<F, ScanError> {
        let window = cfg.window_for(alpha, scale);
        slow_flow_rate(alpha, t, eps, window, cfg)
    };

    let mut lo = t_lo;
    let mut hi = t_hi;
    let rate_lo = probe(lo, scale)?;
    if rate_lo == F::zero() {
        return Ok(lo);
    }
    let rate_hi = probe(hi, scale)?;
    if rate_hi == F::zero() {
        return Ok(hi);
    }
    if (rate_lo > F::zero()) == (rate_hi > F::zero()) {
        return Err(ScanError::NoSignChange {
            t_lo: lo.to_f64().unwrap_or(f64::NAN),
            t_hi: hi.to_f64().unwrap_or(f64::NAN),
            rate_lo: rate_lo.to_f64().unwrap_or(f64::NAN),
            rate_hi: rate_hi.to_f64().unwrap_or(f64::NAN),
        });
    }
    let lo_sign = rate_lo > F::zero();
    for r in [rate_lo, rate_hi] {
        if r.is_finite() {
            scale = scale.min(r.abs()).max(scale_floor);
        }
    }
    let half = cst::<F>(0.5);
    while hi - lo > tol {
        let mid = (lo + hi) * half;
        let rate = probe(mid, scale)?;
        if rate == F::zero() {
            return Ok(mid);
        }
        if (rate > F::zero()) == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
        if rate.is_finite() {
            scale = scale.min(rate.abs()).max(scale_floor);
        }
    }
    Ok((lo + hi) * half)
}

/// Rates below this produce capped windows anyway.
fn self_scale_floor<F: Real>(cfg: &ScanConfig<F>) -> F {
    cfg.rate_coeff / cfg.window_cap
}

/// One sweep point: series, characteristic-root and simulated critical
/// delays with the error columns comparing series against simulation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult<F> {
    pub alpha: F,
    pub eps: F,
    /// Delay series truncated after 1, 2, 3 terms.
    pub t_series: Option<[F; 3]>,
    /// Delay refined on the characteristic equation.
    pub t_newton: Option<F>,
    /// Delay located by simulation bisection.
    pub t_sim: Option<F>,
    pub abs_err: [Option<F>; 3],
    pub rel_err: [Option<F>; 3],
    pub pct_err: [Option<F>; 3],
    /// First failure encountered for this grid point, if any.
    pub error: Option<String>,
}

/// Half-width of the simulation bracket around the 3-term series value.
fn bracket_halfwidth<F: Real>() -> F {
    cst(0.4)
}

fn scan_point<F: Real>(alpha: F, eps: F, cfg: &ScanConfig<F>) -> ScanResult<F> {
    let mut out = ScanResult {
        alpha,
        eps,
        t_series: None,
        t_newton: None,
        t_sim: None,
        abs_err: [None; 3],
        rel_err: [None; 3],
        pct_err: [None; 3],
        error: None,
    };
    let note_error = |slot: &mut Option<String>, msg: String| {
        if slot.is_none() {
            *slot = Some(msg);
        }
    };
    let series: Vec<HopfPoint<F>> = match (1..=3)
        .map(|n| hopf_series(alpha, eps, n))
        .collect::<Result<_, _>>()
    {
        Ok(s) => s,
        Err(e) => {
            out.error = Some(e.to_string());
            return out;
        }
    };
    out.t_series = Some([series[0].delay, series[1].delay, series[2].delay]);

    // Newton cross-check; near the degenerate corner the frequency series
    // can be useless, so retry from the leading-order frequency
    let mut seed = series[2];
    if !seed.omega.is_finite() {
        seed.omega = F::zero(); // forces the fallback below
    }
    let fallback = HopfPoint {
        omega: series[0].omega.max(cst(1e-5)),
        ..seed
    };
    match hopf_newton(alpha, eps, &seed, cfg.newton_max_iter, cfg.newton_tol)
        .or_else(|_| hopf_newton(alpha, eps, &fallback, cfg.newton_max_iter, cfg.newton_tol))
    {
        Ok(p) => out.t_newton = Some(p.delay),
        Err(e) => note_error(&mut out.error, format!("newton: {e}")),
    }

    let t3 = series[2].delay;
    let hw = bracket_halfwidth::<F>();
    match critical_delay(alpha, eps, t3 - hw, t3 + hw, cfg.tol, cfg) {
        Ok(t_sim) => {
            out.t_sim = Some(t_sim);
            for n in 0..3 {
                let abs = (t_sim - series[n].delay).abs();
                let rel = abs / t_sim.abs();
                out.abs_err[n] = Some(abs);
                out.rel_err[n] = Some(rel);
                out.pct_err[n] = Some(rel * cst(100.0));
            }
        }
        Err(e) => note_error(&mut out.error, format!("simulation: {e}")),
    }
    out
}

/// Sweep the coupling grid at fixed `eps`. Points run in parallel; results
/// come back in grid order, and per-point failures are recorded in the
/// result rather than aborting the sweep.
pub fn sweep<F: Real>(alpha_grid: &[F], eps: F, cfg: &ScanConfig<F>) -> Vec<ScanResult<F>> {
    alpha_grid
        .par_iter()
        .map(|&alpha| scan_point(alpha, eps, cfg))
        .collect()
}

/// Uniform coupling grid on `[sqrt(2)/3, 1]`, endpoint-inclusive, with the
/// degenerate left endpoint nudged up by `1e-3`.
pub fn default_alpha_grid<F: Real>(points: usize) -> Vec<F> {
    assert!(points >= 2, "grid needs at least two points");
    let lo = alpha_min::<F>();
    let hi = F::one();
    let n1 = cst::<F>((points - 1) as f64);
    let mut grid: Vec<F> = (0..points)
        .map(|i| lo + (hi - lo) * cst::<F>(i as f64) / n1)
        .collect();
    grid[0] += cst(1e-3);
    grid
}

/// Maximum errors of the series truncations against the simulated critical
/// delay, over a coupling grid, per `(eps, n)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorTable<F> {
    pub eps: Vec<F>,
    pub n_terms: Vec<usize>,
    /// `abs[eps_index][n_index]`, `None` when every grid point failed.
    pub abs: Vec<Vec<Option<F>>>,
    pub rel: Vec<Vec<Option<F>>>,
    pub pct: Vec<Vec<Option<F>>>,
    /// Grid points that failed, as `(alpha, eps, message)`.
    pub failures: Vec<(F, F, String)>,
}

impl<F: Real> ErrorTable<F> {
    /// Aligned plain-text rendering of the three metric rows.
    pub fn to_plain_text(&self) -> String {
        let mut header = vec!["metric".to_string()];
        for &eps in &self.eps {
            for &n in &self.n_terms {
                header.push(format!("eps={eps} n={n}"));
            }
        }
        let fmt_cell = |v: &Option<F>| match v {
            Some(x) => format!("{:.4}", x.to_f64().unwrap_or(f64::NAN)),
            None => "-".to_string(),
        };
        let mut rows = vec![header];
        for (label, data) in [
            ("absolute error", &self.abs),
            ("relative error", &self.rel),
            ("percent error", &self.pct),
        ] {
            let mut row = vec![label.to_string()];
            for eps_cells in data {
                for cell in eps_cells {
                    row.push(fmt_cell(cell));
                }
            }
            rows.push(row);
        }
        let widths: Vec<usize> = (0..rows[0].len())
            .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap())
            .collect();
        let mut text = String::new();
        for row in &rows {
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    text.push_str("  ");
                }
                text.push_str(&format!("{:>width$}", cell, width = widths[c]));
            }
            text.push('\n');
        }
        text
    }

    /// CSV rendering: one row per metric, one column per `(eps, n)` cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "metric")?;
        for &eps in &self.eps {
            for &n in &self.n_terms {
                write!(w, ",eps{eps}_n{n}")?;
            }
        }
        writeln!(w)?;
        for (label, data) in [
            ("absolute_error", &self.abs),
            ("relative_error", &self.rel),
            ("percent_error", &self.pct),
        ] {
            write!(w, "{label}")?;
            for eps_cells in data.iter() {
                for &cell in eps_cells {
                    write!(w, ",{}", csv_cell(cell))?;
                }
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Build the error table: for each `eps`, sweep the default grid and take
/// the per-truncation maxima of the absolute, relative and percent errors.
pub fn error_table<F: Real>(
    eps_list: &[F],
    n_list: &[usize],
    grid_size: usize,
    cfg: &ScanConfig<F>,
) -> Result<ErrorTable<F>, ScanError> {
    if grid_size < 2 {
        return Err(ScanError::InvalidConfig(
            "grid_size must be at least 2".into(),
        ));
    }
    for &n in n_list {
        if !(1..=3).contains(&n) {
            return Err(ScanError::InvalidConfig(format!(
                "series truncation must be 1, 2 or 3, got {n}"
            )));
        }
    }
    cfg.validate()?;
    let grid = default_alpha_grid::<F>(grid_size);
    let mut table = ErrorTable {
        eps: eps_list.to_vec(),
        n_terms: n_list.to_vec(),
        abs: Vec::new(),
        rel: Vec::new(),
        pct: Vec::new(),
        failures: Vec::new(),
    };
    for &eps in eps_list {
        let results = sweep(&grid, eps, cfg);
        let mut abs_row = vec![None; n_list.len()];
        let mut rel_row = vec![None; n_list.len()];
        let mut pct_row = vec![None; n_list.len()];
        for r in &results {
            if let Some(msg) = &r.error {
                table.failures.push((r.alpha, eps, msg.clone()));
            }
            for (j, &n) in n_list.iter().enumerate() {
                fold_max(&mut abs_row[j], r.abs_err[n - 1]);
                fold_max(&mut rel_row[j], r.rel_err[n - 1]);
                fold_max(&mut pct_row[j], r.pct_err[n - 1]);
            }
        }
        table.abs.push(abs_row);
        table.rel.push(rel_row);
        table.pct.push(pct_row);
    }
    Ok(table)
}

fn fold_max<F: Real>(acc: &mut Option<F>, v: Option<F>) {
    if let Some(x) = v {
        *acc = Some(match *acc {
            Some(cur) if cur >= x => cur,
            _ => x,
        });
    }
}

fn csv_cell<F: Real>(v: Option<F>) -> String {
    match v {
        Some(x) => format!("{x}"),
        None => String::new(),
    }
}

/// Sweep results as CSV, one row per grid point:
/// `alpha,eps,T_sim,T_s1,T_s2,T_s3,T_newton,abs1..3,rel1..3,pct1..3,status`.
pub fn write_scan_csv<F: Real, W: Write>(
    results: &[ScanResult<F>],
    mut w: W,
) -> io::Result<()> {
    writeln!(
        w,
        "alpha,eps,T_sim,T_s1,T_s2,T_s3,T_newton,abs1,abs2,abs3,rel1,rel2,rel3,pct1,pct2,pct3,status"
    )?;
    for r in results {
        let ts = |i: usize| csv_cell(r.t_series.map(|t| t[i]));
        let errs = |cols: &[Option<F>; 3]| {
            cols.iter()
                .map(|&c| csv_cell(c))
                .collect::<Vec<_>>()
                .join(",")
        };
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.alpha,
            r.eps,
            csv_cell(r.t_sim),
            ts(0),
            ts(1),
            ts(2),
            csv_cell(r.t_newton),
            errs(&r.abs_err),
            errs(&r.rel_err),
            errs(&r.pct_err),
            r.error.as_deref().unwrap_or("ok"),
        )?;
    }
    Ok(())
}
