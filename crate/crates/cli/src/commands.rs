//! Subcommand implementations: assemble rows from the library, render them
//! in the requested format, and map failures onto exit codes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use coupled_vdp_core::dde::{antiphase_deviation, full_system_problem, integrate, slow_flow_problem, DdeError, Trajectory};
use coupled_vdp_core::model::{
    hopf_curve_ode, in_phase_mode, mode_birth_curve, saddle_node_curve, ModeSign, ModelError,
    Params,
};
use coupled_vdp_core::scan::{
    default_alpha_grid, error_table, growth_rate, sweep, write_scan_csv, GrowthEstimate,
    ScanConfig, ScanError,
};
use coupled_vdp_core::spectral::{hopf_newton, hopf_residual, hopf_series, SpectralError};

use crate::output::{cell, cell_opt, csv_table, emit, round15, Format};
use crate::{
    AlphaRange, AppError, CurvesArgs, Fig1Args, HopfArgs, InphaseArgs, OutArgs, ScanTuning,
    SimulateArgs, SystemKind, Table1Args,
};

fn require_positive(name: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(AppError::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

fn require_non_negative(name: &str, v: f64) -> Result<(), AppError> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(AppError::Config(format!(
            "{name} must be non-negative and finite, got {v}"
        )))
    }
}

impl ScanTuning {
    fn to_config(&self) -> Result<ScanConfig<f64>, AppError> {
        require_positive("--step", self.step)?;
        require_positive("--window", self.window)?;
        require_positive("--tol", self.tol)?;
        let mut cfg = ScanConfig::precise();
        cfg.step = self.step;
        cfg.base_window = self.window;
        cfg.tol = self.tol;
        Ok(cfg)
    }
}

fn linear_grid(
    name: &str,
    single: Option<f64>,
    min: Option<f64>,
    max: Option<f64>,
    steps: usize,
    default: (f64, f64),
) -> Result<Vec<f64>, AppError> {
    if let Some(v) = single {
        if !v.is_finite() {
            return Err(AppError::Config(format!("--{name} must be finite")));
        }
        return Ok(vec![v]);
    }
    let (lo, hi) = match (min, max) {
        (None, None) => default,
        (Some(lo), Some(hi)) => (lo, hi),
        _ => {
            return Err(AppError::Config(format!(
                "--{name}-min and --{name}-max must be given together"
            )))
        }
    };
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(AppError::Config(format!(
            "--{name}-min/--{name}-max must be finite with min <= max, got [{lo}, {hi}]"
        )));
    }
    if steps < 2 {
        return Err(AppError::Config(format!(
            "--{name}-steps must be at least 2, got {steps}"
        )));
    }
    let n1 = (steps - 1) as f64;
    Ok((0..steps).map(|i| lo + (hi - lo) * i as f64 / n1).collect())
}

impl AlphaRange {
    fn grid(&self, default: (f64, f64)) -> Result<Vec<f64>, AppError> {
        linear_grid(
            "alpha",
            self.alpha,
            self.alpha_min,
            self.alpha_max,
            self.alpha_steps,
            default,
        )
    }

    /// Grid for the scan commands: the nudged default grid unless an
    /// explicit point or range was requested.
    fn scan_grid(&self) -> Result<Vec<f64>, AppError> {
        if self.alpha.is_none() && self.alpha_min.is_none() && self.alpha_max.is_none() {
            if self.alpha_steps < 2 {
                return Err(AppError::Config(format!(
                    "--alpha-steps must be at least 2, got {}",
                    self.alpha_steps
                )));
            }
            Ok(default_alpha_grid(self.alpha_steps))
        } else {
            self.grid((0.0, 0.0))
        }
    }
}

fn reject_text(format: Format) -> Result<(), AppError> {
    if format == Format::Text {
        Err(AppError::Config(
            "--format text is only available for the table1 command".into(),
        ))
    } else {
        Ok(())
    }
}

fn render<T: Serialize>(
    out: &OutArgs,
    header: &[&str],
    csv_rows: Vec<Vec<String>>,
    json_rows: &[T],
) -> Result<(), AppError> {
    let body = match out.format {
        Format::Csv => csv_table(header, &csv_rows),
        Format::Json => {
            let mut s = serde_json::to_string_pretty(json_rows).expect("serializable rows");
            s.push('\n');
            s
        }
        Format::Text => unreachable!("rejected earlier"),
    };
    emit(&out.out, &body)?;
    Ok(())
}

// ---------------------------------------------------------------- inphase

#[derive(Serialize)]
struct InphaseRow {
    alpha: f64,
    #[serde(rename = "T")]
    delay: f64,
    eps: f64,
    exists: bool,
    #[serde(rename = "R")]
    amplitude: Option<f64>,
    omega: Option<f64>,
}

pub fn inphase(args: InphaseArgs) -> Result<(), AppError> {
    reject_text(args.out.format)?;
    require_non_negative("--eps", args.eps)?;
    let alphas = args.alpha.grid((0.0, 1.0))?;
    let delays = linear_grid(
        "T",
        args.delay,
        args.delay_min,
        args.delay_max,
        args.delay_steps,
        (std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2),
    )?;
    for &t in &delays {
        require_non_negative("--T", t)?;
    }
    let mut rows = Vec::new();
    for &alpha in &alphas {
        for &delay in &delays {
            let p = Params::new(alpha, delay, args.eps, ModeSign::Antisymmetric)
                .map_err(|e| AppError::Config(e.to_string()))?;
            let row = match in_phase_mode(&p) {
                Ok(mode) => InphaseRow {
                    alpha,
                    delay,
                    eps: args.eps,
                    exists: true,
                    amplitude: Some(mode.amplitude),
                    omega: Some(mode.omega),
                },
                Err(ModelError::ModeNonexistent { .. }) => InphaseRow {
                    alpha,
                    delay,
                    eps: args.eps,
                    exists: false,
                    amplitude: None,
                    omega: None,
                },
                Err(e) => return Err(AppError::Numeric(e.to_string())),
            };
            rows.push(row);
        }
    }
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                cell(r.alpha),
                cell(r.delay),
                cell(r.eps),
                r.exists.to_string(),
                cell_opt(r.amplitude),
                cell_opt(r.omega),
            ]
        })
        .collect();
    render(
        &args.out,
        &["alpha", "T", "eps", "exists", "R", "omega"],
        csv_rows,
        &rows,
    )
}

// ----------------------------------------------------------------- curves

#[derive(Serialize)]
struct CurveRow {
    alpha: f64,
    hopf_ode: Option<f64>,
    saddle_node: Option<f64>,
    mode_birth: Option<f64>,
}

pub fn curves(args: CurvesArgs) -> Result<(), AppError> {
    reject_text(args.out.format)?;
    let alphas = args.alpha.grid((0.0, 2.0))?;
    let rows: Vec<CurveRow> = alphas
        .iter()
        .map(|&alpha| CurveRow {
            alpha,
            hopf_ode: hopf_curve_ode(alpha).ok(),
            saddle_node: saddle_node_curve(alpha).ok(),
            mode_birth: mode_birth_curve(alpha).ok(),
        })
        .collect();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                cell(r.alpha),
                cell_opt(r.hopf_ode),
                cell_opt(r.saddle_node),
                cell_opt(r.mode_birth),
            ]
        })
        .collect();
    render(
        &args.out,
        &["alpha", "hopf_ode", "saddle_node", "mode_birth"],
        csv_rows,
        &rows,
    )
}

// ------------------------------------------------------------------- fig1

#[derive(Serialize)]
struct Fig1Row {
    alpha: f64,
    #[serde(rename = "T_s1")]
    t_s1: Option<f64>,
    #[serde(rename = "T_s2")]
    t_s2: Option<f64>,
    #[serde(rename = "T_s3")]
    t_s3: Option<f64>,
    #[serde(rename = "T_sim")]
    t_sim: Option<f64>,
    status: String,
}

#[derive(Serialize)]
struct FullScanRow {
    alpha: f64,
    eps: f64,
    #[serde(rename = "T_sim")]
    t_sim: Option<f64>,
    #[serde(rename = "T_s1")]
    t_s1: Option<f64>,
    #[serde(rename = "T_s2")]
    t_s2: Option<f64>,
    #[serde(rename = "T_s3")]
    t_s3: Option<f64>,
    #[serde(rename = "T_newton")]
    t_newton: Option<f64>,
    abs_err: [Option<f64>; 3],
    rel_err: [Option<f64>; 3],
    pct_err: [Option<f64>; 3],
    status: String,
}

pub fn fig1(args: Fig1Args) -> Result<(), AppError> {
    reject_text(args.out.format)?;
    require_non_negative("--eps", args.eps)?;
    let cfg = args.tuning.to_config()?;
    let grid = args.alpha.scan_grid()?;
    let results = sweep(&grid, args.eps, &cfg);
    if args.full {
        let rows: Vec<FullScanRow> = results
            .iter()
            .map(|r| FullScanRow {
                alpha: r.alpha,
                eps: r.eps,
                t_sim: r.t_sim,
                t_s1: r.t_series.map(|t| t[0]),
                t_s2: r.t_series.map(|t| t[1]),
                t_s3: r.t_series.map(|t| t[2]),
                t_newton: r.t_newton,
                abs_err: r.abs_err,
                rel_err: r.rel_err,
                pct_err: r.pct_err,
                status: r.error.clone().unwrap_or_else(|| "ok".into()),
            })
            .collect();
        let body = match args.out.format {
            Format::Csv => {
                let mut buf = Vec::new();
                write_scan_csv(&results, &mut buf)?;
                String::from_utf8(buf).expect("csv is utf-8")
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&rows).expect("serializable rows");
                s.push('\n');
                s
            }
            Format::Text => unreachable!(),
        };
        emit(&args.out.out, &body)?;
        return Ok(());
    }
    let rows: Vec<Fig1Row> = results
        .iter()
        .map(|r| Fig1Row {
            alpha: r.alpha,
            t_s1: r.t_series.map(|t| t[0]),
            t_s2: r.t_series.map(|t| t[1]),
            t_s3: r.t_series.map(|t| t[2]),
            t_sim: r.t_sim,
            status: r.error.clone().unwrap_or_else(|| "ok".into()),
        })
        .collect();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                cell(r.alpha),
                cell_opt(r.t_s1),
                cell_opt(r.t_s2),
                cell_opt(r.t_s3),
                cell_opt(r.t_sim),
                r.status.clone(),
            ]
        })
        .collect();
    render(
        &args.out,
        &["alpha", "T_s1", "T_s2", "T_s3", "T_sim", "status"],
        csv_rows,
        &rows,
    )
}

// ----------------------------------------------------------------- table1

pub fn table1(args: Table1Args) -> Result<(), AppError> {
    let cfg = args.tuning.to_config()?;
    if args.grid < 2 {
        return Err(AppError::Config(format!(
            "--grid must be at least 2, got {}",
            args.grid
        )));
    }
    let eps_list = [0.1, 0.3, 0.5];
    let n_list = [1, 2, 3];
    let table = error_table(&eps_list, &n_list, args.grid, &cfg)
        .map_err(|e| AppError::Numeric(e.to_string()))?;
    if table.abs.iter().flatten().any(|c| c.is_none()) {
        return Err(AppError::Numeric(format!(
            "error table has empty cells; first failure: {:?}",
            table.failures.first()
        )));
    }
    let body = match args.out.format {
        Format::Csv => {
            let mut buf = Vec::new();
            table.write_csv(&mut buf)?;
            String::from_utf8(buf).expect("csv is utf-8")
        }
        Format::Text => table.to_plain_text(),
        Format::Json => {
            let value = serde_json::json!({
                "eps": table.eps,
                "n_terms": table.n_terms,
                "absolute_error": table.abs,
                "relative_error": table.rel,
                "percent_error": table.pct,
            });
            let mut s = serde_json::to_string_pretty(&value).expect("serializable table");
            s.push('\n');
            s
        }
    };
    emit(&args.out.out, &body)?;
    Ok(())
}

// --------------------------------------------------------------- simulate

struct SimOutcome {
    trajectory: Trajectory<f64>,
    growth: Option<GrowthEstimate<f64>>,
    blowup_time: Option<f64>,
    names: &'static [&'static str],
    rate_of: &'static str,
}

pub fn simulate(args: SimulateArgs) -> Result<(), AppError> {
    reject_text(args.out.format)?;
    require_positive("--step", args.step)?;
    require_positive("--window", args.window)?;
    require_non_negative("--eps", args.eps)?;
    require_non_negative("--T", args.delay)?;
    let beta = ModeSign::from_value(args.beta as f64)
        .ok_or_else(|| AppError::Config(format!("--beta must be +1 or -1, got {}", args.beta)))?;
    let params = Params::new(args.alpha, args.delay, args.eps, beta)
        .map_err(|e| AppError::Config(e.to_string()))?;

    let outcome = match args.system {
        SystemKind::Slow => {
            let history = match args.seed {
                Some(seed) => {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]
                }
                None => [args.a0, args.b0],
            };
            let prob = slow_flow_problem(&params, history);
            run_sim(&prob, args.window, args.step, &["A", "B"], "state", |t| {
                t.clone()
            })?
        }
        SystemKind::Full => {
            let prob = full_system_problem(&params, [args.perturb_x, args.perturb_v])
                .map_err(|e| AppError::Numeric(e.to_string()))?;
            run_sim(
                &prob,
                args.window,
                args.step,
                &["x1", "v1", "x2", "v2"],
                "antiphase_deviation",
                antiphase_deviation,
            )?
        }
    };

    let growth_json = outcome.growth.as_ref().map(|g| {
        serde_json::json!({
            "rate": if g.rate.is_finite() { serde_json::json!(g.rate) } else { serde_json::json!(g.rate.to_string()) },
            "r_squared": g.r_squared,
            "window": [g.window.0, g.window.1],
            "rate_of": outcome.rate_of,
        })
    });
    match args.out.format {
        Format::Csv => {
            let mut body = String::new();
            match &outcome.growth {
                Some(g) => {
                    body.push_str(&format!(
                        "# rate={} r_squared={} window_start={} window_end={} rate_of={}\n",
                        g.rate, g.r_squared, g.window.0, g.window.1, outcome.rate_of
                    ));
                }
                None => body.push_str("# rate=unavailable\n"),
            }
            if let Some(t) = outcome.blowup_time {
                body.push_str(&format!("# blowup_time={t}\n"));
            }
            let mut buf = Vec::new();
            outcome
                .trajectory
                .write_csv(&mut buf, Some(outcome.names))?;
            body.push_str(&String::from_utf8(buf).expect("csv is utf-8"));
            emit(&args.out.out, &body)?;
        }
        Format::Json => {
            let traj = &outcome.trajectory;
            let times: Vec<f64> = (0..traj.node_count())
                .map(|i| round15(traj.time(i)))
                .collect();
            let states: Vec<Vec<f64>> = (0..traj.node_count())
                .map(|i| traj.state(i).iter().map(|&v| round15(v)).collect())
                .collect();
            let value = serde_json::json!({
                "system": match args.system { SystemKind::Slow => "slow", SystemKind::Full => "full" },
                "alpha": args.alpha,
                "T": args.delay,
                "eps": args.eps,
                "beta": args.beta,
                "growth": growth_json,
                "blowup_time": outcome.blowup_time,
                "trajectory": {
                    "names": outcome.names,
                    "t": times,
                    "states": states,
                },
            });
            let mut s = serde_json::to_string_pretty(&value).expect("serializable");
            s.push('\n');
            emit(&args.out.out, &s)?;
        }
        Format::Text => unreachable!(),
    }
    Ok(())
}

fn run_sim(
    prob: &coupled_vdp_core::DdeProblem64,
    window: f64,
    step: f64,
    names: &'static [&'static str],
    rate_of: &'static str,
    project: impl Fn(&Trajectory<f64>) -> Trajectory<f64>,
) -> Result<SimOutcome, AppError> {
    match integrate(prob, window, step) {
        Ok(traj) => {
            let growth = match growth_rate(&project(&traj)) {
                Ok(g) => Some(g),
                Err(ScanError::TooShort { .. }) => None,
                Err(e) => return Err(AppError::Numeric(e.to_string())),
            };
            Ok(SimOutcome {
                trajectory: traj,
                growth,
                blowup_time: None,
                names,
                rate_of,
            })
        }
        Err(DdeError::NonFiniteState { time, trajectory }) => Ok(SimOutcome {
            trajectory: *trajectory,
            growth: Some(GrowthEstimate {
                rate: f64::INFINITY,
                r_squared: 1.0,
                window: (0.0, time),
            }),
            blowup_time: Some(time),
            names,
            rate_of,
        }),
        Err(e) => Err(AppError::Numeric(e.to_string())),
    }
}

// ------------------------------------------------------------------- hopf

#[derive(Serialize)]
struct HopfRow {
    alpha: f64,
    eps: f64,
    n_terms: usize,
    #[serde(rename = "T_series")]
    t_series: f64,
    omega_series: f64,
    #[serde(rename = "T_newton")]
    t_newton: f64,
    omega_newton: f64,
    residual: f64,
}

pub fn hopf(args: HopfArgs) -> Result<(), AppError> {
    reject_text(args.out.format)?;
    require_non_negative("--eps", args.eps)?;
    require_positive("--tol", args.tol)?;
    if !(1..=3).contains(&args.n_terms) {
        return Err(AppError::Config(format!(
            "--n-terms must be 1, 2 or 3, got {}",
            args.n_terms
        )));
    }
    let to_numeric = |e: SpectralError| AppError::Numeric(e.to_string());
    let series = hopf_series(args.alpha, args.eps, args.n_terms).map_err(to_numeric)?;
    let refined =
        hopf_newton(args.alpha, args.eps, &series, args.max_iter, args.tol).map_err(to_numeric)?;
    let row = HopfRow {
        alpha: args.alpha,
        eps: args.eps,
        n_terms: args.n_terms,
        t_series: series.delay,
        omega_series: series.omega,
        t_newton: refined.delay,
        omega_newton: refined.omega,
        residual: hopf_residual(args.alpha, args.eps, refined.delay, refined.omega),
    };
    let csv_rows = vec![vec![
        cell(row.alpha),
        cell(row.eps),
        row.n_terms.to_string(),
        cell(row.t_series),
        cell(row.omega_series),
        cell(row.t_newton),
        cell(row.omega_newton),
        cell(row.residual),
    ]];
    render(
        &args.out,
        &[
            "alpha",
            "eps",
            "n_terms",
            "T_series",
            "omega_series",
            "T_newton",
            "omega_newton",
            "residual",
        ],
        csv_rows,
        &[row],
    )
}
