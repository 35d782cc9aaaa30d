use thermal_qfi::bounds::{bound_report, c1_const, ln_c2_const, relative_error_bounds_classical};
use thermal_qfi::models::{ghz_exact, GhzModel, GHZ_MAX_QUBITS};
use thermal_qfi::qfi::{qfi_matrix_labeled, saturability};
use thermal_qfi::{gibbs, thermal_state};

use crate::config::ModelConfig;
use crate::error::{CliError, CliResult};
use crate::table::{Row, Table};

/// Evaluates `f` at every point, concurrently when built with `parallel`,
/// returning results in point order.
fn map_points<T: Send>(points: &[f64], f: impl Fn(f64) -> CliResult<T> + Sync + Send) -> CliResult<Vec<T>> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.par_iter().map(|&x| f(x)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.iter().map(|&x| f(x)).collect()
    }
}

/// Sweep points sorted ascending, or a single unswept evaluation.
fn sweep_plan(cfg: &ModelConfig) -> CliResult<(Option<String>, Vec<f64>)> {
    Ok(match cfg.sweep_points()? {
        Some((var, mut pts)) => {
            pts.sort_by(f64::total_cmp);
            (Some(var), pts)
        }
        None => (None, vec![f64::NAN]),
    })
}

fn evaluate<T: Send>(
    cfg: &ModelConfig,
    f: impl Fn(&thermal_qfi::ParamHamiltonian, f64) -> CliResult<T> + Sync + Send,
) -> CliResult<(Option<String>, Vec<f64>, Vec<T>)> {
    let (var, points) = sweep_plan(cfg)?;
    let results = map_points(&points, |x| {
        let (h, beta) = cfg.point(var.as_deref().map(|v| (v, x)))?;
        f(&h, beta)
    })?;
    Ok((var, points, results))
}

fn leading_columns(var: &Option<String>) -> Vec<String> {
    let mut cols = Vec::new();
    if let Some(v) = var {
        cols.push(format!("sweep:{v}"));
    }
    cols.push("beta".into());
    cols
}

/// QFI matrix, variances, skew informations and saturability values per point.
pub fn cmd_qfi(cfg: &ModelConfig) -> CliResult<Table> {
    let labels = cfg.labels();
    let m = labels.len();
    let (var, points, results) = evaluate(cfg, |h, beta| {
        let rho = thermal_state(h, beta)?;
        let gens = h.generators();
        let f = qfi_matrix_labeled(&rho, h.labels(), &gens)?;
        let mut var = Vec::with_capacity(m);
        let mut skew = Vec::with_capacity(m);
        for g in &gens {
            var.push(gibbs::variance(&rho, g)?);
            skew.push(gibbs::skew_information(&rho, g)?);
        }
        let mut sat = Vec::new();
        for l in 0..m {
            for k in (l + 1)..m {
                sat.push(saturability(&rho, &gens[l], &gens[k])?);
            }
        }
        Ok((beta, f, var, skew, sat))
    })?;

    let mut header = leading_columns(&var);
    for a in &labels {
        for b in &labels {
            header.push(format!("qfi:{a}:{b}"));
        }
    }
    header.extend(labels.iter().map(|a| format!("variance:{a}")));
    header.extend(labels.iter().map(|a| format!("skew:{a}")));
    for l in 0..m {
        for k in (l + 1)..m {
            header.push(format!("saturability:{}:{}", labels[l], labels[k]));
        }
    }
    let mut table = Table::new(header.clone());
    for (x, (beta, f, v, s, sat)) in points.iter().zip(results) {
        let mut row = Row::new();
        let mut col = header.iter();
        if var.is_some() {
            row.num(col.next().unwrap(), *x);
        }
        row.num(col.next().unwrap(), beta);
        for l in 0..m {
            for k in 0..m {
                row.num(col.next().unwrap(), f.get(l, k));
            }
        }
        for value in v.iter().chain(&s).chain(&sat) {
            row.num(col.next().unwrap(), *value);
        }
        table.push(row);
    }
    Ok(table)
}

const PARAMETER_COLUMNS: [&str; 15] = [
    "qfi",
    "variance",
    "skew",
    "classical",
    "diag_variance",
    "variance_upper",
    "variance_upper_refined",
    "variance_lower",
    "classical_upper",
    "classical_lower",
    "miller_upper",
    "relerr_variance_lower",
    "relerr_variance_upper",
    "relerr_classical_lower",
    "relerr_classical_upper",
];

const CONTEXT_COLUMNS: [&str; 5] = ["seminorm", "min_gap", "c1_seminorm", "c1_mingap", "c2"];

const MULTI_COLUMNS: [&str; 8] = [
    "trace_inv_qfi",
    "sum_inv_diag",
    "eps2_lower_trace",
    "eps2_lower_diag",
    "samples_classical",
    "samples_variance",
    "samples_order_variance",
    "samples_order_combined",
];

/// Full bound report per point.
pub fn cmd_bounds(cfg: &ModelConfig, n_samples: u64, eps_err: f64) -> CliResult<Table> {
    if n_samples == 0 {
        return Err(CliError::Config("--samples must be at least 1".into()));
    }
    if !(eps_err.is_finite() && eps_err > 0.0) {
        return Err(CliError::Config(format!("--eps-err must be positive, found {eps_err}")));
    }
    let labels = cfg.labels();
    let (var, points, reports) = evaluate(cfg, |h, beta| Ok(bound_report(h, beta, n_samples, eps_err)?))?;

    let mut header = leading_columns(&var);
    header.extend(CONTEXT_COLUMNS.iter().map(|s| s.to_string()));
    header.push("n_samples".into());
    header.push("eps_err".into());
    for a in &labels {
        header.extend(PARAMETER_COLUMNS.iter().map(|c| format!("{c}:{a}")));
    }
    header.extend(MULTI_COLUMNS.iter().map(|s| s.to_string()));

    let mut table = Table::new(header.clone());
    for (x, r) in points.iter().zip(reports) {
        let mut row = Row::new();
        let mut names = header.iter().map(String::as_str);
        let mut next = || names.next().expect("header covers every cell");
        if var.is_some() {
            row.num(next(), *x);
        }
        let c = &r.context;
        for v in [c.beta, c.seminorm, c.min_gap, c.c1_seminorm, c.c1_mingap, c.c2] {
            row.num(next(), v);
        }
        next();
        row.int(n_samples);
        row.num(next(), eps_err);
        for p in &r.parameters {
            for v in [
                p.qfi_exact,
                p.variance,
                p.skew,
                p.classical,
                p.diag_variance,
                p.variance_upper,
                p.variance_upper_refined,
                p.variance_lower,
                p.classical_upper,
                p.classical_lower,
                p.miller_upper,
            ] {
                row.num(next(), v);
            }
            let rel = p.relative;
            row.opt(next(), rel.map(|b| b.variance_lower), "not estimable");
            row.opt(next(), rel.map(|b| b.variance_upper), "not estimable");
            row.opt(next(), rel.map(|b| b.classical_lower), "not estimable");
            row.opt(next(), rel.map(|b| b.classical_upper), "not estimable");
        }
        let mb = &r.multi;
        row.opt(next(), mb.trace_inv_qfi, "qfi singular");
        row.num(next(), mb.sum_inv_diag);
        row.opt(next(), mb.eps2_lower_trace, "qfi singular");
        for v in [
            mb.eps2_lower_diag,
            mb.sample_lower_classical,
            mb.sample_lower_variance,
            mb.sample_order_variance,
            mb.sample_order_combined,
        ] {
            row.num(next(), v);
        }
        table.push(row);
    }
    Ok(table)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Default fit window for the size sweep.
pub const FIT_WINDOW: (usize, usize) = (10, 24);

#[derive(Debug, Clone)]
pub struct SizeSweep {
    pub table: Table,
    pub slope: f64,
    pub fit_range: (usize, usize),
}

/// Exact relative error of the `mu` estimate in the GHZ model versus size,
/// with the variance- and classical-uncertainty bounds and the `1/sqrt(n)`
/// reference. One sample per point; `beta = 1`, so `mu = mu_beta`.
pub fn cmd_fig2(mu_beta: f64, lambda_beta: f64, n_min: usize, n_max: usize) -> CliResult<SizeSweep> {
    if !(mu_beta.is_finite() && mu_beta > 0.0 && lambda_beta.is_finite() && lambda_beta > 0.0) {
        return Err(CliError::Config("--mu-beta and --lambda-beta must be positive".into()));
    }
    if n_min < 2 || n_max < n_min || n_max > GHZ_MAX_QUBITS {
        return Err(CliError::Config(format!(
            "size range must satisfy 2 <= n-min <= n-max <= {GHZ_MAX_QUBITS}, got {n_min}..{n_max}"
        )));
    }
    let sizes: Vec<f64> = (n_min..=n_max).map(|n| n as f64).collect();
    let rows = map_points(&sizes, |nf| {
        let m = GhzModel::new(nf as usize, mu_beta, lambda_beta, 1.0)?;
        let e = ghz_exact(&m);
        let rel_exact = 1.0 / (mu_beta * e.qfi_mu.sqrt());
        let ln_c2 = ln_c2_const(1.0, e.seminorm);
        let bounds = relative_error_bounds_classical(
            1.0,
            1,
            mu_beta,
            e.var_hmu,
            e.classical_hmu,
            c1_const(1.0, e.seminorm),
            ln_c2,
        )?;
        Ok((rel_exact, bounds))
    })?;

    let header: Vec<String> = [
        "n",
        "relative_error",
        "relerr_variance_lower",
        "relerr_variance_upper",
        "relerr_classical_lower",
        "relerr_classical_upper",
        "sql_reference",
        "n_samples",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let mut table = Table::new(header.clone());
    for (nf, (rel, b)) in sizes.iter().zip(&rows) {
        let mut row = Row::new();
        row.int(*nf as u64);
        for (name, v) in header[1..7].iter().zip([
            *rel,
            b.variance_lower,
            b.variance_upper,
            b.classical_lower,
            b.classical_upper,
            1.0 / nf.sqrt(),
        ]) {
            row.num(name, v);
        }
        row.int(1);
        table.push(row);
    }

    let lo = FIT_WINDOW.0.max(n_min);
    let hi = FIT_WINDOW.1.min(n_max);
    let fit_range = if hi > lo { (lo, hi) } else { (n_min, n_max) };
    let (xs, ys): (Vec<f64>, Vec<f64>) = sizes
        .iter()
        .zip(&rows)
        .filter(|(n, _)| (fit_range.0 as f64..=fit_range.1 as f64).contains(*n))
        .map(|(n, (rel, _))| (*n, *rel))
        .unzip();
    let slope = if xs.len() >= 2 { fit_loglog_slope(&xs, &ys) } else { f64::NAN };
    table.footer(format!(
        "slope_fit n_from={} n_to={} slope={} sql_slope=-0.5",
        fit_range.0,
        fit_range.1,
        crate::table::format_float(slope)
    ));
    table.footer(format!(
        "convention n_samples=1 beta=1 mu={} lambda={}",
        crate::table::format_float(mu_beta),
        crate::table::format_float(lambda_beta)
    ));
    Ok(SizeSweep { table, slope, fit_range })
}
