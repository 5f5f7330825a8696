use std::path::{Path, PathBuf};

use weighted_savgol::metrics::{
    closed_forms, compare_weightings, degree_zero_approximations, frequency_response,
    ratio_approximations,
};
use weighted_savgol::verify::{
    smoothness_at, smoothness_gradient, verification_grid, verify_pair, Tolerances,
};
use weighted_savgol::{
    design_coefficients, quadratic_weights, smooth as smooth_signal, EdgePolicy,
    FilterCoefficients, FilterSpec, MetricsReport, SignalSeries, WeightKind, WeightVector,
};

use crate::error::{failure, usage, CliResult};
use crate::io::{
    exact, opt, parse_grid, parse_weight_kinds, read_weight_file, short, CoefficientDocument,
    Format, Sink,
};
use crate::{DesignArgs, OutputArgs};

fn check_window(q: usize) -> CliResult<()> {
    if q == 0 || q.is_multiple_of(2) {
        return Err(usage(format!(
            "window length must be a positive odd integer, got {q}"
        )));
    }
    Ok(())
}

fn spec_from_args(args: &DesignArgs, kind: Option<WeightKind>) -> CliResult<FilterSpec> {
    let weights = match (&args.weight_file, kind) {
        (Some(path), None) => {
            let w = read_weight_file(path)?;
            if let Some(q) = args.window.filter(|&q| q != w.q()) {
                return Err(usage(format!(
                    "--window {q} disagrees with the {} weights in {}",
                    w.q(),
                    path.display()
                )));
            }
            w
        }
        (_, kind) => {
            let q = args
                .window
                .ok_or_else(|| usage("--window is required without --weight-file"))?;
            check_window(q)?;
            let kind = match kind {
                Some(k) => k,
                None => args.weight.parse()?,
            };
            if kind == WeightKind::Custom {
                return Err(usage("custom weights need --weight-file"));
            }
            kind.generate(q)?
        }
    };
    check_window(weights.q())?;
    Ok(FilterSpec::centered(args.degree, weights)?)
}

pub fn design(args: &DesignArgs, format: Format, out: &OutputArgs) -> CliResult<()> {
    let spec = spec_from_args(args, None)?;
    let c = design_coefficients(&spec)?;
    let report = MetricsReport::new(&c);
    let mut sink = Sink::open(out.output.as_deref())?;
    match format {
        Format::Json => sink.json(&CoefficientDocument::new(&c, &report))?,
        Format::Csv | Format::Table => {
            let fmt = if format == Format::Csv { exact } else { short };
            let rows: Vec<Vec<String>> = c
                .taps()
                .iter()
                .zip(spec.weights().values())
                .enumerate()
                .map(|(i, (tap, w))| {
                    vec![
                        i.to_string(),
                        fmt(*w),
                        fmt(*tap),
                        fmt(report.r),
                        fmt(report.s),
                    ]
                })
                .collect();
            if format == Format::Table {
                sink.write_str(&format!(
                    "q = {}, degree = {}, weights = {}, r = {}, s = {}\n",
                    spec.q(),
                    spec.degree(),
                    spec.weights().kind(),
                    short(report.r),
                    short(report.s)
                ))?;
                let rows: Vec<Vec<String>> = rows.into_iter().map(|r| r[..3].to_vec()).collect();
                sink.table(&["index", "weight", "coefficient"], &rows)?;
            } else {
                sink.csv(&["index", "weight", "coefficient", "r", "s"], &rows)?;
            }
        }
    }
    sink.finish()
}

const SWEEP_HEADER: [&str; 21] = [
    "q",
    "degree",
    "n",
    "m",
    "weight",
    "r",
    "s",
    "r0_over_r2",
    "s0_over_s2",
    "s0_over_s1",
    "r0_over_r2_closed",
    "s0_over_s2_closed",
    "r0_over_r2_approx_q",
    "s0_over_s2_approx_q",
    "r0_over_r2_approx_mn",
    "s0_over_s2_approx_mn",
    "s0_over_s1_approx_mn",
    "rel_err_r0_over_r2_approx_q",
    "rel_err_s0_over_s2_approx_q",
    "rel_err_r0_over_r2_approx_mn",
    "rel_err_s0_over_s2_approx_mn",
];

pub fn sweep(
    windows: &str,
    degrees: &str,
    weights: &str,
    format: Format,
    out: &OutputArgs,
) -> CliResult<()> {
    let windows = parse_grid(windows, "window")?;
    let degrees = parse_grid(degrees, "degree")?;
    let kinds = parse_weight_kinds(weights)?;
    for &q in &windows {
        check_window(q)?;
    }
    let fmt = if format == Format::Table {
        short
    } else {
        exact
    };
    let rel = |a: f64, b: f64| ((a - b) / b).abs();

    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for &q in &windows {
        for &degree in &degrees {
            let spec = match FilterSpec::centered_with(q, degree, WeightKind::Constant) {
                Ok(s) => s,
                Err(_) => {
                    skipped.push(format!("(q={q}, degree={degree})"));
                    continue;
                }
            };
            let cmp = compare_weightings(q, degree)?;
            let (n, m) = (spec.n(), q.div_ceil(2));
            let exact_ratios = [cmp.r0_over_r2(), cmp.s0_over_s2(), cmp.s0_over_s1()];
            let closed = (n == 1).then(|| closed_forms(q)).transpose()?;
            let by_q = (n == 1)
                .then(|| degree_zero_approximations(q))
                .transpose()?;
            let by_mn = ratio_approximations(m, n)?;
            for &kind in &kinds {
                let (r, s) = cmp.get(kind).expect("generated kind");
                let mut row = vec![
                    q.to_string(),
                    degree.to_string(),
                    n.to_string(),
                    m.to_string(),
                    kind.to_string(),
                    fmt(r),
                    fmt(s),
                ];
                row.extend(exact_ratios.iter().map(|&x| fmt(x)));
                row.push(opt(closed.map(|c| c.r0_over_r2()), fmt));
                row.push(opt(closed.map(|c| c.s0_over_s2()), fmt));
                row.push(opt(by_q.map(|a| a.r0_over_r2), fmt));
                row.push(opt(by_q.map(|a| a.s0_over_s2), fmt));
                row.push(fmt(by_mn.r0_over_r2));
                row.push(fmt(by_mn.s0_over_s2));
                row.push(fmt(by_mn.s0_over_s1));
                row.push(opt(by_q.map(|a| rel(a.r0_over_r2, exact_ratios[0])), fmt));
                row.push(opt(by_q.map(|a| rel(a.s0_over_s2, exact_ratios[1])), fmt));
                row.push(fmt(rel(by_mn.r0_over_r2, exact_ratios[0])));
                row.push(fmt(rel(by_mn.s0_over_s2, exact_ratios[1])));
                rows.push(row);
            }
        }
    }
    if !skipped.is_empty() {
        eprintln!(
            "wsg: skipped over-parameterized combinations {}",
            skipped.join(" ")
        );
    }
    if rows.is_empty() {
        return Err(usage("empty grid: no valid (window, degree) combination"));
    }
    let mut sink = Sink::open(out.output.as_deref())?;
    sink.rows(format, &SWEEP_HEADER, &rows)?;
    sink.finish()
}

pub struct VerifyArgs {
    pub max_window: usize,
    pub max_degree: usize,
    pub seed: u64,
    pub trials: usize,
    pub weight_file: Option<PathBuf>,
}

const VERIFY_HEADER: [&str; 15] = [
    "q",
    "n",
    "tw_eigenvalues",
    "max_eigenvalue_rel_dev",
    "orthonormality_err",
    "eigen_relation_err",
    "max_abs_gradient",
    "min_hessian_eigenvalue",
    "min_perturbation_delta_s",
    "projected_zero_count",
    "lambda_min",
    "lambda_min_closed_form",
    "projected_max_eigenvalue",
    "status",
    "failed_checks",
];

pub fn verify(args: &VerifyArgs, format: Format, out: &OutputArgs) -> CliResult<()> {
    if let Some(path) = &args.weight_file {
        let weights = read_weight_file(path)?;
        return verify_candidate(&weights, args.max_degree, format, out);
    }
    check_window(args.max_window)?;
    if args.max_window < 3 {
        return Err(usage("--max-window must be at least 3"));
    }
    let grid = verification_grid(args.max_window, args.max_degree / 2 + 1);
    let tol = Tolerances::default();
    let fmt = if format == Format::Table {
        short
    } else {
        exact
    };

    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for (q, n) in grid {
        let seed = args.seed.wrapping_add((q * 1000 + n) as u64);
        let rep = verify_pair(q, n, args.trials, seed, &tol)?;
        let failures = rep.checks.failures();
        if !failures.is_empty() {
            failed.push(format!("(q={q}, n={n}: {})", failures.join(", ")));
        }
        let eig = rep
            .eigenvalues_tw
            .iter()
            .map(|v| format!("{}", (v * 1e9).round() / 1e9))
            .collect::<Vec<_>>()
            .join(" ");
        rows.push(vec![
            q.to_string(),
            n.to_string(),
            eig,
            fmt(rep.eigenvalue_max_rel_deviation),
            fmt(rep.orthonormality_error),
            fmt(rep.eigen_relation_error),
            fmt(rep.max_abs_gradient),
            fmt(rep.hessian_min_eigenvalue),
            fmt(rep.perturbation_margin),
            rep.projected_zero_count.to_string(),
            fmt(rep.lambda_min_observed),
            opt(rep.lambda_min_formula, fmt),
            fmt(rep.projected_max_eigenvalue),
            if failures.is_empty() { "pass" } else { "FAIL" }.to_string(),
            failures.join(" "),
        ]);
    }
    let mut sink = Sink::open(out.output.as_deref())?;
    sink.rows(format, &VERIFY_HEADER, &rows)?;
    sink.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(failure(format!(
            "verification failed at {}",
            failed.join(" ")
        )))
    }
}

/// Stationarity of `s` at user-supplied weights, for every basis size the
/// window admits up to `max_degree`.
fn verify_candidate(
    weights: &WeightVector,
    max_degree: usize,
    format: Format,
    out: &OutputArgs,
) -> CliResult<()> {
    let q = weights.q();
    check_window(q)?;
    let m = q.div_ceil(2);
    if m < 2 {
        return Err(usage("candidate weights need a window of at least 3"));
    }
    let tol = Tolerances::default();
    let fmt = if format == Format::Table {
        short
    } else {
        exact
    };
    let optimal = quadratic_weights(q)?;
    let mut rows = Vec::new();
    let mut failed = Vec::new();
    for n in 1..=(max_degree / 2 + 1).min(m - 1) {
        let g = smoothness_gradient(q, n, weights)?;
        let max_g = g.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let pass = max_g <= tol.gradient;
        if !pass {
            failed.push(format!("(q={q}, n={n})"));
        }
        rows.push(vec![
            q.to_string(),
            n.to_string(),
            fmt(max_g),
            fmt(smoothness_at(n, weights)?),
            fmt(smoothness_at(n, &optimal)?),
            if pass { "pass" } else { "FAIL" }.to_string(),
        ]);
    }
    let mut sink = Sink::open(out.output.as_deref())?;
    sink.rows(
        format,
        &[
            "q",
            "n",
            "max_abs_gradient",
            "s_candidate",
            "s_quadratic",
            "status",
        ],
        &rows,
    )?;
    sink.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(failure(format!(
            "candidate weights are not stationary at {}",
            failed.join(" ")
        )))
    }
}

pub fn smooth(
    input: &Path,
    column: &str,
    edge: &str,
    coeff_file: Option<&Path>,
    design: &DesignArgs,
    out: &OutputArgs,
) -> CliResult<()> {
    let edge: EdgePolicy = edge.parse()?;
    let filter: FilterCoefficients = match coeff_file {
        Some(path) => CoefficientDocument::read(path)?.into_filter()?,
        None => design_coefficients(&spec_from_args(design, None)?)?,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(input)
        .map_err(|e| usage(format!("cannot read {}: {e}", input.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| usage(format!("{}: bad header: {e}", input.display())))?
        .clone();
    let index = headers.iter().position(|h| h == column).ok_or_else(|| {
        usage(format!(
            "column `{column}` not found in {}",
            input.display()
        ))
    })?;

    let mut records = Vec::new();
    let mut values = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| failure(format!("{}: {e}", input.display())))?;
        let line = record.position().map_or(row as u64 + 2, |p| p.line());
        let cell = record.get(index).unwrap_or("").trim();
        let value: f64 = cell.parse().map_err(|_| {
            failure(format!(
                "row {} (line {line}): `{cell}` in column `{column}` is not numeric",
                row + 1
            ))
        })?;
        if !value.is_finite() {
            return Err(failure(format!(
                "row {} (line {line}): `{cell}` in column `{column}` is not finite",
                row + 1
            )));
        }
        values.push(value);
        records.push(record);
    }

    let smoothed = smooth_signal(&SignalSeries::new(values)?, &filter, edge)?;
    let offset = if edge == EdgePolicy::Valid {
        filter.spec().position()
    } else {
        0
    };

    let mut sink = Sink::open(out.output.as_deref())?;
    let mut writer = csv::Writer::from_writer(sink.writer());
    let csv_err = |e: csv::Error| failure(format!("cannot write CSV: {e}"));
    let mut header: Vec<String> = headers.iter().map(str::to_string).collect();
    header.push(format!("{column}_smoothed"));
    writer.write_record(&header).map_err(csv_err)?;
    for (i, record) in records.iter().enumerate() {
        let value = i
            .checked_sub(offset)
            .and_then(|k| smoothed.values().get(k))
            .map(|v| exact(*v))
            .unwrap_or_default();
        let mut row: Vec<String> = record.iter().map(str::to_string).collect();
        row.push(value);
        writer.write_record(&row).map_err(csv_err)?;
    }
    writer
        .flush()
        .map_err(|e| failure(format!("cannot write output: {e}")))?;
    drop(writer);
    sink.finish()
}

pub fn freqresp(
    design: &DesignArgs,
    weights: Option<&str>,
    points: usize,
    format: Format,
    out: &OutputArgs,
) -> CliResult<()> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let mut columns: Vec<(String, Vec<(f64, f64)>)> = Vec::new();
    let mut add = |name: String, spec: FilterSpec| -> CliResult<()> {
        let c = design_coefficients(&spec)?;
        columns.push((name, frequency_response(&c, points)?));
        Ok(())
    };
    match (weights, &design.weight_file) {
        (Some(list), file) => {
            for kind in parse_weight_kinds(list)? {
                add(kind.to_string(), spec_from_args(design, Some(kind))?)?;
            }
            if file.is_some() {
                add("custom".to_string(), spec_from_args(design, None)?)?;
            }
        }
        (None, _) => {
            let spec = spec_from_args(design, None)?;
            add(spec.weights().kind().to_string(), spec)?;
        }
    }

    let fmt = if format == Format::Table {
        short
    } else {
        exact
    };
    let mut header = vec!["omega"];
    header.extend(columns.iter().map(|(n, _)| n.as_str()));
    let rows: Vec<Vec<String>> = (0..points)
        .map(|i| {
            let mut row = vec![fmt(columns[0].1[i].0)];
            row.extend(columns.iter().map(|(_, resp)| fmt(resp[i].1)));
            row
        })
        .collect();
    let mut sink = Sink::open(out.output.as_deref())?;
    sink.rows(format, &header, &rows)?;
    sink.finish()
}
