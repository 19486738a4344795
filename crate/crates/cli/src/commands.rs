//! Implementation of the subcommands: each one computes its dataset through
//! the core crate and emits the requested CSV/JSON/SVG files.

use std::collections::BTreeMap;
use std::path::Path;

use hardy_core::analytics::{
    asymptote, entropy, integrate_p, negativity, optimize_a, p_nonlocal_equal, AnalysisKind,
    AnalyticsResult,
};
use hardy_core::circuit::{
    build_circuit, run_exact, sample_shots, sample_shots_stream, theta_of_a, CircuitMode,
    ExactHistogram, SampledHistogram,
};
use hardy_core::hardy::TransformCoefficients;
use hardy_core::verify::{certify, cross_validate};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::*;
use crate::output::{fmt_sig, write_bytes, write_json, CsvFile};
use crate::svg;
use crate::CliError;

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Sweep(args) => cmd_sweep(args),
        Command::Histogram(args) => cmd_histogram(args),
        Command::Optimize(args) => cmd_optimize(args),
        Command::Integrate(args) => cmd_integrate(args),
        Command::Entropy(args) => cmd_entropy(args),
        Command::Asymptote(args) => cmd_asymptote(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

fn grid_points(step: f64) -> Result<Vec<f64>, CliError> {
    if !(step > 0.0 && step < 0.5) {
        return Err(CliError::Usage(format!(
            "--a-step must lie in (0, 0.5), got {step}"
        )));
    }
    // every multiple of the step strictly inside (0, 1)
    let count = (1.0 / step).ceil() as usize - 1;
    Ok((1..=count)
        .map(|i| i as f64 * step)
        .filter(|&a| a < 1.0)
        .collect())
}

fn announce(path: &Path) {
    println!("wrote {}", path.display());
}

// ---------------------------------------------------------------- sweep

#[derive(Serialize)]
struct SweepRow {
    n: usize,
    a: f64,
    p_analytic: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p_sampled: Option<f64>,
}

#[derive(Serialize)]
struct OptimumRow {
    n: usize,
    a_star: f64,
    p_star: f64,
}

#[derive(Serialize)]
struct SweepResults {
    grid: Vec<SweepRow>,
    optima: Vec<OptimumRow>,
}

#[derive(Serialize)]
struct SweepConfig {
    n_range: NRange,
    a_step: f64,
    shots: u64,
    seed: u64,
}

fn cmd_sweep(args: SweepArgs) -> Result<(), CliError> {
    let grid = grid_points(args.a_step)?;
    let points: Vec<(usize, f64)> = args
        .n_range
        .values()
        .flat_map(|n| grid.iter().map(move |&a| (n, a)))
        .collect();

    let sampled = args.shots > 0;
    let rows: Vec<SweepRow> = points
        .par_iter()
        .enumerate()
        .map(|(row_index, &(n, a))| -> Result<SweepRow, CliError> {
            let p_analytic = p_nonlocal_equal(n, a)?;
            let p_sampled = if sampled {
                let thetas = vec![theta_of_a(a)?; n];
                let hist = run_exact(&build_circuit(n, &thetas, CircuitMode::FullCd)?)?;
                let run = sample_shots_stream(&hist, args.shots, args.seed, row_index as u64)?;
                let estimate = run
                    .counts
                    .iter()
                    .filter(|(outcome, _)| outcome.bytes().filter(|&b| b == b'1').count() >= 2)
                    .map(|(_, &c)| c as f64)
                    .sum::<f64>()
                    / args.shots as f64;
                Some(estimate)
            } else {
                None
            };
            Ok(SweepRow {
                n,
                a,
                p_analytic,
                p_sampled,
            })
        })
        .collect::<Result<_, _>>()?;

    let optima: Vec<OptimumRow> = args
        .n_range
        .values()
        .map(|n| -> Result<OptimumRow, CliError> {
            let opt = optimize_a(n)?;
            Ok(OptimumRow {
                n,
                a_star: opt.a_star,
                p_star: opt.p_star,
            })
        })
        .collect::<Result<_, _>>()?;

    let config = SweepConfig {
        n_range: args.n_range,
        a_step: args.a_step,
        shots: args.shots,
        seed: args.seed,
    };
    let results = SweepResults { grid: rows, optima };

    if args.output.format.csv {
        let mut csv = CsvFile::new(
            args.output.out.join("sweep.csv"),
            &["n", "A", "p_analytic", "p_sampled", "shots", "seed"],
        );
        for row in &results.grid {
            csv.row(&[
                row.n.to_string(),
                fmt_sig(row.a),
                fmt_sig(row.p_analytic),
                row.p_sampled.map(fmt_sig).unwrap_or_default(),
                if sampled {
                    args.shots.to_string()
                } else {
                    String::new()
                },
                if sampled {
                    args.seed.to_string()
                } else {
                    String::new()
                },
            ]);
        }
        announce(&csv.write()?);

        let mut csv = CsvFile::new(
            args.output.out.join("sweep_optima.csv"),
            &["n", "a_star", "p_star"],
        );
        for row in &results.optima {
            csv.row(&[row.n.to_string(), fmt_sig(row.a_star), fmt_sig(row.p_star)]);
        }
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("sweep.json"),
            &config,
            &results,
        )?);
    }
    if args.output.format.svg {
        sweep_svg(&args, &results)?;
    }

    Ok(())
}

fn sweep_svg(args: &SweepArgs, results: &SweepResults) -> Result<(), CliError> {
    let mut series: Vec<svg::Series> = args
        .n_range
        .values()
        .map(|n| svg::Series {
            label: format!("n = {n}"),
            points: results
                .grid
                .iter()
                .filter(|r| r.n == n)
                .map(|r| (r.a, r.p_analytic))
                .collect(),
            markers: false,
        })
        .collect();
    series.push(svg::Series {
        label: "optimum per n".to_string(),
        points: results
            .optima
            .iter()
            .map(|r| (r.a_star, r.p_star))
            .collect(),
        markers: true,
    });
    let body = svg::line_chart(
        "Nonlocal probability vs transform coefficient",
        "A",
        "P_nonlocal",
        &series,
    );
    let path = args.output.out.join("sweep.svg");
    write_bytes(&path, body.as_bytes())?;
    announce(&path);
    Ok(())
}

// ------------------------------------------------------------ histogram

#[derive(Serialize)]
struct HistogramConfig {
    n: usize,
    a: f64,
    mode: CircuitMode,
    shots: u64,
    seed: u64,
}

#[derive(Serialize)]
struct HistogramResults {
    exact: ExactHistogram,
    sampled: SampledHistogram,
}

fn cmd_histogram(args: HistogramArgs) -> Result<(), CliError> {
    let thetas = vec![theta_of_a(args.a)?; args.n];
    let circuit = build_circuit(args.n, &thetas, args.mode.0)?;
    let exact = run_exact(&circuit)?;
    let sampled = sample_shots(&exact, args.shots, args.seed)?;

    println!(
        "mode {} at n={}, A={}: post-selection success {}",
        args.mode.0,
        args.n,
        args.a,
        fmt_sig(exact.postselect_success)
    );

    let config = HistogramConfig {
        n: args.n,
        a: args.a,
        mode: args.mode.0,
        shots: args.shots,
        seed: args.seed,
    };

    if args.output.format.csv {
        let mut csv = CsvFile::new(
            args.output.out.join("histogram.csv"),
            &["outcome", "p_exact", "count", "frequency"],
        );
        for (outcome, &p) in &exact.probabilities {
            csv.row(&[
                outcome.clone(),
                fmt_sig(p),
                sampled.count(outcome).to_string(),
                fmt_sig(sampled.frequency(outcome)),
            ]);
        }
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("histogram.json"),
            &config,
            &HistogramResults {
                exact: exact.clone(),
                sampled,
            },
        )?);
    }
    if args.output.format.svg {
        let bars: Vec<(String, f64)> = exact
            .probabilities
            .iter()
            .map(|(outcome, &p)| (outcome.clone(), p))
            .collect();
        let body = svg::bar_chart(
            &format!(
                "Outcome probabilities, {} (n={}, A={})",
                args.mode.0, args.n, args.a
            ),
            "probability",
            &bars,
        );
        let path = args.output.out.join("histogram.svg");
        write_bytes(&path, body.as_bytes())?;
        announce(&path);
    }
    Ok(())
}

// ------------------------------------------------------------- optimize

#[derive(Serialize)]
struct RangeConfig {
    n_range: NRange,
}

fn cmd_optimize(args: OptimizeArgs) -> Result<(), CliError> {
    let results: Vec<AnalyticsResult> = args
        .n_range
        .values()
        .map(|n| -> Result<AnalyticsResult, CliError> {
            let opt = optimize_a(n)?;
            Ok(
                AnalyticsResult::new(AnalysisKind::Optimum, n, opt.p_star, 1e-8)
                    .with_secondary(opt.a_star),
            )
        })
        .collect::<Result<_, _>>()?;

    if args.output.format.csv {
        let mut csv = CsvFile::new(
            args.output.out.join("optimize.csv"),
            &["n", "a_star", "p_star"],
        );
        for r in &results {
            csv.row(&[
                r.n.to_string(),
                fmt_sig(r.secondary_value.unwrap_or(f64::NAN)),
                fmt_sig(r.value),
            ]);
        }
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("optimize.json"),
            &RangeConfig {
                n_range: args.n_range,
            },
            &results,
        )?);
    }
    if args.output.format.svg {
        let series = [svg::Series {
            label: "P* (optimum over A)".to_string(),
            points: results.iter().map(|r| (r.n as f64, r.value)).collect(),
            markers: true,
        }];
        let body = svg::line_chart("Optimal nonlocal probability vs n", "n", "P*", &series);
        let path = args.output.out.join("optimize.svg");
        write_bytes(&path, body.as_bytes())?;
        announce(&path);
    }
    Ok(())
}

// ------------------------------------------------------------ integrate

#[derive(Serialize)]
struct IntegrateConfig {
    n_range: NRange,
    tol: f64,
}

fn cmd_integrate(args: IntegrateArgs) -> Result<(), CliError> {
    let results: Vec<AnalyticsResult> = args
        .n_range
        .values()
        .map(|n| -> Result<AnalyticsResult, CliError> {
            let value = integrate_p(n, args.tol)?;
            Ok(AnalyticsResult::new(
                AnalysisKind::Integral,
                n,
                value,
                args.tol,
            ))
        })
        .collect::<Result<_, _>>()?;

    if args.output.format.csv {
        let mut csv = CsvFile::new(args.output.out.join("integrate.csv"), &["n", "integral"]);
        for r in &results {
            csv.row(&[r.n.to_string(), fmt_sig(r.value)]);
        }
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("integrate.json"),
            &IntegrateConfig {
                n_range: args.n_range,
                tol: args.tol,
            },
            &results,
        )?);
    }
    if args.output.format.svg {
        let series = [svg::Series {
            label: "∫ P dA".to_string(),
            points: results.iter().map(|r| (r.n as f64, r.value)).collect(),
            markers: true,
        }];
        let body = svg::line_chart("Integrated nonlocal probability vs n", "n", "P", &series);
        let path = args.output.out.join("integrate.svg");
        write_bytes(&path, body.as_bytes())?;
        announce(&path);
    }
    Ok(())
}

// -------------------------------------------------------------- entropy

#[derive(Serialize)]
struct EntropyConfig {
    n_range: NRange,
    a: Option<f64>,
    a_step: f64,
    bipartition: String,
}

#[derive(Serialize)]
struct EntropyRow {
    n: usize,
    a: f64,
    entropy: f64,
    negativity: f64,
    p_nonlocal: f64,
}

fn cmd_entropy(args: EntropyArgs) -> Result<(), CliError> {
    let a_values = match args.a {
        Some(a) => vec![a],
        None => grid_points(args.a_step)?,
    };
    let points: Vec<(usize, f64)> = args
        .n_range
        .values()
        .flat_map(|n| a_values.iter().map(move |&a| (n, a)))
        .collect();

    let rows: Vec<EntropyRow> = points
        .par_iter()
        .map(|&(n, a)| -> Result<EntropyRow, CliError> {
            let coeffs = TransformCoefficients::equal_real(n, a)?;
            Ok(EntropyRow {
                n,
                a,
                entropy: entropy(&coeffs, args.bipartition.0)?,
                negativity: negativity(&coeffs, args.bipartition.0)?,
                p_nonlocal: p_nonlocal_equal(n, a)?,
            })
        })
        .collect::<Result<_, _>>()?;

    let config = EntropyConfig {
        n_range: args.n_range,
        a: args.a,
        a_step: args.a_step,
        bipartition: args.bipartition.0.to_string(),
    };

    if args.output.format.csv {
        let mut csv = CsvFile::new(
            args.output.out.join("entropy.csv"),
            &["n", "A", "entropy", "negativity", "p_nonlocal"],
        );
        for r in &rows {
            csv.row(&[
                r.n.to_string(),
                fmt_sig(r.a),
                fmt_sig(r.entropy),
                fmt_sig(r.negativity),
                fmt_sig(r.p_nonlocal),
            ]);
        }
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("entropy.json"),
            &config,
            &rows,
        )?);
    }
    if args.output.format.svg {
        let series: Vec<svg::Series> = args
            .n_range
            .values()
            .map(|n| svg::Series {
                label: format!("S, n = {n}"),
                points: rows
                    .iter()
                    .filter(|r| r.n == n)
                    .map(|r| (r.a, r.entropy))
                    .collect(),
                markers: a_values.len() == 1,
            })
            .collect();
        let body = svg::line_chart(
            "Entanglement entropy vs transform coefficient",
            "A",
            "S",
            &series,
        );
        let path = args.output.out.join("entropy.svg");
        write_bytes(&path, body.as_bytes())?;
        announce(&path);
    }
    Ok(())
}

// ------------------------------------------------------------ asymptote

fn cmd_asymptote(args: AsymptoteArgs) -> Result<(), CliError> {
    let limit = asymptote();
    let result = AnalyticsResult::new(AnalysisKind::Asymptote, 0, limit.p_limit, 1e-10)
        .with_secondary(limit.x_star);
    println!(
        "P_nonlocal limit {} at x* = {}",
        fmt_sig(limit.p_limit),
        fmt_sig(limit.x_star)
    );

    if args.output.format.csv {
        let mut csv = CsvFile::new(
            args.output.out.join("asymptote.csv"),
            &["x_star", "p_limit"],
        );
        csv.row(&[fmt_sig(limit.x_star), fmt_sig(limit.p_limit)]);
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("asymptote.json"),
            &BTreeMap::<String, String>::new(),
            &result,
        )?);
    }
    Ok(())
}

// --------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyConfig {
    n: usize,
    a: f64,
    tol: f64,
    circuit_tol: f64,
}

#[derive(Serialize)]
struct VerifyResults {
    report: hardy_core::verify::ParadoxReport,
    cross_validation: hardy_core::verify::CrossValidation,
    pass: bool,
}

fn cmd_verify(args: VerifyArgs) -> Result<(), CliError> {
    let coeffs = TransformCoefficients::equal_real(args.n, args.a)?;
    let report = certify(&coeffs, args.tol)?;
    let cv = cross_validate(&coeffs, args.circuit_tol)?;
    let pass = report.pass() && cv.pass;

    println!(
        "condition 1: P(all-u) = {} → {}",
        fmt_sig(report.condition1.p_all_u),
        if report.condition1.pass {
            "pass"
        } else {
            "FAIL"
        }
    );
    for r in &report.condition2 {
        println!(
            "condition 2, site {}: P(D_{}) = {}, conditional = {} → {}",
            r.site,
            r.site,
            fmt_sig(r.p_d),
            fmt_sig(r.conditional),
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    println!(
        "condition 3: {} outcomes, total = {}",
        report.condition3.len(),
        fmt_sig(report.condition3_total)
    );
    println!(
        "cross-validation: max deviation {} (tol {}) → {}",
        fmt_sig(cv.max_deviation),
        fmt_sig(cv.tolerance),
        if cv.pass { "pass" } else { "FAIL" }
    );

    let config = VerifyConfig {
        n: args.n,
        a: args.a,
        tol: args.tol,
        circuit_tol: args.circuit_tol,
    };

    if args.output.format.csv {
        let mut csv = CsvFile::new(
            args.output.out.join("verify.csv"),
            &["record", "detail", "value", "pass"],
        );
        csv.row(&[
            "condition1".into(),
            "P(all-u)".into(),
            fmt_sig(report.condition1.p_all_u),
            report.condition1.pass.to_string(),
        ]);
        for r in &report.condition2 {
            csv.row(&[
                "condition2_p_d".into(),
                format!("site {}", r.site),
                fmt_sig(r.p_d),
                r.pass.to_string(),
            ]);
            csv.row(&[
                "condition2_conditional".into(),
                format!("site {}", r.site),
                fmt_sig(r.conditional),
                r.pass.to_string(),
            ]);
        }
        for r in &report.condition3 {
            let sites = r
                .d_sites
                .iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            csv.row(&[
                "condition3".into(),
                format!("d on {sites}"),
                fmt_sig(r.probability),
                (r.probability > 0.0).to_string(),
            ]);
        }
        csv.row(&[
            "condition3_total".into(),
            "combined nonlocal probability".into(),
            fmt_sig(report.condition3_total),
            (report.condition3_total > 0.0).to_string(),
        ]);
        for m in &report.lhv_margins {
            csv.row(&[
                "lhv_margin".into(),
                format!("P(D_{} D_{})", m.site_k, m.site_l),
                fmt_sig(m.margin),
                (m.margin > 0.0).to_string(),
            ]);
        }
        csv.row(&[
            "cross_validation".into(),
            "max circuit deviation".into(),
            fmt_sig(cv.max_deviation),
            cv.pass.to_string(),
        ]);
        announce(&csv.write()?);
    }
    if args.output.format.json {
        announce(&write_json(
            args.output.out.join("verify.json"),
            &config,
            &VerifyResults {
                report: report.clone(),
                cross_validation: cv.clone(),
                pass,
            },
        )?);
    }

    if !pass {
        return Err(CliError::Verification(format!(
            "paradox certificate failed at n={}, A={}",
            args.n, args.a
        )));
    }
    println!("paradox certified at n={}, A={}", args.n, args.a);
    Ok(())
}
