use gkp_qpc::experiment::{
    find_threshold, optimize_delta, sweep, Crossover, LadderSpec, ThresholdReport, ThresholdSearch,
};
use gkp_qpc::oracle::exact_failure;
use gkp_qpc::{
    outcome_probabilities, squeezing_db_to_std, std_to_squeezing_db, HrmParams, NoiseParams, OutcomeProbabilities,
    QpcShape, HASHING_BOUND, SQRT_PI,
};
use serde::Serialize;
use serde_json::json;

use crate::cli::{
    DeltaArg, DeltaGridArg, HrmCurvesArgs, LadderArgs, OptimizeDeltaArgs, OracleArgs, SweepArgs, ThresholdArgs,
};
use crate::error::CliError;
use crate::output::{num, OutputDir};
use crate::plot::{Plot, Series};

/// What a command produced, before the manifest is written.
pub struct Produced {
    pub out: OutputDir,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
}

fn resolve_delta(arg: &DeltaArg) -> Result<HrmParams, CliError> {
    let hrm = match (arg.delta, arg.delta_sqrtpi) {
        (Some(d), _) => HrmParams::new(d)?,
        (None, Some(f)) => HrmParams::from_sqrt_pi_multiple(f)?,
        (None, None) => HrmParams::conventional(),
    };
    Ok(hrm)
}

fn resolve_delta_grid(arg: &DeltaGridArg, default_sqrtpi: &[f64]) -> Result<Vec<f64>, CliError> {
    let deltas = match (&arg.deltas, &arg.deltas_sqrtpi) {
        (Some(d), _) => d.clone(),
        (None, Some(f)) => f.iter().map(|f| f * SQRT_PI).collect(),
        (None, None) => default_sqrtpi.iter().map(|f| f * SQRT_PI).collect(),
    };
    for &d in &deltas {
        HrmParams::new(d)?;
    }
    Ok(deltas)
}

fn resolve_ladder(arg: &LadderArgs, interval: (f64, f64), trials: u64) -> LadderSpec {
    match &arg.shapes {
        Some(shapes) => LadderSpec::Fixed(shapes.clone()),
        None => LadderSpec::Auto {
            n_list: arg.n_list.clone(),
            probe: arg.probe.unwrap_or(0.5 * (interval.0 + interval.1)),
            m_max: arg.m_max as usize,
            trials: arg.balance_trials.unwrap_or(trials),
        },
    }
}

fn ladder_json(spec: &LadderSpec) -> serde_json::Value {
    match spec {
        LadderSpec::Fixed(shapes) => json!({ "fixed": shape_names(shapes) }),
        LadderSpec::Auto { n_list, probe, m_max, trials } => {
            json!({ "auto": { "n_list": n_list, "probe": probe, "m_max": m_max, "trials": trials } })
        }
    }
}

fn shape_names(shapes: &[QpcShape]) -> Vec<String> {
    shapes.iter().map(ToString::to_string).collect()
}

fn csv_line(out: &mut String, fields: &[String]) {
    out.push_str(&fields.join(","));
    out.push('\n');
}

pub fn hrm_curves(args: &HrmCurvesArgs) -> Result<Produced, CliError> {
    let deltas = resolve_delta_grid(&args.deltas, &[0.0, 0.1, 0.2, 0.223, 0.3])?;
    let noises: Vec<(f64, NoiseParams)> = match (&args.std_devs, &args.db) {
        (Some(stds), _) => stds
            .iter()
            .map(|&s| {
                let noise = NoiseParams::new(s)?;
                Ok((std_to_squeezing_db(noise).unwrap_or(f64::INFINITY), noise))
            })
            .collect::<Result<_, CliError>>()?,
        (None, dbs) => {
            let default: Vec<f64> = (0..=32).map(|i| i as f64 * 0.5).collect();
            dbs.as_ref()
                .unwrap_or(&default)
                .iter()
                .map(|&db| Ok((db, squeezing_db_to_std(db)?)))
                .collect::<Result<_, CliError>>()?
        }
    };

    let mut csv =
        String::from("squeezing_db,std_dev,delta,p_correct,p_incorrect,p_discard,success_prob,postselected_error\n");
    let mut error_series = Vec::new();
    let mut success_series = Vec::new();
    for &delta in &deltas {
        let mut err_pts = Vec::new();
        let mut succ_pts = Vec::new();
        for &(db, noise) in &noises {
            let p = outcome_probabilities(noise, delta)?;
            let post = p.postselected_error();
            csv_line(
                &mut csv,
                &[
                    num(db),
                    num(noise.std_dev()),
                    num(delta),
                    num(p.p_correct),
                    num(p.p_incorrect),
                    num(p.p_discard),
                    num(p.success()),
                    post.map_or_else(|| "nan".to_string(), num),
                ],
            );
            err_pts.push((db, post.unwrap_or(f64::NAN)));
            succ_pts.push((db, p.success()));
        }
        let label = format!("delta = {:.3} sqrt(pi)", delta / SQRT_PI);
        error_series.push(Series { label: label.clone(), points: err_pts });
        success_series.push(Series { label, points: succ_pts });
    }

    let mut out = OutputDir::create(&args.out.out)?;
    out.write("hrm_curves.csv", csv.as_bytes())?;
    if args.out.svg {
        let error_plot = Plot {
            title: "HRM postselected error".into(),
            x_label: "squeezing (dB)".into(),
            y_label: "postselected error".into(),
            log_y: true,
            series: error_series,
            vlines: vec![],
        };
        let success_plot = Plot {
            title: "HRM success probability".into(),
            x_label: "squeezing (dB)".into(),
            y_label: "success probability".into(),
            log_y: false,
            series: success_series,
            vlines: vec![],
        };
        out.write("hrm_postselected_error.svg", error_plot.render().as_bytes())?;
        out.write("hrm_success.svg", success_plot.render().as_bytes())?;
    }
    println!("hrm-curves: {} rows -> {}", deltas.len() * noises.len(), out.path("hrm_curves.csv").display());
    Ok(Produced {
        out,
        params: json!({
            "std_devs": noises.iter().map(|(_, n)| n.std_dev()).collect::<Vec<_>>(),
            "deltas": deltas,
            "svg": args.out.svg,
        }),
        seed: None,
    })
}

pub fn sweep_csv(rows: &[gkp_qpc::experiment::FailureEstimate]) -> String {
    let mut csv =
        String::from("n,m,xi,delta,trials,e_x,e_x_lo,e_x_hi,e_z,e_z_lo,e_z_hi,p_e,p_e_lo,p_e_hi,discard_rate\n");
    for r in rows {
        csv_line(
            &mut csv,
            &[
                r.shape.n.to_string(),
                r.shape.m.to_string(),
                num(r.xi),
                num(r.delta),
                r.trials.to_string(),
                num(r.e_x.value),
                num(r.e_x.lo),
                num(r.e_x.hi),
                num(r.e_z.value),
                num(r.e_z.lo),
                num(r.e_z.hi),
                num(r.p_e.value),
                num(r.p_e.lo),
                num(r.p_e.hi),
                num(r.discard_rate),
            ],
        );
    }
    csv
}

pub fn sweep_cmd(args: &SweepArgs) -> Result<Produced, CliError> {
    let hrm = resolve_delta(&args.delta)?;
    let rows = sweep(&args.shapes, &args.xi, hrm, args.run.trials, args.run.seed)?;
    let mut out = OutputDir::create(&args.out.out)?;
    out.write("sweep.csv", sweep_csv(&rows).as_bytes())?;
    if args.out.svg {
        let series = args
            .shapes
            .iter()
            .map(|shape| Series {
                label: format!("({}, {})", shape.n, shape.m),
                points: rows.iter().filter(|r| r.shape == *shape).map(|r| (r.xi, r.p_e.value)).collect(),
            })
            .collect();
        let plot = Plot {
            title: format!("Logical failure, delta = {:.3} sqrt(pi)", hrm.delta() / SQRT_PI),
            x_label: "xi".into(),
            y_label: "p_e".into(),
            log_y: true,
            series,
            vlines: vec![(HASHING_BOUND, "1/sqrt(e)".into())],
        };
        out.write("sweep.svg", plot.render().as_bytes())?;
    }
    println!("sweep: {} rows -> {}", rows.len(), out.path("sweep.csv").display());
    Ok(Produced {
        out,
        params: json!({
            "shapes": shape_names(&args.shapes),
            "xi": args.xi,
            "delta": hrm.delta(),
            "trials": args.run.trials,
            "svg": args.out.svg,
        }),
        seed: Some(args.run.seed),
    })
}

#[derive(Serialize)]
struct CrossoverJson {
    shape_a: String,
    shape_b: String,
    xi: Option<f64>,
    ci: Option<(f64, f64)>,
    bracket: Option<(f64, f64)>,
}

impl From<&Crossover> for CrossoverJson {
    fn from(c: &Crossover) -> Self {
        CrossoverJson {
            shape_a: c.shape_a.to_string(),
            shape_b: c.shape_b.to_string(),
            xi: c.xi,
            ci: c.ci,
            bracket: c.bracket,
        }
    }
}

#[derive(Serialize)]
struct ThresholdJson {
    delta: f64,
    delta_sqrtpi: f64,
    ladder: Vec<String>,
    crossovers: Vec<CrossoverJson>,
    headline: Option<f64>,
    headline_ci: Option<(f64, f64)>,
    hashing_bound: f64,
    /// `hashing_bound - headline`.
    gap: Option<f64>,
}

impl From<&ThresholdReport> for ThresholdJson {
    fn from(r: &ThresholdReport) -> Self {
        ThresholdJson {
            delta: r.delta,
            delta_sqrtpi: r.delta / SQRT_PI,
            ladder: shape_names(&r.ladder),
            crossovers: r.crossovers.iter().map(CrossoverJson::from).collect(),
            headline: r.headline,
            headline_ci: r.headline_ci,
            hashing_bound: HASHING_BOUND,
            gap: r.headline.map(|h| HASHING_BOUND - h),
        }
    }
}

fn describe(headline: Option<f64>) -> String {
    headline.map_or_else(|| "no crossover".to_string(), |x| format!("{x:.4}"))
}

pub fn threshold_cmd(args: &ThresholdArgs) -> Result<Produced, CliError> {
    let hrm = resolve_delta(&args.delta)?;
    let search = ThresholdSearch::new(args.interval.0, args.interval.1)?;
    let spec = resolve_ladder(&args.ladder, args.interval, args.run.trials);
    let shapes = spec.resolve(hrm, args.run.seed)?;
    let report = find_threshold(&shapes, hrm, &search, args.run.trials, args.run.seed)?;

    let mut out = OutputDir::create(&args.out.out)?;
    out.write_json("threshold.json", &ThresholdJson::from(&report))?;
    if args.out.svg {
        let series = report
            .crossovers
            .iter()
            .map(|c| Series { label: format!("{} vs {}", c.shape_b, c.shape_a), points: c.log_ratio.clone() })
            .collect();
        let mut vlines = vec![(HASHING_BOUND, "1/sqrt(e)".to_string())];
        if let Some(h) = report.headline {
            vlines.push((h, format!("{h:.3}")));
        }
        let plot = Plot {
            title: "ln p_e(larger) - ln p_e(smaller)".into(),
            x_label: "xi".into(),
            y_label: "log ratio".into(),
            log_y: false,
            series,
            vlines,
        };
        out.write("threshold.svg", plot.render().as_bytes())?;
    }
    println!("threshold: ladder {} headline {}", shape_names(&report.ladder).join(","), describe(report.headline));
    Ok(Produced {
        out,
        params: json!({
            "ladder": ladder_json(&spec),
            "resolved_ladder": shape_names(&shapes),
            "delta": hrm.delta(),
            "interval": args.interval,
            "trials": args.run.trials,
            "svg": args.out.svg,
        }),
        seed: Some(args.run.seed),
    })
}

#[derive(Serialize)]
struct DeltaPointJson {
    delta: f64,
    delta_sqrtpi: f64,
    ladder: Vec<String>,
    threshold: Option<f64>,
    ci: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct OptimizeJson {
    points: Vec<DeltaPointJson>,
    delta_star: f64,
    delta_star_sqrtpi: f64,
    threshold: Option<f64>,
    refined: Option<ThresholdJson>,
    hashing_bound: f64,
}

pub fn optimize_delta_cmd(args: &OptimizeDeltaArgs) -> Result<Produced, CliError> {
    let deltas = resolve_delta_grid(&args.deltas, &[0.0, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3])?;
    let search = ThresholdSearch::new(args.interval.0, args.interval.1)?;
    let spec = resolve_ladder(&args.ladder, args.interval, args.run.trials);
    let result = optimize_delta(&spec, &deltas, &search, args.run.trials, args.run.seed)?;

    let doc = OptimizeJson {
        points: result
            .points
            .iter()
            .map(|p| DeltaPointJson {
                delta: p.delta,
                delta_sqrtpi: p.delta / SQRT_PI,
                ladder: shape_names(&p.report.ladder),
                threshold: p.threshold(),
                ci: p.report.headline_ci,
            })
            .collect(),
        delta_star: result.delta_star,
        delta_star_sqrtpi: result.delta_star / SQRT_PI,
        threshold: result.threshold,
        refined: result.refined.as_ref().map(ThresholdJson::from),
        hashing_bound: HASHING_BOUND,
    };
    let mut out = OutputDir::create(&args.out.out)?;
    out.write_json("optimize_delta.json", &doc)?;
    if args.out.svg {
        let points = result.points.iter().filter_map(|p| p.threshold().map(|t| (p.delta, t))).collect();
        let plot = Plot {
            title: "Threshold vs danger zone".into(),
            x_label: "delta".into(),
            y_label: "threshold xi".into(),
            log_y: false,
            series: vec![Series { label: "crossover".into(), points }],
            vlines: vec![(result.delta_star, "delta*".into())],
        };
        out.write("optimize_delta.svg", plot.render().as_bytes())?;
    }
    println!("optimize-delta: delta* = {:.4} threshold {}", result.delta_star, describe(result.threshold));
    Ok(Produced {
        out,
        params: json!({
            "ladder": ladder_json(&spec),
            "deltas": deltas,
            "interval": args.interval,
            "trials": args.run.trials,
            "svg": args.out.svg,
        }),
        seed: Some(args.run.seed),
    })
}

pub fn oracle_cmd(args: &OracleArgs) -> Result<Produced, CliError> {
    let (probs, xi, delta) = match args.probs {
        Some((c, i, d)) => (OutcomeProbabilities::new(c, i, d)?, None, None),
        None => {
            let xi = args.xi.expect("clap requires xi without probs");
            let hrm = resolve_delta(&args.delta)?;
            (outcome_probabilities(NoiseParams::new(xi)?, hrm.delta())?, Some(xi), Some(hrm.delta()))
        }
    };
    let exact = exact_failure(args.shape, probs)?;
    let doc = json!({
        "shape": args.shape.to_string(),
        "xi": xi,
        "delta": delta,
        "p_correct": probs.p_correct,
        "p_incorrect": probs.p_incorrect,
        "p_discard": probs.p_discard,
        "e_x": exact.e_x,
        "e_z": exact.e_z,
        "p_e": exact.p_e,
    });
    let mut out = OutputDir::create(&args.out)?;
    out.write_json("oracle.json", &doc)?;
    println!("oracle: {} e_x {} e_z {} p_e {}", args.shape, num(exact.e_x), num(exact.e_z), num(exact.p_e));
    Ok(Produced { out, params: doc, seed: None })
}

pub fn hashing_bound() {
    println!("{}", num(HASHING_BOUND));
}
