use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use epicongress::competence::CompetenceProfile;
use epicongress::empirics::{self, RegressionResult};
use epicongress::gain::conditions::{ConditionReport, Theorem};
use epicongress::gain::experiment::run_experiment_with_progress;
use epicongress::gain::{
    committee_size, dictatorship_condition, gain_exact, general_k_condition, simulate,
    ExperimentConfig, GainEstimate,
};
use epicongress::optimal_size::{bounded_support_bounds, uniform_bounds, PruningDiagnostics};
use epicongress::poisson_binomial::PoissonBinomialPmf;
use epicongress::{optimal_k, Error, ProfileSource, Result, SuccessProbVector, DEFAULT_SEED};

use crate::args::*;
use crate::output::{to_value, Data};

/// A command's data plus what goes into its manifest.
pub struct Outcome {
    pub data: Data,
    pub format: OutFormat,
    pub seed: u64,
    pub parameters: Value,
}

const DEFAULT_TRIALS: usize = 1000;

/// Arguments as recorded in the manifest; unset options appear as null.
fn params<T: Serialize>(args: &T) -> Value {
    serde_json::to_value(args).unwrap_or(Value::Null)
}

fn progress(common: &Common, msg: std::fmt::Arguments<'_>) {
    if !common.quiet {
        eprintln!("{msg}");
    }
}

fn resolve_profile(p: &ProfileArgs, seed: u64) -> Result<CompetenceProfile> {
    match (&p.probs, &p.profile, p.n) {
        (Some(probs), _, _) => {
            let v = SuccessProbVector::new(probs.clone())?;
            CompetenceProfile::from_unsorted(v.into_inner())
        }
        (None, Some(src), Some(n)) => src.profile(n, seed),
        _ => Err(Error::InvalidParameter(
            "give either --probs or --profile with --n".into(),
        )),
    }
}

pub fn pmf(args: &PmfArgs, common: &Common) -> Result<Outcome> {
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let profile = resolve_profile(&args.profile, seed)?;
    let v = SuccessProbVector::new(profile.into_probs())?;
    let pmf = PoissonBinomialPmf::new(&v);
    let format = common.out.unwrap_or(OutFormat::Csv);

    #[derive(Serialize)]
    struct Row {
        j: usize,
        prob: f64,
    }
    #[derive(Serialize)]
    struct Summary<'a> {
        n: usize,
        majority_prob: f64,
        failure_prob: f64,
        pmf: &'a [f64],
    }
    let data = match format {
        OutFormat::Csv => {
            let rows: Vec<Row> = pmf
                .mass()
                .iter()
                .enumerate()
                .map(|(j, &prob)| Row { j, prob })
                .collect();
            Data::table(&rows)?
        }
        OutFormat::Json => Data::record(&Summary {
            n: pmf.voters(),
            majority_prob: pmf.majority_prob(),
            failure_prob: pmf.failure_prob(),
            pmf: pmf.mass(),
        })?,
    };
    Ok(Outcome {
        data,
        format,
        seed,
        parameters: params(args),
    })
}

#[derive(Serialize)]
struct OptimalRow {
    n: usize,
    k_star: usize,
    k_over_n: f64,
    max_prob: f64,
    min_failure_prob: f64,
    certified_lower: usize,
    certified_upper: usize,
}

pub fn optimal_size(args: &OptimalSizeArgs, common: &Common) -> Result<Outcome> {
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let parameters = params(args);
    if let Some(grid) = &args.n_grid {
        if grid.is_empty() {
            return Err(Error::InvalidParameter("--n-grid is empty".into()));
        }
        let mut rows = Vec::with_capacity(grid.len());
        for &n in grid {
            let start = Instant::now();
            let r = optimal_k(&args.profile.profile(n, seed)?);
            progress(
                common,
                format_args!("n = {n}: k* = {} ({:.1?})", r.k_star, start.elapsed()),
            );
            rows.push(OptimalRow {
                n,
                k_star: r.k_star,
                k_over_n: r.k_star as f64 / n as f64,
                max_prob: r.max_prob,
                min_failure_prob: r.min_failure_prob,
                certified_lower: r.pruning.certified_lower,
                certified_upper: r.pruning.certified_upper,
            });
        }
        let format = common.out.unwrap_or(OutFormat::Csv);
        return Ok(Outcome {
            data: Data::table(&rows)?,
            format,
            seed,
            parameters,
        });
    }

    let n = args.n.expect("clap requires --n without --n-grid");
    let r = optimal_k(&args.profile.profile(n, seed)?);

    #[derive(Serialize)]
    struct Single {
        n: usize,
        profile: String,
        k_star: usize,
        k_over_n: f64,
        max_prob: f64,
        min_failure_prob: f64,
        pruning: PruningDiagnostics,
        #[serde(skip_serializing_if = "Vec::is_empty")]
        q_curve: Vec<(usize, f64)>,
    }
    let single = Single {
        n,
        profile: args.profile.to_string(),
        k_star: r.k_star,
        k_over_n: r.k_star as f64 / n as f64,
        max_prob: r.max_prob,
        min_failure_prob: r.min_failure_prob,
        pruning: r.pruning,
        q_curve: if args.curve { r.q_curve } else { Vec::new() },
    };
    Ok(Outcome {
        data: Data::record(&single)?,
        format: common.out.unwrap_or(OutFormat::Json),
        seed,
        parameters,
    })
}

pub fn bounds(args: &BoundsArgs, common: &Common) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Bounds {
        dist: String,
        n: usize,
        eps: f64,
        lower_coef: f64,
        upper_coef: f64,
        lower: f64,
        upper: f64,
        confidence: f64,
        lipschitz: f64,
    }
    let nf = args.n as f64;
    let out = match &args.dist {
        ProfileSource::ExpectedUniform => {
            let (lower, upper) = uniform_bounds(args.n);
            Bounds {
                dist: args.dist.to_string(),
                n: args.n,
                eps: 0.0,
                lower_coef: 3.0 - 2.0 * 2f64.sqrt(),
                upper_coef: 0.5,
                lower,
                upper,
                confidence: 1.0,
                lipschitz: 1.0,
            }
        }
        ProfileSource::Sampled(dist) => {
            let eps = args.eps.value(args.n)?;
            let b = bounded_support_bounds(dist, args.n, eps)?;
            Bounds {
                dist: args.dist.to_string(),
                n: args.n,
                eps,
                lower_coef: b.c_high,
                upper_coef: b.c_low,
                lower: b.c_high * nf,
                upper: b.c_low * nf,
                confidence: b.confidence,
                lipschitz: b.lipschitz,
            }
        }
    };
    Ok(Outcome {
        data: Data::record(&out)?,
        format: common.out.unwrap_or(OutFormat::Json),
        seed: common.seed.unwrap_or(DEFAULT_SEED),
        parameters: params(args),
    })
}

pub fn gain(args: &GainArgs, common: &Common) -> Result<Outcome> {
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let n = match (&args.profile.probs, args.profile.n) {
        (Some(p), _) => p.len(),
        (None, Some(n)) => n,
        _ => {
            return Err(Error::InvalidParameter(
                "give either --probs or --profile with --n".into(),
            ))
        }
    };
    let k = match (args.k, args.r) {
        (Some(k), _) => k,
        (None, Some(r)) if r > 0.0 && r < 1.0 => committee_size(n, r),
        (None, Some(r)) => {
            return Err(Error::InvalidParameter(format!(
                "--r must lie in (0, 1), got {r}"
            )))
        }
        (None, None) => unreachable!("clap requires --k or --r"),
    };

    #[derive(Serialize)]
    struct Sampled {
        n: usize,
        k: usize,
        #[serde(flatten)]
        estimate: GainEstimate,
        direct_acc: f64,
        rep_acc: f64,
        direct_ci: f64,
        rep_ci: f64,
    }
    #[derive(Serialize)]
    struct Fixed {
        n: usize,
        k: usize,
        #[serde(flatten)]
        estimate: GainEstimate,
    }

    let data = match &args.profile.profile {
        Some(ProfileSource::Sampled(dist)) => {
            let trials = common.trials.unwrap_or(DEFAULT_TRIALS);
            let mode = common.mode.unwrap_or(Mode::Exact).into();
            let s = simulate(dist, n, k, trials, seed, mode)?;
            Data::record(&Sampled {
                n,
                k,
                estimate: s.estimate(),
                direct_acc: s.direct.mean,
                rep_acc: s.representative.mean,
                direct_ci: s.direct.ci95_halfwidth,
                rep_ci: s.representative.ci95_halfwidth,
            })?
        }
        _ => {
            let profile = resolve_profile(&args.profile, seed)?;
            Data::record(&Fixed {
                n,
                k,
                estimate: gain_exact(&profile, k)?,
            })?
        }
    };
    Ok(Outcome {
        data,
        format: common.out.unwrap_or(OutFormat::Json),
        seed,
        parameters: params(args),
    })
}

pub fn experiment(args: &ExperimentArgs, common: &Common) -> Result<Outcome> {
    let mut config = match &args.config {
        Some(path) => std::fs::read_to_string(path)?.parse::<ExperimentConfig>()?,
        None => ExperimentConfig::default(),
    };
    if let Some(grid) = &args.n_grid {
        config.n_grid = grid.clone();
    }
    if let Some(r) = args.r {
        config.r = r;
    }
    if let Some(f) = args.family {
        config.family = f;
    }
    if let Some(e) = args.eps {
        config.eps = e;
    }
    if let Some(t) = common.trials {
        config.trials = t;
    }
    if let Some(s) = common.seed {
        config.seed = s;
    }
    if let Some(m) = common.mode {
        config.mode = m.into();
    }
    config.validate()?;

    let total = config.n_grid.len();
    let start = Instant::now();
    let table = run_experiment_with_progress(&config, |i, row| {
        progress(
            common,
            format_args!(
                "[{}/{total}] n = {}, k = {}: gain = {:.5} +/- {:.5} ({:.1?})",
                i + 1,
                row.n,
                row.k,
                row.gain,
                row.gain_ci,
                start.elapsed()
            ),
        )
    })?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    Ok(Outcome {
        data: Data::Prebuilt {
            csv,
            json: to_value(&table)?,
        },
        format: common.out.unwrap_or(OutFormat::Csv),
        seed: config.seed,
        parameters: serde_json::json!({ "config": config.to_kv() }),
    })
}

pub fn regress(args: &RegressArgs, common: &Common) -> Result<Outcome> {
    let records = match &args.data {
        Some(path) => empirics::load_records(path)?,
        None => empirics::bundled_records()?,
    };
    let reg = empirics::loglog_regression(&records)?;

    #[derive(Serialize)]
    struct Out {
        source: String,
        #[serde(flatten)]
        reg: RegressionResult,
        #[serde(skip_serializing_if = "Option::is_none")]
        predict_population: Option<u64>,
        #[serde(skip_serializing_if = "Option::is_none")]
        predicted_seats: Option<u64>,
    }
    let out = Out {
        source: args
            .data
            .as_ref()
            .map_or_else(|| "bundled".to_string(), |p| p.display().to_string()),
        reg,
        predict_population: args.predict,
        predicted_seats: args.predict.map(|p| empirics::predict_size(p, &reg)),
    };
    Ok(Outcome {
        data: Data::record(&out)?,
        format: common.out.unwrap_or(OutFormat::Json),
        seed: common.seed.unwrap_or(DEFAULT_SEED),
        parameters: params(args),
    })
}

pub fn conditions(args: &ConditionsArgs, common: &Common) -> Result<Outcome> {
    let report: ConditionReport = match args.theorem {
        TheoremChoice::Dictatorship => dictatorship_condition(&args.family, args.a, args.n)?,
        TheoremChoice::GeneralK => {
            let (alpha, r) = args
                .alpha
                .zip(args.r)
                .expect("clap requires --alpha and --r");
            general_k_condition(&args.family, args.a, alpha, r, args.n)?
        }
    };
    let format = common.out.unwrap_or(OutFormat::Json);
    let data = match format {
        OutFormat::Json => Data::record(&report)?,
        OutFormat::Csv => {
            #[derive(Serialize)]
            struct Row {
                branch: Theorem,
                hypothesis: &'static str,
                satisfied: bool,
                lhs: f64,
                rhs: f64,
                branch_sign: String,
                predicted_sign: String,
            }
            let mut rows = Vec::new();
            for v in [&report.positive, &report.negative] {
                for h in &v.hypotheses {
                    rows.push(Row {
                        branch: v.theorem,
                        hypothesis: h.name,
                        satisfied: h.satisfied,
                        lhs: h.lhs,
                        rhs: h.rhs,
                        branch_sign: v.predicted_sign.to_string(),
                        predicted_sign: report.predicted_sign.to_string(),
                    });
                }
            }
            Data::table(&rows)?
        }
    };
    Ok(Outcome {
        data,
        format,
        seed: common.seed.unwrap_or(DEFAULT_SEED),
        parameters: params(args),
    })
}
