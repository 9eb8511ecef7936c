use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::channels::{build_purified_encoding, encoding_dimension, KrausChannel};
use crate::divergences::purified_distance;
use crate::error::{Error, Result};
use crate::io::serialize_extended_f64;
use crate::linalg::DensityMatrix;
use crate::rate::{assemble, ActionModel, JointStateBundle, Strategy};
use crate::rng::mix_seed;
use crate::scalar::{pairwise_sum, Real};

use super::bound::{bound_over_grid, nu2, BoundValue};
use super::{decision_region, decoder_from_region, sample_codebook, CodeParams, Codebook, DecisionRegion, DecoderPOVM};

/// Largest `S A T K1 K0 L` dimension for which the explicit encoder is built.
pub const EXACT_DIMENSION_LIMIT: usize = 64;

/// How the transmitted state for a message is formed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderMode {
    /// Average of the conditional outputs over the subcodebook.
    IdealAverage,
    /// Output of the explicit purified encoder.
    ExactUhlmann,
}

impl EncoderMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            EncoderMode::IdealAverage => "ideal_average",
            EncoderMode::ExactUhlmann => "exact_uhlmann",
        }
    }
}

impl fmt::Display for EncoderMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EncoderMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal_average" => Ok(EncoderMode::IdealAverage),
            "exact_uhlmann" => Ok(EncoderMode::ExactUhlmann),
            _ => Err(Error::BadCodeParams(format!("unknown encoder mode `{}`", s))),
        }
    }
}

/// Exact error of one code.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ErrorEvaluation {
    pub avg_error: f64,
    /// Probability of decoding a wrong message.
    pub confusion: f64,
    /// Probability of the completion outcome.
    pub completion_mass: f64,
    /// `max_m P(tau_{S|C_m}, sigma_S^{u(m)})^2`.
    pub purified_distance_term: f64,
    pub success: Vec<f64>,
}

/// Transmitted state for message `m`.
pub fn transmitted_state<T: Real>(
    model: &ActionModel<T>,
    strategy: &Strategy<T>,
    bundle: &JointStateBundle<T>,
    cb: &Codebook,
    m: usize,
    mode: EncoderMode,
) -> Result<DensityMatrix<T>> {
    let u = cb.u[m];
    match mode {
        EncoderMode::IdealAverage => {
            let states: Vec<&DensityMatrix<T>> = cb.v[m].iter().map(|&v| &bundle.rho_b[v][u]).collect();
            let w = vec![T::one() / T::of(states.len() as f64); states.len()];
            DensityMatrix::mixture(&w, &states)
        }
        EncoderMode::ExactUhlmann => {
            let encoders: Vec<&KrausChannel<T>> = cb.v[m].iter().map(|&v| &strategy.encoders()[v]).collect();
            let sigma = &strategy.action_states()[u];
            let dim = encoding_dimension(model.action(), sigma, &encoders);
            if dim > EXACT_DIMENSION_LIMIT {
                return Err(Error::TooLarge { dim, limit: EXACT_DIMENSION_LIMIT });
            }
            let enc = build_purified_encoding(model.action(), sigma, &encoders)?;
            model.comm().apply(&enc.channel_input()?)
        }
    }
}

/// `max_m P(tau_{S|C_m}, sigma_S^{u(m)})^2`.
pub fn purified_distance_term<T: Real>(bundle: &JointStateBundle<T>, cb: &Codebook) -> Result<f64> {
    let mut worst = 0.0f64;
    for (m, &u) in cb.u.iter().enumerate() {
        let states: Vec<&DensityMatrix<T>> = cb.v[m].iter().map(|&v| &bundle.rho_s[v][u]).collect();
        let w = vec![T::one() / T::of(states.len() as f64); states.len()];
        let tau = DensityMatrix::mixture(&w, &states)?;
        let p = purified_distance(&tau, &bundle.sigma_s[u])?.as_f64();
        worst = worst.max(p * p);
    }
    Ok(worst)
}

/// Average error `1 - (1/M) sum_m Tr[(sum_l beta(m,l)) Theta_B(m)]`; landing
/// anywhere in the sent message's subcodebook counts as success.
pub fn evaluate_error<T: Real>(
    model: &ActionModel<T>,
    strategy: &Strategy<T>,
    bundle: &JointStateBundle<T>,
    cb: &Codebook,
    decoder: &DecoderPOVM<T>,
    mode: EncoderMode,
) -> Result<ErrorEvaluation> {
    let m_count = cb.u.len();
    let success_ops = (0..m_count).map(|m| decoder.success_operator(m)).collect::<Result<Vec<_>>>()?;
    let mut success = Vec::with_capacity(m_count);
    let mut confusion = Vec::with_capacity(m_count);
    let mut completion = Vec::with_capacity(m_count);
    for m in 0..m_count {
        let theta = transmitted_state(model, strategy, bundle, cb, m, mode)?;
        let probs =
            success_ops.iter().map(|op| Ok(op.trace_product(theta.op())?.re.as_f64())).collect::<Result<Vec<f64>>>()?;
        success.push(probs[m]);
        let wrong: Vec<f64> = probs.iter().enumerate().filter(|&(k, _)| k != m).map(|(_, &p)| p).collect();
        confusion.push(pairwise_sum(&wrong));
        completion.push(decoder.completion.trace_product(theta.op())?.re.as_f64());
    }
    let n = m_count as f64;
    let avg_success = pairwise_sum(&success) / n;
    Ok(ErrorEvaluation {
        avg_error: (1.0 - avg_success).clamp(0.0, 1.0),
        confusion: pairwise_sum(&confusion) / n,
        completion_mass: pairwise_sum(&completion) / n,
        purified_distance_term: purified_distance_term(bundle, cb)?,
        success,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloConfig {
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; 0 uses the rayon default. Does not affect results.
    pub workers: usize,
    pub mode: EncoderMode,
    pub alpha_grid: Vec<f64>,
}

/// Outcome of a Monte-Carlo run over random codebooks. The comparison with
/// the bound is at the level of expectations over codebooks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationReport {
    pub m: usize,
    pub l: usize,
    pub trials: usize,
    pub encoder_mode: EncoderMode,
    /// Mean over trials of the exact per-code average error.
    pub avg_error_exact: f64,
    pub stderr: f64,
    pub per_trial_error: Vec<f64>,
    /// Mean over trials of the wrong-message probability.
    pub confusion_term: f64,
    /// Mean over trials of `max_m P(tau, sigma)^2`.
    pub purified_distance_term: f64,
    /// `2 * purified_distance_term`.
    pub correction: f64,
    pub bound_rhs_per_alpha: Vec<BoundValue>,
    #[serde(serialize_with = "serialize_extended_f64")]
    pub bound_rhs_min: f64,
    pub bound_alpha: f64,
    /// True when the minimal bound is at least 1.
    pub bound_vacuous: bool,
    /// `mean + correction <= bound + 3 stderr`; `None` when vacuous.
    pub dominance_holds: Option<bool>,
    pub nu1: usize,
    pub nu2: usize,
    /// Trials whose `sum gamma` was rank deficient.
    pub singular_decoders: usize,
    pub master_seed: u64,
    pub trial_seeds: Vec<u64>,
}

struct Trial {
    eval: ErrorEvaluation,
    singular: bool,
}

fn run_trial<T: Real>(
    model: &ActionModel<T>,
    strategy: &Strategy<T>,
    bundle: &JointStateBundle<T>,
    region: &DecisionRegion<T>,
    params: CodeParams,
    seed: u64,
    mode: EncoderMode,
) -> Result<Trial> {
    let cb = sample_codebook(strategy.p_vu(), params, seed)?;
    let decoder = decoder_from_region(region, &cb)?;
    let eval = evaluate_error(model, strategy, bundle, &cb, &decoder, mode)?;
    Ok(Trial { eval, singular: decoder.singular_gamma })
}

/// Mean and standard error (sample standard deviation over `sqrt(n)`).
pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = pairwise_sum(xs) / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let dev: Vec<f64> = xs.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&dev) / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Estimates the expected error over random codebooks. Trial `i` uses the
/// codebook seed `mix_seed(master_seed, i)`.
pub fn monte_carlo_expected_error<T: Real>(
    model: &ActionModel<T>,
    strategy: &Strategy<T>,
    params: CodeParams,
    config: &MonteCarloConfig,
) -> Result<SimulationReport> {
    if config.trials == 0 {
        return Err(Error::BadCodeParams("at least one trial is required".into()));
    }
    let bundle = assemble(model, strategy)?;
    let region = decision_region(&bundle.rho_vub, params.rate_sum())?;
    let seeds: Vec<u64> = (0..config.trials as u64).map(|i| mix_seed(config.master_seed, i)).collect();
    let work = |&s: &u64| run_trial(model, strategy, &bundle, &region, params, s, config.mode);
    let trials: Vec<Result<Trial>> = if config.workers == 1 {
        seeds.iter().map(work).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(config.workers)
            .build()
            .map_err(|e| Error::Numerical(e.to_string()))?;
        pool.install(|| seeds.par_iter().map(work).collect())
    };
    let trials = trials.into_iter().collect::<Result<Vec<_>>>()?;

    let errors: Vec<f64> = trials.iter().map(|t| t.eval.avg_error).collect();
    let (mean, stderr) = mean_and_stderr(&errors);
    let confusion: Vec<f64> = trials.iter().map(|t| t.eval.confusion).collect();
    let pd: Vec<f64> = trials.iter().map(|t| t.eval.purified_distance_term).collect();
    let n = trials.len() as f64;
    let pd_mean = pairwise_sum(&pd) / n;
    let correction = 2.0 * pd_mean;

    let (values, best) = bound_over_grid(&bundle, params, &config.alpha_grid)?;
    let bound_min = values[best].total;
    let bound_vacuous = !(bound_min < 1.0);
    let dominance_holds = if bound_vacuous { None } else { Some(mean + correction <= bound_min + 3.0 * stderr) };
    Ok(SimulationReport {
        m: params.m,
        l: params.l,
        trials: config.trials,
        encoder_mode: config.mode,
        avg_error_exact: mean,
        stderr,
        per_trial_error: errors,
        confusion_term: pairwise_sum(&confusion) / n,
        purified_distance_term: pd_mean,
        correction,
        bound_alpha: values[best].alpha,
        bound_rhs_min: bound_min,
        bound_rhs_per_alpha: values,
        bound_vacuous,
        dominance_holds,
        nu1: region.nu1,
        nu2: nu2(&bundle)?,
        singular_decoders: trials.iter().filter(|t| t.singular).count(),
        master_seed: config.master_seed,
        trial_seeds: seeds,
    })
}
