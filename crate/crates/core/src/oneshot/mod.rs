//! One-shot random coding: codebooks, the pinching-based decoder, exact
//! error evaluation, the expectation bound, and numerical checks of the
//! operator inequalities behind it.

mod bound;
mod code;
mod decoder;
mod lemmas;
mod simulate;

pub use bound::{bound_over_grid, default_alpha_grid, nu2, proposition1_bound, proposition1_bound_rates, BoundValue};
pub use code::{sample_codebook, CodeParams, Codebook};
pub use decoder::{build_decoder, decision_region, decoder_from_region, DecisionRegion, DecoderPOVM};
pub use lemmas::{
    hayashi_nagaoka_check, lemma1_check, lemma2_check, CqEnsemble, HayashiNagaokaOutcome, Lemma1Outcome, Lemma2Outcome,
    HN_RANGE_TOL, HN_SLACK_TOL, LEMMA2_RELATIVE_SLACK,
};
pub use simulate::{
    evaluate_error, mean_and_stderr, monte_carlo_expected_error, purified_distance_term, transmitted_state,
    EncoderMode, ErrorEvaluation, MonteCarloConfig, SimulationReport, EXACT_DIMENSION_LIMIT,
};
