#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

// Bayesian fitting by block Gibbs: FFBS state draws, conjugate Beta updates
// for the transition probabilities, adaptive random-walk Metropolis for the
// remaining parameters, and predictive imputation of missing values.

namespace hw {

struct PriorSpec {
  double log_sigma_mean = 0.0;
  double log_sigma_sd = 10.0;
  double xi_lo = -0.5;
  double xi_hi = 0.5;
  // u prior center; NaN means "use the empirical 0.98 quantile of the data".
  double u_center = kNaN;
  double u_sd = 1.0;
  double mu_mean = 0.0;
  double mu_sd = 100.0;
  double log_sigma_n2_mean = 0.0;
  double log_sigma_n2_sd = 10.0;
  double a0_alpha = 1.0;
  double a0_beta = 1.0;
  double a1_alpha = 1.0;
  double a1_beta = 1.0;
};

// Log prior density of the full parameter vector on its natural scale
// (phi, alpha, alpha01 uniform on (0,1); -inf outside any support).
double log_prior(const ModelParams& p, const PriorSpec& prior);

struct MCMCConfig {
  long n_iterations = 50000;
  long n_burnin = 10000;
  int thinning = 10;
  std::uint64_t seed = 1;
  int adaptation_window = 100;
  double target_acceptance = 0.3;

  void validate() const;  // throws ArgumentError
};

struct PosteriorSample {
  ModelParams params;
  std::vector<StateSequence> states;  // one per segment
  // Imputed (day_index, value) pairs per segment; empty when data complete.
  std::vector<std::vector<std::pair<int, double>>> imputed;
  double log_posterior = 0.0;
};

// Exact joint draw of S | Y, theta for one complete segment.
// Throws NumericError naming the day index if no state has finite emission.
StateSequence ffbs_sample_states(const SummerSegment& seg, const ModelParams& p,
                                 Rng& rng);

struct TransitionCounts {
  long n00 = 0, n01 = 0, n10 = 0, n11 = 0;
};

// Pooled within-segment transition counts.
TransitionCounts count_transitions(const std::vector<StateSequence>& states);

// Conjugate draw: a0 ~ Beta(a + n01, b + n00), a1 ~ Beta(a + n11, b + n10).
std::pair<double, double> update_transition_probs(const TransitionCounts& c,
                                                  const PriorSpec& prior,
                                                  Rng& rng);

// Metropolis-updated parameters, in fixed sweep order.
enum class WalkParam { U, Sigma, Xi, Mu, SigmaN2, Phi, Alpha, Alpha01 };
constexpr std::array<WalkParam, 8> kWalkOrder = {
    WalkParam::U,   WalkParam::Sigma,   WalkParam::Xi,    WalkParam::Mu,
    WalkParam::SigmaN2, WalkParam::Phi, WalkParam::Alpha, WalkParam::Alpha01};
const char* walk_param_name(WalkParam w);

// Sampling scale transforms: log for sigma and sigma_n2, logit for phi,
// alpha, alpha01 and for xi rescaled to its prior interval, identity for
// u and mu.
double to_walk_scale(WalkParam w, double value, const PriorSpec& prior);
double from_walk_scale(WalkParam w, double x, const PriorSpec& prior);
// log |d theta / d x| of the inverse transform.
double walk_log_jacobian(WalkParam w, double x, const PriorSpec& prior);

// One chain's mutable state plus likelihood bookkeeping.
class ChainState {
 public:
  // start = nullptr initializes from the data (moment/PWM heuristics);
  // otherwise the chain starts at *start.
  ChainState(const std::vector<SummerSegment>& data, const PriorSpec& prior,
             const MCMCConfig& cfg, const ModelParams* start = nullptr);

  // Inject a full chain state: parameters, one state sequence per segment,
  // and completed values (observed entries must match the raw data).
  void restore(const ModelParams& params,
               const std::vector<StateSequence>& states,
               const std::vector<std::vector<double>>& completed_values);

  const ModelParams& params() const { return params_; }
  const std::vector<StateSequence>& states() const { return states_; }
  const std::vector<SummerSegment>& completed() const { return completed_; }
  const PriorSpec& prior() const { return prior_; }

  // log prior + log P(S | a0,a1) + log f(Y | S, theta), tracked incrementally.
  double log_posterior() const;
  // Same quantity evaluated from scratch (consistency checks).
  double log_posterior_recomputed() const;

  // Gibbs blocks; each leaves the bookkeeping consistent.
  void impute_missing(Rng& rng);
  void sample_states(Rng& rng);
  void update_transitions(Rng& rng);
  // Returns true when the proposal was accepted.
  bool metropolis_update(WalkParam w, Rng& rng);

  void adapt_scales(double target, int window);
  void freeze_adaptation() { adapting_ = false; }

  double proposal_scale(WalkParam w) const;
  void set_proposal_scale(WalkParam w, double scale);
  std::pair<long, long> acceptance_counts(WalkParam w) const;
  void reset_acceptance_counts();

  PosteriorSample snapshot() const;

 private:
  void refresh_segment(std::size_t idx);
  double imputation_target(std::size_t seg, int t, double value) const;

  PriorSpec prior_;
  ModelParams params_;
  std::vector<SummerSegment> raw_;        // original, with missing mask
  std::vector<SummerSegment> completed_;  // missing entries filled in
  std::vector<StateSequence> states_;
  std::vector<double> seg_obs_ll_;
  std::vector<double> seg_chain_ll_;
  double log_prior_ = 0.0;

  std::array<double, 8> scales_;
  std::array<long, 8> window_accepts_{};
  std::array<long, 8> window_proposals_{};
  std::array<long, 8> total_accepts_{};
  std::array<long, 8> total_proposals_{};
  bool adapting_ = true;
};

struct FitResult {
  std::vector<PosteriorSample> samples;
  std::map<std::string, double> acceptance_rates;  // post-burn-in
  std::vector<double> log_posterior_trace;         // one entry per iteration
  PriorSpec resolved_prior;                        // u_center filled in
  ModelParams initial_params;
};

// The full block Gibbs sampler. Deterministic given cfg.seed.
FitResult run_chain(const std::vector<SummerSegment>& data,
                    const PriorSpec& prior, const MCMCConfig& cfg);

// Moment/PWM initialization described with the sampler; exposed for tests.
ModelParams initial_params(const std::vector<SummerSegment>& data,
                           const PriorSpec& prior);

}  // namespace hw
