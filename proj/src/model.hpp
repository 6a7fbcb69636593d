#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "distributions.hpp"

// Two-state Markov-switching extreme-value model for daily high temperatures.
// State 1 days follow a GPD margin with logistic extreme-value dependence in
// time; state 0 days follow a Gaussian AR(1). Everything here is a pure
// function of its arguments.

namespace hw {

struct ModelParams {
  double a0 = 0.05;        // P(enter heat wave)
  double a1 = 0.5;         // P(remain in heat wave)
  double u = 0.0;          // GPD threshold, degC
  double sigma = 1.0;      // GPD scale, > 0
  double xi = 0.0;         // GPD shape, in (-0.5, 0.5)
  double mu = 0.0;         // non-heat-wave mean
  double sigma_n2 = 1.0;   // non-heat-wave variance, > 0
  double phi = 0.5;        // AR(1) autocorrelation, in (0,1)
  double alpha = 0.7;      // within-heat-wave logistic dependence, (0,1]
  double alpha01 = 0.7;    // transition-day logistic dependence, (0,1]

  double sigma_n() const { return std::sqrt(sigma_n2); }
  // Stationary AR(1) variance sigma_n2 / (1 - phi^2).
  double stationary_var() const { return sigma_n2 / (1.0 - phi * phi); }

  // Empty string when valid, else a description of the first violation.
  std::string validate() const;
};

struct SummerSegment {
  int year = 0;
  std::vector<double> values;
  std::vector<std::uint8_t> missing;  // 1 = missing

  std::size_t size() const { return values.size(); }
  std::size_t missing_count() const;
};

using StateSequence = std::vector<std::uint8_t>;

// --- Fréchet-scale transforms (Section on margins) ---

// z = -1/log F_GPD(y); 0 at y = u.
double frechet_from_gpd(double y, double u, double sigma, double xi);

// z = -1/log Phi((y - mu)/sigma_n); stable in deep tails.
double frechet_from_normal(double y, double mu, double sigma_n2);

// Bivariate logistic EV CDF exp(-(z1^{-1/a} + z2^{-1/a})^a) on Fréchet scale.
double logistic_bivariate_cdf(double z1, double z2, double alpha);

// Margin selected by state: GPD for s = 1, Normal(mu, sigma_n2) for s = 0.
double margin_log_pdf(double y, int s, const ModelParams& p);
double margin_log_cdf(double y, int s, const ModelParams& p);
double margin_log_survivor(double y, int s, const ModelParams& p);

// log(-log F(y)), i.e. -log z on the Fréchet scale. Representable deep into
// both tails (computed from the survivor above the bulk, where log F itself
// rounds to -0). +inf at F = 0.
double margin_log_neg_log_cdf(double y, int s, const ModelParams& p);

// Joint log density of a consecutive pair under the logistic copula with
// state-appropriate margins; dependence alpha when s1 = s2 = 1, alpha01
// otherwise. (s1,s2) = (0,0) is not a copula case and is rejected upstream.
// Returns -inf for out-of-support GPD values.
double bivariate_log_density(double y1, double y2, int s1, int s2,
                             const ModelParams& p);

// log f(y_t | y_prev, s_t, s_prev): AR(1) for (0,0), else the bivariate
// density divided by the margin density of y_prev under its own state.
double conditional_log_density(double y_t, double y_prev, int s_t, int s_prev,
                               const ModelParams& p);

// log F(y_t | y_prev, s_t, s_prev), from the partial derivative of the
// bivariate CDF in the copula cases. Used by the conditional sampler and the
// PIT diagnostics.
double conditional_log_cdf(double y_t, double y_prev, int s_t, int s_prev,
                           const ModelParams& p);

// Density of day 1 given its state: GPD for s = 1, the stationary AR(1)
// marginal Normal(mu, sigma_n2/(1-phi^2)) for s = 0.
double initial_log_density(double y, int s, const ModelParams& p);

// Stationary distribution (pi0, pi1) of the two-state chain.
struct StationaryDist {
  double pi0;
  double pi1;
};
StationaryDist stationary_state_distribution(double a0, double a1);

// log A[s_prev, s_t].
double log_transition_prob(int s_prev, int s_t, double a0, double a1);

// Full joint log f(y, s | theta) for one segment: initial state and emission,
// then transition and conditional terms. The segment must be complete (no
// missing values). -inf when any state-1 day lies outside the GPD support.
double segment_log_likelihood(const SummerSegment& seg, const StateSequence& s,
                              const ModelParams& p);

// Observation part only, log f(y | s, theta), without the state-chain terms.
double segment_obs_log_likelihood(const SummerSegment& seg,
                                  const StateSequence& s, const ModelParams& p);

}  // namespace hw
