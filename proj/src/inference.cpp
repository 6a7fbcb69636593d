#include "inference.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "diagnostics.hpp"
#include "errors.hpp"

namespace hw {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double logistic(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double normal_log_density(double x, double mean, double sd) {
  return norm_log_pdf((x - mean) / sd) - std::log(sd);
}

// log pi(s1 | a0, a1), the stationary initial-state factor.
double log_initial_state_prob(int s1, double a0, double a1) {
  auto st = stationary_state_distribution(a0, a1);
  return std::log(s1 == 1 ? st.pi1 : st.pi0);
}

double chain_log_prob(const StateSequence& s, double a0, double a1) {
  double ll = log_initial_state_prob(s[0], a0, a1);
  for (std::size_t t = 1; t < s.size(); ++t)
    ll += log_transition_prob(s[t - 1], s[t], a0, a1);
  return ll;
}

double log_beta_density(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) return kNegInf;
  return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) +
         std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
}

}  // namespace

double log_prior(const ModelParams& p, const PriorSpec& prior) {
  if (!p.validate().empty()) return kNegInf;
  if (p.xi <= prior.xi_lo || p.xi >= prior.xi_hi) return kNegInf;
  double lp = 0.0;
  lp += normal_log_density(std::log(p.sigma), prior.log_sigma_mean,
                           prior.log_sigma_sd) -
        std::log(p.sigma);
  lp += normal_log_density(std::log(p.sigma_n2), prior.log_sigma_n2_mean,
                           prior.log_sigma_n2_sd) -
        std::log(p.sigma_n2);
  lp -= std::log(prior.xi_hi - prior.xi_lo);
  lp += normal_log_density(p.u, prior.u_center, prior.u_sd);
  lp += normal_log_density(p.mu, prior.mu_mean, prior.mu_sd);
  // phi, alpha, alpha01 uniform on (0,1): zero contribution
  lp += log_beta_density(p.a0, prior.a0_alpha, prior.a0_beta);
  lp += log_beta_density(p.a1, prior.a1_alpha, prior.a1_beta);
  return lp;
}

void MCMCConfig::validate() const {
  if (n_iterations <= 0) throw ArgumentError("n_iterations must be positive");
  if (n_burnin < 0 || n_burnin >= n_iterations)
    throw ArgumentError("n_burnin must lie in [0, n_iterations)");
  if (thinning <= 0) throw ArgumentError("thinning must be positive");
  if (adaptation_window <= 0)
    throw ArgumentError("adaptation_window must be positive");
  if (!(target_acceptance > 0.0 && target_acceptance < 1.0))
    throw ArgumentError("target_acceptance must lie in (0,1)");
}

StateSequence ffbs_sample_states(const SummerSegment& seg, const ModelParams& p,
                                 Rng& rng) {
  const std::size_t T = seg.size();
  auto st = stationary_state_distribution(p.a0, p.a1);
  double log_a[2][2] = {{std::log1p(-p.a0), std::log(p.a0)},
                        {std::log1p(-p.a1), std::log(p.a1)}};

  // Pairwise emissions e[t][i][j] = log f(y_t | y_{t-1}, s_t=j, s_{t-1}=i).
  std::vector<std::array<double, 4>> emis(T);
  for (std::size_t t = 1; t < T; ++t)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        emis[t][2 * i + j] =
            conditional_log_density(seg.values[t], seg.values[t - 1], j, i, p);

  std::vector<std::array<double, 2>> la(T);
  la[0] = {std::log(st.pi0) + initial_log_density(seg.values[0], 0, p),
           std::log(st.pi1) + initial_log_density(seg.values[0], 1, p)};
  for (std::size_t t = 1; t < T; ++t) {
    for (int j = 0; j < 2; ++j) {
      double w0 = la[t - 1][0] + log_a[0][j] + emis[t][j];
      double w1 = la[t - 1][1] + log_a[1][j] + emis[t][2 + j];
      la[t][j] = log_sum_exp(w0, w1);
    }
    double m = std::max(la[t][0], la[t][1]);
    if (m == kNegInf)
      throw NumericError("ffbs: no feasible state at day " + std::to_string(t) +
                         " of segment year " + std::to_string(seg.year));
    la[t][0] -= m;
    la[t][1] -= m;
  }
  if (std::max(la[0][0], la[0][1]) == kNegInf)
    throw NumericError("ffbs: no feasible state at day 0 of segment year " +
                       std::to_string(seg.year));

  StateSequence s(T, 0);
  auto draw = [&rng](double lw0, double lw1) -> std::uint8_t {
    if (lw0 == kNegInf) return 1;
    if (lw1 == kNegInf) return 0;
    double p1 = 1.0 / (1.0 + std::exp(lw0 - lw1));
    return rng.uniform() < p1 ? 1 : 0;
  };
  s[T - 1] = draw(la[T - 1][0], la[T - 1][1]);
  for (std::size_t t = T - 1; t-- > 0;) {
    int j = s[t + 1];
    double w0 = la[t][0] + log_a[0][j] + emis[t + 1][j];
    double w1 = la[t][1] + log_a[1][j] + emis[t + 1][2 + j];
    s[t] = draw(w0, w1);
  }
  return s;
}

TransitionCounts count_transitions(const std::vector<StateSequence>& states) {
  TransitionCounts c;
  for (const auto& s : states)
    for (std::size_t t = 1; t < s.size(); ++t) {
      if (s[t - 1] == 0)
        (s[t] == 0 ? c.n00 : c.n01)++;
      else
        (s[t] == 0 ? c.n10 : c.n11)++;
    }
  return c;
}

std::pair<double, double> update_transition_probs(const TransitionCounts& c,
                                                  const PriorSpec& prior,
                                                  Rng& rng) {
  double a0 = rng.beta(prior.a0_alpha + static_cast<double>(c.n01),
                       prior.a0_beta + static_cast<double>(c.n00));
  double a1 = rng.beta(prior.a1_alpha + static_cast<double>(c.n11),
                       prior.a1_beta + static_cast<double>(c.n10));
  return {a0, a1};
}

const char* walk_param_name(WalkParam w) {
  switch (w) {
    case WalkParam::U: return "u";
    case WalkParam::Sigma: return "sigma";
    case WalkParam::Xi: return "xi";
    case WalkParam::Mu: return "mu";
    case WalkParam::SigmaN2: return "sigma_n2";
    case WalkParam::Phi: return "phi";
    case WalkParam::Alpha: return "alpha";
    case WalkParam::Alpha01: return "alpha01";
  }
  return "?";
}

double to_walk_scale(WalkParam w, double v, const PriorSpec& prior) {
  switch (w) {
    case WalkParam::U:
    case WalkParam::Mu: return v;
    case WalkParam::Sigma:
    case WalkParam::SigmaN2: return std::log(v);
    case WalkParam::Xi:
      return logit((v - prior.xi_lo) / (prior.xi_hi - prior.xi_lo));
    case WalkParam::Phi:
    case WalkParam::Alpha:
    case WalkParam::Alpha01: return logit(v);
  }
  return v;
}

double from_walk_scale(WalkParam w, double x, const PriorSpec& prior) {
  switch (w) {
    case WalkParam::U:
    case WalkParam::Mu: return x;
    case WalkParam::Sigma:
    case WalkParam::SigmaN2: return std::exp(x);
    case WalkParam::Xi:
      return prior.xi_lo + (prior.xi_hi - prior.xi_lo) * logistic(x);
    case WalkParam::Phi:
    case WalkParam::Alpha:
    case WalkParam::Alpha01: return logistic(x);
  }
  return x;
}

double walk_log_jacobian(WalkParam w, double x, const PriorSpec& prior) {
  switch (w) {
    case WalkParam::U:
    case WalkParam::Mu: return 0.0;
    case WalkParam::Sigma:
    case WalkParam::SigmaN2: return x;  // d exp(x)/dx
    case WalkParam::Xi: {
      double g = logistic(x);
      return std::log(prior.xi_hi - prior.xi_lo) + std::log(g) + std::log1p(-g);
    }
    case WalkParam::Phi:
    case WalkParam::Alpha:
    case WalkParam::Alpha01: {
      double g = logistic(x);
      return std::log(g) + std::log1p(-g);
    }
  }
  return 0.0;
}

ModelParams initial_params(const std::vector<SummerSegment>& data,
                           const PriorSpec& prior) {
  std::vector<double> pooled;
  for (const auto& seg : data)
    for (std::size_t t = 0; t < seg.size(); ++t)
      if (!seg.missing[t]) pooled.push_back(seg.values[t]);
  if (pooled.size() < 10)
    throw ArgumentError("too few observed values to initialize the sampler");

  ModelParams p;
  p.u = empirical_quantile(pooled, 0.98);

  std::vector<double> sub, exc;
  for (double y : pooled) (y > p.u ? exc : sub).push_back(y);
  if (sub.size() < 5)
    throw ArgumentError("initialization: almost all data above the threshold");

  double mu = std::accumulate(sub.begin(), sub.end(), 0.0) /
              static_cast<double>(sub.size());
  double var = 0.0;
  for (double y : sub) var += (y - mu) * (y - mu);
  var /= static_cast<double>(sub.size());
  if (var <= 0.0) throw ArgumentError("initialization: degenerate data");

  // Lag-1 autocorrelation over sub-threshold within-segment pairs.
  double num = 0.0;
  long npairs = 0;
  for (const auto& seg : data)
    for (std::size_t t = 1; t < seg.size(); ++t) {
      if (seg.missing[t] || seg.missing[t - 1]) continue;
      if (seg.values[t] > p.u || seg.values[t - 1] > p.u) continue;
      num += (seg.values[t] - mu) * (seg.values[t - 1] - mu);
      ++npairs;
    }
  double phi = npairs > 0 ? (num / static_cast<double>(npairs)) / var : 0.5;
  p.phi = std::clamp(phi, 0.05, 0.95);
  p.mu = mu;
  p.sigma_n2 = std::max(var * (1.0 - p.phi * p.phi), 1e-6);

  // Probability-weighted moments on exceedances.
  if (exc.size() >= 5) {
    std::sort(exc.begin(), exc.end());
    double n = static_cast<double>(exc.size());
    double b0 = 0.0, b1 = 0.0;
    for (std::size_t i = 0; i < exc.size(); ++i) {
      double w = exc[i] - p.u;
      b0 += w;
      b1 += w * (n - 1.0 - static_cast<double>(i)) / (n - 1.0);
    }
    b0 /= n;
    b1 /= n;
    double denom = b0 - 2.0 * b1;
    if (denom > 1e-12) {
      p.xi = std::clamp(2.0 - b0 / denom, prior.xi_lo + 0.05, prior.xi_hi - 0.05);
      p.sigma = std::max(2.0 * b0 * b1 / denom, 1e-3);
    } else {
      p.xi = 0.0;
      p.sigma = std::max(b0, 1e-3);
    }
  } else {
    p.xi = 0.0;
    p.sigma = 1.0;
  }

  p.alpha = 0.7;
  p.alpha01 = 0.7;

  // a0, a1 from the thresholded state sequence (posterior means).
  std::vector<StateSequence> init_states;
  for (const auto& seg : data) {
    StateSequence s(seg.size(), 0);
    for (std::size_t t = 0; t < seg.size(); ++t)
      s[t] = (!seg.missing[t] && seg.values[t] > p.u) ? 1 : 0;
    init_states.push_back(std::move(s));
  }
  auto c = count_transitions(init_states);
  p.a0 = (prior.a0_alpha + static_cast<double>(c.n01)) /
         (prior.a0_alpha + prior.a0_beta + static_cast<double>(c.n00 + c.n01));
  p.a1 = (prior.a1_alpha + static_cast<double>(c.n11)) /
         (prior.a1_alpha + prior.a1_beta + static_cast<double>(c.n10 + c.n11));
  p.a0 = std::clamp(p.a0, 1e-4, 1.0 - 1e-4);
  p.a1 = std::clamp(p.a1, 1e-4, 1.0 - 1e-4);
  return p;
}

ChainState::ChainState(const std::vector<SummerSegment>& data,
                       const PriorSpec& prior, const MCMCConfig& cfg,
                       const ModelParams* start)
    : prior_(prior), raw_(data) {
  (void)cfg;
  if (data.empty()) throw ArgumentError("run_chain: no segments");
  for (const auto& seg : data) {
    if (seg.size() < 2)
      throw ArgumentError("segment year " + std::to_string(seg.year) +
                          " shorter than 2 days");
    if (seg.missing.size() != seg.values.size())
      throw ArgumentError("segment year " + std::to_string(seg.year) +
                          ": missing mask length mismatch");
  }

  if (std::isnan(prior_.u_center)) {
    std::vector<double> pooled;
    for (const auto& seg : raw_)
      for (std::size_t t = 0; t < seg.size(); ++t)
        if (!seg.missing[t]) pooled.push_back(seg.values[t]);
    prior_.u_center = empirical_quantile(pooled, 0.98);
  }

  if (start) {
    std::string msg = start->validate();
    if (!msg.empty()) throw ArgumentError("starting parameters: " + msg);
    params_ = *start;
  } else {
    params_ = initial_params(raw_, prior_);
  }

  completed_ = raw_;
  for (auto& seg : completed_)
    for (std::size_t t = 0; t < seg.size(); ++t)
      if (seg.missing[t]) seg.values[t] = params_.mu;

  // States by thresholding, restricted to the GPD support (the upper
  // endpoint matters when xi < 0).
  states_.resize(completed_.size());
  for (std::size_t i = 0; i < completed_.size(); ++i) {
    StateSequence s(completed_[i].size(), 0);
    for (std::size_t t = 0; t < s.size(); ++t) {
      double y = completed_[i].values[t];
      s[t] = (!raw_[i].missing[t] && y > params_.u &&
              gpd_in_support(y, params_.u, params_.sigma, params_.xi))
                 ? 1
                 : 0;
    }
    states_[i] = std::move(s);
  }

  seg_obs_ll_.resize(completed_.size());
  seg_chain_ll_.resize(completed_.size());
  for (std::size_t i = 0; i < completed_.size(); ++i) refresh_segment(i);
  log_prior_ = log_prior(params_, prior_);

  if (!std::isfinite(log_posterior())) {
    // Copula pairs can still be degenerate at support edges; an all-zero
    // state assignment has full AR(1) support.
    for (auto& s : states_) std::fill(s.begin(), s.end(), 0);
    for (std::size_t i = 0; i < completed_.size(); ++i) refresh_segment(i);
  }
  if (!std::isfinite(log_posterior()))
    throw NumericError(
        "non-finite log posterior at initialization; check that the input is "
        "de-seasonalized and in degrees Celsius");

  scales_ = {0.25, 0.15, 0.3, 0.15, 0.1, 0.3, 0.3, 0.3};
}

void ChainState::restore(const ModelParams& params,
                         const std::vector<StateSequence>& states,
                         const std::vector<std::vector<double>>& values) {
  std::string msg = params.validate();
  if (!msg.empty()) throw ArgumentError("restore: " + msg);
  if (states.size() != raw_.size() || values.size() != raw_.size())
    throw ArgumentError("restore: segment count mismatch");
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    if (states[i].size() != raw_[i].size() || values[i].size() != raw_[i].size())
      throw ArgumentError("restore: segment length mismatch");
    for (std::size_t t = 0; t < raw_[i].size(); ++t)
      if (!raw_[i].missing[t] && values[i][t] != raw_[i].values[t])
        throw ArgumentError("restore: observed value modified");
  }
  params_ = params;
  states_ = states;
  for (std::size_t i = 0; i < raw_.size(); ++i) completed_[i].values = values[i];
  for (std::size_t i = 0; i < raw_.size(); ++i) refresh_segment(i);
  log_prior_ = log_prior(params_, prior_);
  if (!std::isfinite(log_posterior()))
    throw NumericError("restore: non-finite log posterior");
}

void ChainState::refresh_segment(std::size_t idx) {
  seg_obs_ll_[idx] =
      segment_obs_log_likelihood(completed_[idx], states_[idx], params_);
  seg_chain_ll_[idx] = chain_log_prob(states_[idx], params_.a0, params_.a1);
}

double ChainState::log_posterior() const {
  double ll = log_prior_;
  for (double v : seg_obs_ll_) ll += v;
  for (double v : seg_chain_ll_) ll += v;
  return ll;
}

double ChainState::log_posterior_recomputed() const {
  double ll = log_prior(params_, prior_);
  for (std::size_t i = 0; i < completed_.size(); ++i)
    ll += segment_log_likelihood(completed_[i], states_[i], params_);
  return ll;
}

double ChainState::imputation_target(std::size_t seg, int t, double v) const {
  const auto& y = completed_[seg].values;
  const auto& s = states_[seg];
  const int T = static_cast<int>(y.size());
  double ll = 0.0;
  if (t == 0)
    ll += initial_log_density(v, s[0], params_);
  else
    ll += conditional_log_density(v, y[t - 1], s[t], s[t - 1], params_);
  if (t + 1 < T) ll += conditional_log_density(y[t + 1], v, s[t + 1], s[t], params_);
  return ll;
}

void ChainState::impute_missing(Rng& rng) {
  for (std::size_t i = 0; i < raw_.size(); ++i) {
    bool any = false;
    auto& y = completed_[i].values;
    const auto& s = states_[i];
    const int T = static_cast<int>(y.size());
    for (int t = 0; t < T; ++t) {
      if (!raw_[i].missing[t]) continue;
      any = true;
      const double mu = params_.mu;
      const double phi = params_.phi;
      const double sn = params_.sigma_n();
      bool left_gauss = (t == 0) || (s[t - 1] == 0);
      bool right_gauss = (t + 1 >= T) || (s[t + 1] == 0);
      if (s[t] == 0 && left_gauss && right_gauss) {
        // Closed-form Gaussian full conditionals.
        if (t == 0 && T > 1) {
          // Reversed AR(1) step from the right neighbor.
          y[t] = rng.normal(mu + phi * (y[1] - mu), sn);
        } else if (t == 0) {
          y[t] = rng.normal(mu, std::sqrt(params_.stationary_var()));
        } else if (t + 1 >= T) {
          y[t] = rng.normal(mu + phi * (y[t - 1] - mu), sn);
        } else {
          double pulled = phi * ((y[t - 1] - mu) + (y[t + 1] - mu)) /
                          (1.0 + phi * phi);
          y[t] = rng.normal(mu + pulled, sn / std::sqrt(1.0 + phi * phi));
        }
      } else {
        // Copula-involved full conditional: Metropolis step centered at the
        // current value.
        double cur = y[t];
        double cur_ll = imputation_target(i, t, cur);
        double prop = cur + sn * rng.normal();
        double prop_ll = imputation_target(i, t, prop);
        if (std::log(rng.uniform()) < prop_ll - cur_ll) y[t] = prop;
      }
    }
    if (any) refresh_segment(i);
  }
}

void ChainState::sample_states(Rng& rng) {
  for (std::size_t i = 0; i < completed_.size(); ++i) {
    states_[i] = ffbs_sample_states(completed_[i], params_, rng);
    refresh_segment(i);
  }
}

void ChainState::update_transitions(Rng& rng) {
  auto counts = count_transitions(states_);
  auto [a0p, a1p] = update_transition_probs(counts, prior_, rng);
  // The conjugate proposal omits the stationary initial-state factors; a
  // Metropolis-Hastings correction keeps the sweep exact.
  double log_r = 0.0;
  for (const auto& s : states_) {
    log_r += log_initial_state_prob(s[0], a0p, a1p) -
             log_initial_state_prob(s[0], params_.a0, params_.a1);
  }
  if (std::log(rng.uniform()) < log_r) {
    params_.a0 = a0p;
    params_.a1 = a1p;
    for (std::size_t i = 0; i < states_.size(); ++i)
      seg_chain_ll_[i] = chain_log_prob(states_[i], params_.a0, params_.a1);
    log_prior_ = log_prior(params_, prior_);
  }
}

bool ChainState::metropolis_update(WalkParam w, Rng& rng) {
  const int k = static_cast<int>(w);
  ++window_proposals_[k];
  ++total_proposals_[k];

  auto get = [](ModelParams& p, WalkParam q) -> double& {
    switch (q) {
      case WalkParam::U: return p.u;
      case WalkParam::Sigma: return p.sigma;
      case WalkParam::Xi: return p.xi;
      case WalkParam::Mu: return p.mu;
      case WalkParam::SigmaN2: return p.sigma_n2;
      case WalkParam::Phi: return p.phi;
      case WalkParam::Alpha: return p.alpha;
      case WalkParam::Alpha01: return p.alpha01;
    }
    return p.u;
  };

  double x = to_walk_scale(w, get(params_, w), prior_);
  double xp = x + scales_[k] * rng.normal();
  ModelParams cand = params_;
  get(cand, w) = from_walk_scale(w, xp, prior_);

  double cand_prior = log_prior(cand, prior_);
  double log_ratio = cand_prior - log_prior_ + walk_log_jacobian(w, xp, prior_) -
                     walk_log_jacobian(w, x, prior_);
  std::vector<double> cand_obs(completed_.size());
  if (cand_prior > kNegInf) {
    for (std::size_t i = 0; i < completed_.size(); ++i) {
      cand_obs[i] = segment_obs_log_likelihood(completed_[i], states_[i], cand);
      log_ratio += cand_obs[i] - seg_obs_ll_[i];
      if (log_ratio == kNegInf) break;
    }
  }

  if (std::log(rng.uniform()) < log_ratio) {
    params_ = cand;
    log_prior_ = cand_prior;
    seg_obs_ll_ = cand_obs;
    ++window_accepts_[k];
    ++total_accepts_[k];
    return true;
  }
  return false;
}

void ChainState::adapt_scales(double target, int window) {
  if (!adapting_) return;
  for (int k = 0; k < 8; ++k) {
    if (window_proposals_[k] < window) continue;
    double rate = static_cast<double>(window_accepts_[k]) /
                  static_cast<double>(window_proposals_[k]);
    double factor = std::clamp(std::exp(2.0 * (rate - target)), 0.5, 2.0);
    scales_[k] = std::clamp(scales_[k] * factor, 1e-6, 50.0);
    window_accepts_[k] = 0;
    window_proposals_[k] = 0;
  }
}

double ChainState::proposal_scale(WalkParam w) const {
  return scales_[static_cast<int>(w)];
}

void ChainState::set_proposal_scale(WalkParam w, double scale) {
  if (scale < 0.0) throw ArgumentError("proposal scale must be >= 0");
  scales_[static_cast<int>(w)] = scale;
}

std::pair<long, long> ChainState::acceptance_counts(WalkParam w) const {
  int k = static_cast<int>(w);
  return {total_accepts_[k], total_proposals_[k]};
}

void ChainState::reset_acceptance_counts() {
  total_accepts_.fill(0);
  total_proposals_.fill(0);
}

PosteriorSample ChainState::snapshot() const {
  PosteriorSample out;
  out.params = params_;
  out.states = states_;
  out.imputed.resize(raw_.size());
  for (std::size_t i = 0; i < raw_.size(); ++i)
    for (std::size_t t = 0; t < raw_[i].size(); ++t)
      if (raw_[i].missing[t])
        out.imputed[i].emplace_back(static_cast<int>(t),
                                    completed_[i].values[t]);
  out.log_posterior = log_posterior();
  return out;
}

FitResult run_chain(const std::vector<SummerSegment>& data,
                    const PriorSpec& prior, const MCMCConfig& cfg) {
  cfg.validate();
  ChainState chain(data, prior, cfg);
  Rng rng(cfg.seed);

  FitResult out;
  out.resolved_prior = chain.prior();
  out.initial_params = chain.params();
  out.log_posterior_trace.reserve(cfg.n_iterations);

  for (long iter = 1; iter <= cfg.n_iterations; ++iter) {
    chain.impute_missing(rng);
    chain.sample_states(rng);
    chain.update_transitions(rng);
    for (WalkParam w : kWalkOrder) chain.metropolis_update(w, rng);

    if (iter <= cfg.n_burnin && iter % cfg.adaptation_window == 0)
      chain.adapt_scales(cfg.target_acceptance, cfg.adaptation_window);
    if (iter == cfg.n_burnin) {
      chain.freeze_adaptation();
      chain.reset_acceptance_counts();
    }
    out.log_posterior_trace.push_back(chain.log_posterior());
    if (iter > cfg.n_burnin && (iter - cfg.n_burnin) % cfg.thinning == 0)
      out.samples.push_back(chain.snapshot());
  }

  for (WalkParam w : kWalkOrder) {
    auto [acc, prop] = chain.acceptance_counts(w);
    out.acceptance_rates[walk_param_name(w)] =
        prop > 0 ? static_cast<double>(acc) / static_cast<double>(prop) : kNaN;
  }
  return out;
}

}  // namespace hw
