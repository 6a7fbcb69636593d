#include "model.hpp"

#include <cmath>

namespace hw {

namespace {

// alpha above this is treated as exact independence; the general formula
// develops 0 * inf forms at the boundary.
constexpr double kAlphaIndep = 1.0 - 1e-12;

bool in01(double x) { return x > 0.0 && x < 1.0; }

}  // namespace

std::string ModelParams::validate() const {
  if (!in01(a0)) return "a0 must lie in (0,1)";
  if (!in01(a1)) return "a1 must lie in (0,1)";
  if (!(sigma > 0.0) || !std::isfinite(sigma)) return "sigma must be positive";
  if (!(sigma_n2 > 0.0) || !std::isfinite(sigma_n2))
    return "sigma_n2 must be positive";
  if (!(xi > -0.5 && xi < 0.5)) return "xi must lie in (-0.5, 0.5)";
  if (!in01(phi)) return "phi must lie in (0,1)";
  if (!(alpha > 0.0 && alpha <= 1.0)) return "alpha must lie in (0,1]";
  if (!(alpha01 > 0.0 && alpha01 <= 1.0)) return "alpha01 must lie in (0,1]";
  if (!std::isfinite(u) || !std::isfinite(mu)) return "u and mu must be finite";
  return {};
}

std::size_t SummerSegment::missing_count() const {
  std::size_t n = 0;
  for (auto m : missing) n += m;
  return n;
}

double frechet_from_gpd(double y, double u, double sigma, double xi) {
  double lf = gpd_log_cdf(y, u, sigma, xi);
  if (lf == kNegInf) return 0.0;
  if (lf == 0.0) return -kNegInf;
  return -1.0 / lf;
}

double frechet_from_normal(double y, double mu, double sigma_n2) {
  double lf = norm_log_cdf((y - mu) / std::sqrt(sigma_n2));
  return -1.0 / lf;
}

double logistic_bivariate_cdf(double z1, double z2, double alpha) {
  if (z1 <= 0.0 || z2 <= 0.0) return 0.0;
  double inva = 1.0 / alpha;
  double v = std::pow(std::pow(z1, -inva) + std::pow(z2, -inva), alpha);
  return std::exp(-v);
}

double margin_log_pdf(double y, int s, const ModelParams& p) {
  if (s == 1) return gpd_log_density(y, p.u, p.sigma, p.xi);
  double sn = p.sigma_n();
  return norm_log_pdf((y - p.mu) / sn) - std::log(sn);
}

double margin_log_cdf(double y, int s, const ModelParams& p) {
  if (s == 1) return gpd_log_cdf(y, p.u, p.sigma, p.xi);
  return norm_log_cdf((y - p.mu) / p.sigma_n());
}

double margin_log_survivor(double y, int s, const ModelParams& p) {
  if (s == 1) return gpd_log_survivor(y, p.u, p.sigma, p.xi);
  return norm_log_cdf(-(y - p.mu) / p.sigma_n());
}

double margin_log_neg_log_cdf(double y, int s, const ModelParams& p) {
  double l = margin_log_cdf(y, s, p);
  if (l == kNegInf) return -kNegInf;  // F = 0
  if (l < -1e-3) return std::log(-l);
  // Upper tail: -log F = S + S^2/2 + S^3/3 + ... from the survivor, which
  // stays representable long after log F rounds to -0.
  double log_s = margin_log_survivor(y, s, p);
  double sv = std::exp(log_s);
  return log_s + std::log1p(sv * (0.5 + sv / 3.0));
}

// Derivation: with z_j = -1/log F_j(y_j) and V = (z1^{-1/a} + z2^{-1/a})^a,
// the joint CDF is C(y1,y2) = exp(-V). Differentiating twice,
//   f(y1,y2) = K1 K2 (V1 V2 - V12) exp(-V),
// where V_j = z_j^{-1/a-1} V^{1-1/a}, V12 = (1-1/a)(z1 z2)^{-1/a-1} V^{1-2/a}
// and K_j = dz_j/dy_j = f_j(y_j) z_j^2 exp(1/z_j) with f_j the margin pdf
// (Gaussian: phi((y-mu)/sigma_n)/sigma_n; GPD: sigma^{-1}(1-F)^{1+xi}).
// Using V1 V2 - V12 = (z1 z2)^{-1/a-1} V^{1-2/a} (V + 1/a - 1), everything
// collapses onto llog_j = log(-log F_j):
//   log f = sum_j [log f_j + (1/a - 1) llog_j - log F_j]
//           + (1 - 2/a) log V + log(V + 1/a - 1) - V.
// This form is verified against finite differences of C in the test suites.
double bivariate_log_density(double y1, double y2, int s1, int s2,
                             const ModelParams& p) {
  double alpha = (s1 == 1 && s2 == 1) ? p.alpha : p.alpha01;
  double lp1 = margin_log_pdf(y1, s1, p);
  double lp2 = margin_log_pdf(y2, s2, p);
  if (lp1 == kNegInf || lp2 == kNegInf) return kNegInf;
  if (alpha >= kAlphaIndep) return lp1 + lp2;

  double llog1 = margin_log_neg_log_cdf(y1, s1, p);
  double llog2 = margin_log_neg_log_cdf(y2, s2, p);
  // Lower margin boundary (F = 0): the copula density vanishes for alpha < 1.
  if (llog1 == -kNegInf || llog2 == -kNegInf) return kNegInf;

  double inva = 1.0 / alpha;
  double lv = alpha * log_sum_exp(inva * llog1, inva * llog2);
  double v = std::exp(lv);
  if (!std::isfinite(v)) return kNegInf;  // exp(-V) underflows to zero density

  double out = lp1 + lp2;
  out += (inva - 1.0) * (llog1 + llog2);
  out -= margin_log_cdf(y1, s1, p) + margin_log_cdf(y2, s2, p);
  out += (1.0 - 2.0 * inva) * lv + std::log(v + inva - 1.0) - v;
  return out;
}

double conditional_log_density(double y_t, double y_prev, int s_t, int s_prev,
                               const ModelParams& p) {
  if (s_t == 0 && s_prev == 0) {
    double mean = p.mu + p.phi * (y_prev - p.mu);
    double sn = p.sigma_n();
    return norm_log_pdf((y_t - mean) / sn) - std::log(sn);
  }
  double joint = bivariate_log_density(y_prev, y_t, s_prev, s_t, p);
  if (joint == kNegInf) return kNegInf;
  return joint - margin_log_pdf(y_prev, s_prev, p);
}

double conditional_log_cdf(double y_t, double y_prev, int s_t, int s_prev,
                           const ModelParams& p) {
  if (s_t == 0 && s_prev == 0) {
    double mean = p.mu + p.phi * (y_prev - p.mu);
    return norm_log_cdf((y_t - mean) / p.sigma_n());
  }
  double alpha = (s_t == 1 && s_prev == 1) ? p.alpha : p.alpha01;
  double l2 = margin_log_cdf(y_t, s_t, p);
  if (l2 == kNegInf) return kNegInf;
  if (alpha >= kAlphaIndep) return l2;

  double llog1 = margin_log_neg_log_cdf(y_prev, s_prev, p);
  double llog2 = margin_log_neg_log_cdf(y_t, s_t, p);
  if (llog2 == -kNegInf) return kNegInf;
  double inva = 1.0 / alpha;
  double lv = alpha * log_sum_exp(inva * llog1, inva * llog2);
  double v = std::exp(lv);
  if (!std::isfinite(v)) return kNegInf;
  // d/dz1 of exp(-V), normalized by the margin density of y_prev:
  // F(y_t | y_prev) = exp(-V) V_1 z1^2 exp(1/z1).
  double out = -v - margin_log_cdf(y_prev, s_prev, p) +
               (inva - 1.0) * (llog1 - lv);
  return std::min(out, 0.0);
}

double initial_log_density(double y, int s, const ModelParams& p) {
  if (s == 1) return gpd_log_density(y, p.u, p.sigma, p.xi);
  double sd = std::sqrt(p.stationary_var());
  return norm_log_pdf((y - p.mu) / sd) - std::log(sd);
}

StationaryDist stationary_state_distribution(double a0, double a1) {
  double pi1 = a0 / (1.0 + a0 - a1);
  return {1.0 - pi1, pi1};
}

double log_transition_prob(int s_prev, int s_t, double a0, double a1) {
  double enter = (s_prev == 0) ? a0 : a1;
  return std::log(s_t == 1 ? enter : 1.0 - enter);
}

double segment_obs_log_likelihood(const SummerSegment& seg,
                                  const StateSequence& s,
                                  const ModelParams& p) {
  double ll = initial_log_density(seg.values[0], s[0], p);
  for (std::size_t t = 1; t < seg.size(); ++t) {
    if (ll == kNegInf) return kNegInf;
    ll += conditional_log_density(seg.values[t], seg.values[t - 1], s[t],
                                  s[t - 1], p);
  }
  return ll;
}

double segment_log_likelihood(const SummerSegment& seg, const StateSequence& s,
                              const ModelParams& p) {
  auto st = stationary_state_distribution(p.a0, p.a1);
  double ll = std::log(s[0] == 1 ? st.pi1 : st.pi0);
  for (std::size_t t = 1; t < seg.size(); ++t)
    ll += log_transition_prob(s[t - 1], s[t], p.a0, p.a1);
  double obs = segment_obs_log_likelihood(seg, s, p);
  if (obs == kNegInf) return kNegInf;
  return ll + obs;
}

}  // namespace hw
