#include "distributions.hpp"

#include <cmath>

namespace hw {

namespace {
constexpr double kInvSqrt2 = 0.7071067811865475244;
constexpr double kLogSqrt2Pi = 0.9189385332046727418;
}  // namespace

double norm_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double norm_log_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double norm_log_cdf(double x) {
  if (x > 0.0) {
    // log(1 - Phi(-x)), Phi(-x) small or moderate
    return std::log1p(-0.5 * std::erfc(x * kInvSqrt2));
  }
  if (x >= -20.0) {
    return std::log(0.5 * std::erfc(-x * kInvSqrt2));
  }
  // Deep tail: log Phi(x) = -x^2/2 - log(-x) - log sqrt(2 pi) + log(1 + s)
  // with the Mills-ratio series s = sum_{k>=1} (-1)^k (2k-1)!! / x^{2k}.
  double inv2 = 1.0 / (x * x);
  double s = 0.0;
  double dfact = 1.0;
  double pw = 1.0;
  double sign = -1.0;
  for (int k = 1; k <= 6; ++k) {
    dfact *= static_cast<double>(2 * k - 1);
    pw *= inv2;
    s += sign * dfact * pw;
    sign = -sign;
  }
  return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log1p(s);
}

double norm_quantile(double p) {
  // Wichura (1988), algorithm AS241 PPND16.
  if (p <= 0.0) return kNegInf;
  if (p >= 1.0) return -kNegInf;
  double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    double r = 0.180625 - q * q;
    double num = (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                       6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                     1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
                   1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    double den = (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                       3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                     5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
                   4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    double num = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                       2.41780725177450611770e-1) * r + 1.27045825245236838258e+0) * r +
                     3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
                   4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    double den = (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                       1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                     6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
                   2.05319162663775882187e+0) * r + 1.0);
    val = num / den;
  } else {
    r -= 5.0;
    double num = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                       1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                     2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
                   5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    double den = (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                       1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                     1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                   5.99832206555887937690e-1) * r + 1.0);
    val = num / den;
  }
  return (q < 0.0) ? -val : val;
}

bool gpd_in_support(double y, double u, double sigma, double xi) {
  double w = y - u;
  if (w < 0.0) return false;
  if (xi >= -kXiExpLimit) return true;
  return w <= -sigma / xi;
}

double gpd_log_density(double y, double u, double sigma, double xi) {
  double w = y - u;
  if (w < 0.0) return kNegInf;
  if (std::abs(xi) < kXiExpLimit) {
    return -std::log(sigma) - w / sigma;
  }
  double t = 1.0 + xi * w / sigma;
  if (t <= 0.0) return kNegInf;
  return -std::log(sigma) - (1.0 + 1.0 / xi) * std::log1p(xi * w / sigma);
}

double gpd_log_survivor(double y, double u, double sigma, double xi) {
  double w = y - u;
  if (w <= 0.0) return 0.0;
  if (std::abs(xi) < kXiExpLimit) return -w / sigma;
  double t = 1.0 + xi * w / sigma;
  if (t <= 0.0) return kNegInf;
  return -std::log1p(xi * w / sigma) / xi;
}

double gpd_log_cdf(double y, double u, double sigma, double xi) {
  double ls = gpd_log_survivor(y, u, sigma, xi);
  if (ls == kNegInf) return 0.0;       // above upper endpoint: F = 1
  if (ls == 0.0) return kNegInf;       // y <= u: F = 0
  double f = -std::expm1(ls);          // 1 - S, accurate when S near 1
  return std::log(f);
}

double gpd_cdf(double y, double u, double sigma, double xi) {
  double ls = gpd_log_survivor(y, u, sigma, xi);
  if (ls == kNegInf) return 1.0;
  return -std::expm1(ls);
}

double gpd_quantile(double p, double u, double sigma, double xi) {
  if (p <= 0.0) return u;
  double q = 1.0 - p;
  if (std::abs(xi) < kXiExpLimit) return u - sigma * std::log(q);
  return u + sigma / xi * (std::pow(q, -xi) - 1.0);
}

}  // namespace hw
