#include <doctest.h>

#include <cmath>

#include "model.hpp"
#include "oracle_helpers.hpp"
#include "rng.hpp"

using namespace hw;

namespace {

ModelParams reference_params() {
  ModelParams p;
  p.a0 = 0.03;
  p.a1 = 0.75;
  p.u = 34.0;
  p.sigma = 2.0;
  p.xi = -0.2;
  p.mu = 24.0;
  p.sigma_n2 = 9.0;
  p.phi = 0.6;
  p.alpha = 0.6;
  p.alpha01 = 0.7;
  return p;
}

}  // namespace

TEST_CASE("frechet transform definitions") {
  // F = e^-1  ->  z = 1; F = e^-2  ->  z = 0.5.
  double y1 = gpd_quantile(std::exp(-1.0), 30.0, 2.0, 0.1);
  CHECK(frechet_from_gpd(y1, 30.0, 2.0, 0.1) == doctest::Approx(1.0).epsilon(1e-12));
  double y2 = gpd_quantile(std::exp(-2.0), 30.0, 2.0, 0.1);
  CHECK(frechet_from_gpd(y2, 30.0, 2.0, 0.1) == doctest::Approx(0.5).epsilon(1e-12));
  // y = u: F = 0, z = 0 is the valid limit.
  CHECK(frechet_from_gpd(30.0, 30.0, 2.0, 0.1) == 0.0);
  // y = mu: Phi = 1/2, z = 1/log 2.
  CHECK(frechet_from_normal(24.0, 24.0, 9.0) ==
        doctest::Approx(1.4426950408889634074).epsilon(1e-14));
}

TEST_CASE("frechet transforms roundtrip and are monotone") {
  for (double xi : {-0.3, 0.0, 0.25}) {
    double prev = -1.0;
    for (int k = 1; k <= 60; ++k) {
      double p = k / 61.0;
      double y = gpd_quantile(p, 30.0, 2.0, xi);
      double z = frechet_from_gpd(y, 30.0, 2.0, xi);
      CHECK(z > prev);
      prev = z;
      CHECK(std::exp(-1.0 / z) ==
            doctest::Approx(gpd_cdf(y, 30.0, 2.0, xi)).epsilon(1e-12));
    }
  }
  double prev = 0.0;
  for (double y = 10.0; y <= 38.0; y += 0.5) {
    double z = frechet_from_normal(y, 24.0, 9.0);
    CHECK(z > prev);
    prev = z;
    CHECK(std::exp(-1.0 / z) ==
          doctest::Approx(norm_cdf((y - 24.0) / 3.0)).epsilon(1e-12));
  }
}

TEST_CASE("frechet-from-normal is stable deep in the lower tail") {
  // y = mu - 10 sd: z = -1/log Phi(-10), reference from 50-digit arithmetic.
  double z = frechet_from_normal(24.0 - 30.0, 24.0, 9.0);
  CHECK(z == doctest::Approx(0.018785945091734700601).epsilon(1e-13));
  // Far beyond erfc underflow the asymptotic branch keeps z positive.
  double z2 = frechet_from_normal(24.0 - 150.0, 24.0, 9.0);
  CHECK(z2 > 0.0);
  CHECK(std::isfinite(z2));
}

TEST_CASE("logistic bivariate cdf closed forms") {
  CHECK(logistic_bivariate_cdf(1.0, 1.0, 0.5) ==
        doctest::Approx(0.2431167344342142108).epsilon(1e-14));
  // alpha = 1: product of unit-Frechet margins.
  for (double z1 : {0.3, 1.0, 4.0})
    for (double z2 : {0.5, 2.0})
      CHECK(logistic_bivariate_cdf(z1, z2, 1.0) ==
            doctest::Approx(std::exp(-1.0 / z1 - 1.0 / z2)).epsilon(1e-14));
  // alpha -> 0: the min margin, exp(-1/z) at z1 = z2 = z.
  for (double z : {0.5, 1.0, 2.0})
    CHECK(logistic_bivariate_cdf(z, z, 0.001) ==
          doctest::Approx(std::exp(-1.0 / z)).epsilon(2e-3));
}

TEST_CASE("bivariate density matches finite differences of the analytic cdf") {
  Rng rng(2024);
  const int kSets = 25;
  for (int rep = 0; rep < kSets; ++rep) {
    ModelParams p = oracle::random_params(rng);
    const std::pair<int, int> cases[3] = {{1, 1}, {0, 1}, {1, 0}};
    for (auto [s1, s2] : cases) {
      for (double q1 : {0.25, 0.6, 0.9}) {
        for (double q2 : {0.3, 0.7}) {
          auto [lo1, hi1] = oracle::margin_range(s1, p);
          auto [lo2, hi2] = oracle::margin_range(s2, p);
          double y1 = s1 == 1 ? gpd_quantile(q1, p.u, p.sigma, p.xi)
                              : p.mu + norm_quantile(q1) * std::sqrt(p.sigma_n2);
          double y2 = s2 == 1 ? gpd_quantile(q2, p.u, p.sigma, p.xi)
                              : p.mu + norm_quantile(q2) * std::sqrt(p.sigma_n2);
          (void)lo1; (void)hi1; (void)lo2; (void)hi2;
          double f = std::exp(bivariate_log_density(y1, y2, s1, s2, p));
          double fd = oracle::mixed_fd_density(y1, y2, s1, s2, p);
          CHECK(f == doctest::Approx(fd).epsilon(1e-5));
        }
      }
    }
  }
}

TEST_CASE("independence copula factorizes exactly") {
  Rng rng(5);
  for (int rep = 0; rep < 20; ++rep) {
    ModelParams p = oracle::random_params(rng);
    p.alpha = 1.0;
    p.alpha01 = 1.0;
    const std::pair<int, int> cases[3] = {{1, 1}, {0, 1}, {1, 0}};
    for (auto [s1, s2] : cases) {
      double y1 = s1 == 1 ? p.u + 0.7 * p.sigma : p.mu + 1.1;
      double y2 = s2 == 1 ? p.u + 0.4 * p.sigma : p.mu - 0.8;
      double lhs = bivariate_log_density(y1, y2, s1, s2, p);
      double rhs = margin_log_pdf(y1, s1, p) + margin_log_pdf(y2, s2, p);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
  }
}

TEST_CASE("conditional density: AR(1) case") {
  ModelParams p = reference_params();
  p.mu = 20.0;
  p.phi = 0.5;
  // y_prev = 24 -> conditional mean 22, variance sigma_n2.
  double sn = std::sqrt(p.sigma_n2);
  double expected = norm_log_pdf((23.0 - 22.0) / sn) - std::log(sn);
  CHECK(conditional_log_density(23.0, 24.0, 0, 0, p) ==
        doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("conditional density reduces to the margin under independence") {
  ModelParams p = reference_params();
  p.alpha = 1.0;
  double y = p.u + 1.3;
  CHECK(conditional_log_density(y, p.u + 0.5, 1, 1, p) ==
        doctest::Approx(gpd_log_density(y, p.u, p.sigma, p.xi)).epsilon(1e-12));
}

TEST_CASE("all four conditionals integrate to one") {
  Rng rng(99);
  for (int rep = 0; rep < 6; ++rep) {
    ModelParams p = oracle::random_params(rng);
    const std::pair<int, int> cases[4] = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    for (auto [s_prev, s_t] : cases) {
      double y_prev = s_prev == 1 ? gpd_quantile(0.55, p.u, p.sigma, p.xi)
                                  : p.mu + 0.9 * std::sqrt(p.sigma_n2);
      auto dens = [&](double y) {
        double ld = conditional_log_density(y, y_prev, s_t, s_prev, p);
        return ld == kNegInf ? 0.0 : std::exp(ld);
      };
      double mass = oracle::integrate_margin(dens, s_t, p, 1e-8);
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));
    }
  }
}

TEST_CASE("marginalizing the bivariate density recovers the margin") {
  Rng rng(123);
  ModelParams p = oracle::random_params(rng);
  const std::pair<int, int> cases[3] = {{1, 1}, {0, 1}, {1, 0}};
  for (auto [s1, s2] : cases) {
    double y1 = s1 == 1 ? gpd_quantile(0.4, p.u, p.sigma, p.xi) : p.mu + 1.0;
    auto joint = [&](double y2) {
      double ld = bivariate_log_density(y1, y2, s1, s2, p);
      return ld == kNegInf ? 0.0 : std::exp(ld);
    };
    double integral = oracle::integrate_margin(joint, s2, p, 1e-9);
    CHECK(integral ==
          doctest::Approx(std::exp(margin_log_pdf(y1, s1, p))).epsilon(1e-4));
  }
}

TEST_CASE("conditional log cdf matches quadrature of the density") {
  ModelParams p = reference_params();
  const std::pair<int, int> cases[3] = {{1, 1}, {0, 1}, {1, 0}};
  for (auto [s_prev, s_t] : cases) {
    double y_prev = s_prev == 1 ? 35.0 : 26.0;
    double y_to = s_t == 1 ? 36.5 : 27.5;
    auto dens = [&](double y) {
      double ld = conditional_log_density(y, y_prev, s_t, s_prev, p);
      return ld == kNegInf ? 0.0 : std::exp(ld);
    };
    double q_to = std::exp(margin_log_cdf(y_to, s_t, p));
    double mass = oracle::integrate_margin(dens, s_t, p, 1e-9, q_to);
    CHECK(std::exp(conditional_log_cdf(y_to, y_prev, s_t, s_prev, p)) ==
          doctest::Approx(mass).epsilon(1e-6));
  }
}

TEST_CASE("gpd-state support is enforced, never smoothed") {
  ModelParams p = reference_params();
  CHECK(bivariate_log_density(33.9, 35.0, 1, 1, p) == kNegInf);
  CHECK(bivariate_log_density(35.0, 33.9, 1, 1, p) == kNegInf);
  CHECK(conditional_log_density(33.9, 26.0, 1, 0, p) == kNegInf);
}

TEST_CASE("stationary state distribution") {
  auto st = stationary_state_distribution(0.05, 0.8);
  CHECK(st.pi1 == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(st.pi0 == doctest::Approx(0.8).epsilon(1e-15));

  // i.i.d. chain: a0 = a1 = p gives pi1 = p.
  auto iid = stationary_state_distribution(0.37, 0.37);
  CHECK(iid.pi1 == doctest::Approx(0.37).epsilon(1e-15));

  // pi A = pi for random transition probabilities.
  Rng rng(11);
  for (int rep = 0; rep < 1000; ++rep) {
    double a0 = rng.uniform(1e-4, 1.0 - 1e-4);
    double a1 = rng.uniform(1e-4, 1.0 - 1e-4);
    auto s = stationary_state_distribution(a0, a1);
    double p0 = s.pi0 * (1.0 - a0) + s.pi1 * (1.0 - a1);
    double p1 = s.pi0 * a0 + s.pi1 * a1;
    CHECK(p0 == doctest::Approx(s.pi0).epsilon(1e-14));
    CHECK(p1 == doctest::Approx(s.pi1).epsilon(1e-14));
    CHECK(s.pi0 + s.pi1 == doctest::Approx(1.0).epsilon(1e-15));
  }
}

TEST_CASE("segment log likelihood: two-day direct assembly") {
  ModelParams p = reference_params();
  SummerSegment seg;
  seg.year = 2000;
  seg.values = {25.0, 23.0};
  seg.missing = {0, 0};
  StateSequence s = {0, 0};

  auto st = stationary_state_distribution(p.a0, p.a1);
  double sd0 = std::sqrt(p.stationary_var());
  double expected = std::log(st.pi0) + std::log1p(-p.a0) +
                    norm_log_pdf((25.0 - p.mu) / sd0) - std::log(sd0) +
                    conditional_log_density(23.0, 25.0, 0, 0, p);
  CHECK(segment_log_likelihood(seg, s, p) ==
        doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("segment log likelihood: state-1 day below threshold is impossible") {
  ModelParams p = reference_params();
  SummerSegment seg;
  seg.values = {25.0, 33.0, 36.0};
  seg.missing = {0, 0, 0};
  StateSequence s = {0, 1, 1};  // 33 < u = 34
  CHECK(segment_log_likelihood(seg, s, p) == kNegInf);
}

TEST_CASE("segment log likelihood matches an independent per-term evaluation") {
  Rng rng(31);
  ModelParams p = reference_params();
  SummerSegment seg;
  seg.year = 1;
  for (int t = 0; t < 10; ++t) {
    seg.values.push_back(p.mu + 2.5 * rng.normal());
    seg.missing.push_back(0);
  }
  seg.values[4] = p.u + 1.0;
  seg.values[5] = p.u + 2.0;
  StateSequence s = {0, 0, 0, 0, 1, 1, 0, 0, 0, 0};

  // Second implementation of the factorization, assembled term by term.
  auto st = stationary_state_distribution(p.a0, p.a1);
  double expected = std::log(s[0] == 1 ? st.pi1 : st.pi0);
  expected += initial_log_density(seg.values[0], s[0], p);
  for (int t = 1; t < 10; ++t) {
    double a_row[2][2] = {{1.0 - p.a0, p.a0}, {1.0 - p.a1, p.a1}};
    expected += std::log(a_row[s[t - 1]][s[t]]);
    expected +=
        conditional_log_density(seg.values[t], seg.values[t - 1], s[t], s[t - 1], p);
  }
  CHECK(segment_log_likelihood(seg, s, p) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("segment likelihood is consistent under prefix/suffix splitting") {
  Rng rng(77);
  ModelParams p = reference_params();
  SummerSegment seg;
  for (int t = 0; t < 14; ++t) {
    seg.values.push_back(p.mu + 3.0 * rng.normal());
    seg.missing.push_back(0);
  }
  seg.values[7] = p.u + 0.5;
  StateSequence s(14, 0);
  s[7] = 1;

  double full = segment_log_likelihood(seg, s, p);

  const int k = 7;
  SummerSegment prefix;
  prefix.values.assign(seg.values.begin(), seg.values.begin() + k);
  prefix.missing.assign(k, 0);
  StateSequence sp(s.begin(), s.begin() + k);
  double split = segment_log_likelihood(prefix, sp, p);
  for (int t = k; t < 14; ++t) {
    split += log_transition_prob(s[t - 1], s[t], p.a0, p.a1);
    split +=
        conditional_log_density(seg.values[t], seg.values[t - 1], s[t], s[t - 1], p);
  }
  CHECK(full == doctest::Approx(split).epsilon(1e-12));
}

TEST_CASE("params validation catches each bad field") {
  ModelParams good = reference_params();
  CHECK(good.validate().empty());
  auto bad = good; bad.a0 = 0.0;
  CHECK(!bad.validate().empty());
  bad = good; bad.sigma = -1.0;
  CHECK(!bad.validate().empty());
  bad = good; bad.xi = 0.6;
  CHECK(!bad.validate().empty());
  bad = good; bad.alpha = 1.2;
  CHECK(!bad.validate().empty());
  bad = good; bad.phi = 1.0;
  CHECK(!bad.validate().empty());
}
