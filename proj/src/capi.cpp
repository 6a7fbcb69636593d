#include "heatwave/heatwave.h"

#include <cstring>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "csv.hpp"
#include "errors.hpp"
#include "model.hpp"
#include "pipeline.hpp"

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

hw_status run_guarded(const std::function<void()>& body) {
  try {
    body();
    return HW_OK;
  } catch (const hw::ArgumentError& e) {
    set_error(e.what());
    return HW_ERR_ARGUMENT;
  } catch (const hw::IoError& e) {
    set_error(e.what());
    return HW_ERR_IO;
  } catch (const hw::ParseError& e) {
    set_error(e.what());
    return HW_ERR_PARSE;
  } catch (const hw::NumericError& e) {
    set_error(e.what());
    return HW_ERR_NUMERIC;
  } catch (const std::exception& e) {
    set_error(e.what());
    return HW_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return HW_ERR_INTERNAL;
  }
}

hw::ModelParams to_cpp(const hw_params& p) {
  hw::ModelParams out;
  out.a0 = p.a0;
  out.a1 = p.a1;
  out.u = p.u;
  out.sigma = p.sigma;
  out.xi = p.xi;
  out.mu = p.mu;
  out.sigma_n2 = p.sigma_n2;
  out.phi = p.phi;
  out.alpha = p.alpha;
  out.alpha01 = p.alpha01;
  return out;
}

}  // namespace

struct hw_dataset {
  std::vector<hw::SummerSegment> segments;
};

extern "C" {

const char* hw_last_error(void) { return g_last_error.c_str(); }

const char* hw_version(void) { return hw::version(); }

hw_status hw_params_validate(const hw_params* p) {
  if (!p) {
    set_error("null params");
    return HW_ERR_ARGUMENT;
  }
  std::string msg = to_cpp(*p).validate();
  if (!msg.empty()) {
    set_error(msg);
    return HW_ERR_ARGUMENT;
  }
  return HW_OK;
}

double hw_gpd_log_density(double y, double u, double sigma, double xi) {
  return hw::gpd_log_density(y, u, sigma, xi);
}

double hw_frechet_from_gpd(double y, double u, double sigma, double xi) {
  return hw::frechet_from_gpd(y, u, sigma, xi);
}

double hw_frechet_from_normal(double y, double mu, double sigma_n2) {
  return hw::frechet_from_normal(y, mu, sigma_n2);
}

double hw_logistic_bivariate_cdf(double z1, double z2, double alpha) {
  return hw::logistic_bivariate_cdf(z1, z2, alpha);
}

double hw_bivariate_log_density(double y1, double y2, int s1, int s2,
                                const hw_params* p) {
  if (!p) return hw::kNaN;
  return hw::bivariate_log_density(y1, y2, s1, s2, to_cpp(*p));
}

double hw_conditional_log_density(double y_t, double y_prev, int s_t, int s_prev,
                                  const hw_params* p) {
  if (!p) return hw::kNaN;
  return hw::conditional_log_density(y_t, y_prev, s_t, s_prev, to_cpp(*p));
}

double hw_conditional_log_cdf(double y_t, double y_prev, int s_t, int s_prev,
                              const hw_params* p) {
  if (!p) return hw::kNaN;
  return hw::conditional_log_cdf(y_t, y_prev, s_t, s_prev, to_cpp(*p));
}

hw_status hw_stationary_state_distribution(double a0, double a1, double* pi0,
                                           double* pi1) {
  if (!pi0 || !pi1) {
    set_error("null output pointer");
    return HW_ERR_ARGUMENT;
  }
  if (!(a0 > 0.0 && a0 < 1.0 && a1 > 0.0 && a1 < 1.0)) {
    set_error("a0 and a1 must lie in (0,1)");
    return HW_ERR_ARGUMENT;
  }
  auto st = hw::stationary_state_distribution(a0, a1);
  *pi0 = st.pi0;
  *pi1 = st.pi1;
  return HW_OK;
}

hw_status hw_dataset_read_csv(const char* path, hw_dataset** out) {
  if (!path || !out) {
    set_error("null argument");
    return HW_ERR_ARGUMENT;
  }
  return run_guarded([&] {
    auto d = std::make_unique<hw_dataset>();
    d->segments = hw::csv::read_segments(path);
    *out = d.release();
  });
}

hw_status hw_dataset_from_arrays(const int* years, const double* values,
                                 const unsigned char* missing, int n_segments,
                                 int segment_length, hw_dataset** out) {
  if (!years || !values || !out || n_segments <= 0 || segment_length <= 0) {
    set_error("bad dataset arrays");
    return HW_ERR_ARGUMENT;
  }
  auto d = std::make_unique<hw_dataset>();
  d->segments.resize(n_segments);
  for (int i = 0; i < n_segments; ++i) {
    auto& seg = d->segments[i];
    seg.year = years[i];
    seg.values.assign(values + static_cast<std::size_t>(i) * segment_length,
                      values + static_cast<std::size_t>(i + 1) * segment_length);
    if (missing)
      seg.missing.assign(
          missing + static_cast<std::size_t>(i) * segment_length,
          missing + static_cast<std::size_t>(i + 1) * segment_length);
    else
      seg.missing.assign(segment_length, 0);
  }
  *out = d.release();
  return HW_OK;
}

void hw_dataset_free(hw_dataset* d) { delete d; }

int hw_dataset_segment_count(const hw_dataset* d) {
  return d ? static_cast<int>(d->segments.size()) : 0;
}

int hw_dataset_segment_length(const hw_dataset* d, int segment) {
  if (!d || segment < 0 || segment >= static_cast<int>(d->segments.size()))
    return 0;
  return static_cast<int>(d->segments[segment].size());
}

int hw_dataset_segment_year(const hw_dataset* d, int segment) {
  if (!d || segment < 0 || segment >= static_cast<int>(d->segments.size()))
    return 0;
  return d->segments[segment].year;
}

hw_status hw_dataset_copy_segment(const hw_dataset* d, int segment,
                                  double* values, unsigned char* missing) {
  if (!d || segment < 0 || segment >= static_cast<int>(d->segments.size())) {
    set_error("bad segment index");
    return HW_ERR_ARGUMENT;
  }
  const auto& seg = d->segments[segment];
  if (values)
    std::memcpy(values, seg.values.data(), seg.values.size() * sizeof(double));
  if (missing)
    std::memcpy(missing, seg.missing.data(), seg.missing.size());
  return HW_OK;
}

hw_status hw_segment_log_likelihood(const hw_dataset* d, int segment,
                                    const int* states, const hw_params* p,
                                    double* out) {
  if (!d || !states || !p || !out) {
    set_error("null argument");
    return HW_ERR_ARGUMENT;
  }
  if (segment < 0 || segment >= static_cast<int>(d->segments.size())) {
    set_error("bad segment index");
    return HW_ERR_ARGUMENT;
  }
  const auto& seg = d->segments[segment];
  if (seg.missing_count() > 0) {
    set_error("segment has missing values; impute before evaluating");
    return HW_ERR_ARGUMENT;
  }
  hw::StateSequence s(seg.size());
  for (std::size_t t = 0; t < seg.size(); ++t) {
    if (states[t] != 0 && states[t] != 1) {
      set_error("states must be 0 or 1");
      return HW_ERR_ARGUMENT;
    }
    s[t] = static_cast<std::uint8_t>(states[t]);
  }
  return run_guarded(
      [&] { *out = hw::segment_log_likelihood(seg, s, to_cpp(*p)); });
}

hw_status hw_run_preprocess(const char* config_json) {
  if (!config_json) {
    set_error("null config");
    return HW_ERR_ARGUMENT;
  }
  return run_guarded(
      [&] { hw::run_preprocess(hw::parse_run_config(config_json)); });
}

hw_status hw_run_fit(const char* config_json) {
  if (!config_json) {
    set_error("null config");
    return HW_ERR_ARGUMENT;
  }
  return run_guarded([&] { hw::run_fit(hw::parse_run_config(config_json)); });
}

hw_status hw_run_simulate(const char* config_json) {
  if (!config_json) {
    set_error("null config");
    return HW_ERR_ARGUMENT;
  }
  return run_guarded(
      [&] { hw::run_simulate(hw::parse_run_config(config_json)); });
}

hw_status hw_run_diagnose(const char* config_json) {
  if (!config_json) {
    set_error("null config");
    return HW_ERR_ARGUMENT;
  }
  return run_guarded(
      [&] { hw::run_diagnose(hw::parse_run_config(config_json)); });
}

}  // extern "C"
