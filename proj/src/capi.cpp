#include "pulselab.h"

#include <cstring>
#include <string>

#include "pulselab/common.hpp"
#include "pulselab/lab.hpp"
#include "pulselab/design.hpp"
#include "pulselab/reaction.hpp"

namespace {

thread_local std::string g_last_error = "";

int fail(int code, const char* what) {
  g_last_error = what;
  return code;
}

template <typename F>
int guarded(F&& f) {
  try {
    return f();
  } catch (const pulselab::ConfigError& e) {
    return fail(PLAB_CONFIG_ERROR, e.what());
  } catch (const pulselab::NumericError& e) {
    return fail(PLAB_NUMERIC_ERROR, e.what());
  } catch (const std::exception& e) {
    return fail(PLAB_NUMERIC_ERROR, e.what());
  }
}

}  // namespace

struct plab_reaction {
  pulselab::ReactionPtr r;
};

extern "C" {

const char* plab_last_error(void) { return g_last_error.c_str(); }

int plab_reaction_create(const char* spec_json, plab_reaction** out) {
  if (!spec_json || !out) return fail(PLAB_CONFIG_ERROR, "null argument");
  *out = nullptr;
  return guarded([&] {
    auto r = pulselab::lab::reaction_from_json_text(spec_json);
    *out = new plab_reaction{std::move(r)};
    return PLAB_OK;
  });
}

void plab_reaction_free(plab_reaction* r) { delete r; }

int plab_reaction_dim(const plab_reaction* r) { return r ? r->r->dim() : 0; }

int plab_reaction_num_levels(const plab_reaction* r) {
  return r ? static_cast<int>(r->r->levels().size()) : 0;
}

int plab_reaction_levels(const plab_reaction* r, double* out) {
  if (!r || !out) return fail(PLAB_CONFIG_ERROR, "null argument");
  const auto& lv = r->r->levels();
  std::memcpy(out, lv.data(), lv.size() * sizeof(double));
  return PLAB_OK;
}

int plab_reaction_period(const plab_reaction* r, double* out) {
  if (!r || !out) return fail(PLAB_CONFIG_ERROR, "null argument");
  const auto& p = r->r->period();
  std::memcpy(out, p.data(), p.size() * sizeof(double));
  return PLAB_OK;
}

double plab_reaction_gamma(const plab_reaction* r) { return r ? r->r->gamma() : 0.0; }

double plab_reaction_delta0(const plab_reaction* r) { return r ? r->r->delta0() : 0.0; }

int plab_reaction_value(const plab_reaction* r, const double* x, double u, double* out) {
  if (!r || !x || !out) return fail(PLAB_CONFIG_ERROR, "null argument");
  return guarded([&] {
    *out = r->r->value(x, u);
    return PLAB_OK;
  });
}

int plab_reaction_deriv_u(const plab_reaction* r, const double* x, double u, double* out) {
  if (!r || !x || !out) return fail(PLAB_CONFIG_ERROR, "null argument");
  return guarded([&] {
    *out = r->r->deriv_u(x, u);
    return PLAB_OK;
  });
}

int plab_integral_sign(const plab_reaction* r, double* value, int* sign) {
  if (!r || !value || !sign) return fail(PLAB_CONFIG_ERROR, "null argument");
  return guarded([&] {
    auto res = pulselab::integral_sign(*r->r);
    *value = res.value;
    *sign = res.sign == pulselab::IntegralSign::positive   ? 1
            : res.sign == pulselab::IntegralSign::negative ? -1
                                                           : 0;
    return PLAB_OK;
  });
}

int plab_membership_sl(const double* zeta, const double* period_vector, int dim,
                       int* is_member, double* quantum) {
  if (!zeta || !period_vector || !is_member || dim < 1)
    return fail(PLAB_CONFIG_ERROR, "bad arguments");
  return guarded([&] {
    std::vector<double> z(zeta, zeta + dim), L(period_vector, period_vector + dim);
    auto m = pulselab::membership_SL(z, L);
    *is_member = m.has_value() ? 1 : 0;
    if (quantum) *quantum = m.value_or(0.0);
    return PLAB_OK;
  });
}

int plab_rational_directions(int count, double* out) {
  if (!out || count < 1) return fail(PLAB_CONFIG_ERROR, "bad arguments");
  return guarded([&] {
    auto dirs = pulselab::rational_directions(count);
    for (int i = 0; i < count; ++i) {
      out[2 * i] = dirs[i][0];
      out[2 * i + 1] = dirs[i][1];
    }
    return PLAB_OK;
  });
}

int plab_fg_envelope(const double* dirs, const double* speeds, int n_samples, int dim,
                     const double* queries, int n_queries, double* wstar_out) {
  if (!dirs || !speeds || !queries || !wstar_out || n_samples < 1 || n_queries < 1 ||
      dim < 1)
    return fail(PLAB_CONFIG_ERROR, "bad arguments");
  return guarded([&] {
    std::vector<pulselab::DirectionalSample> samples(n_samples);
    for (int i = 0; i < n_samples; ++i) {
      samples[i].dir.assign(dirs + static_cast<size_t>(i) * dim,
                            dirs + static_cast<size_t>(i + 1) * dim);
      samples[i].speed = speeds[i];
    }
    std::vector<std::vector<double>> qs(n_queries);
    for (int i = 0; i < n_queries; ++i)
      qs[i].assign(queries + static_cast<size_t>(i) * dim,
                   queries + static_cast<size_t>(i + 1) * dim);
    auto w = pulselab::fg_envelope(samples, qs);
    std::memcpy(wstar_out, w.data(), w.size() * sizeof(double));
    return PLAB_OK;
  });
}

int plab_run(const char* subcommand, const char* config_path, const char* out_dir,
             int jobs, unsigned long seed) {
  if (!subcommand || !config_path) return fail(PLAB_CONFIG_ERROR, "null argument");
  return guarded([&] {
    return pulselab::lab::run(subcommand, config_path, out_dir ? out_dir : "", jobs,
                              static_cast<unsigned>(seed));
  });
}

}  // extern "C"
