#include "salem_c.h"

#include <cstring>
#include <memory>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "salem/error.hpp"
#include "salem/experiment.hpp"
#include "salem/fourier.hpp"
#include "salem/geometry.hpp"
#include "salem/io.hpp"
#include "salem/measures.hpp"
#include "salem/randmap.hpp"

struct salem_gapset {
  std::shared_ptr<const salem::GapSet> value;
};
struct salem_schedule {
  std::shared_ptr<const salem::PerturbationSchedule> value;
};
struct salem_measure {
  salem::DiscreteMeasure value;
};
struct salem_sample {
  salem::RandomMapSample value;
};
struct salem_spectrum {
  salem::Spectrum value;
};
struct salem_config {
  salem::RunConfig value;
};

namespace {

thread_local std::string last_error;

salem_status status_for(salem::ErrorKind kind) {
  using salem::ErrorKind;
  switch (kind) {
    case ErrorKind::domain: return SALEM_ERR_DOMAIN;
    case ErrorKind::parameter: return SALEM_ERR_PARAMETER;
    case ErrorKind::construction: return SALEM_ERR_CONSTRUCTION;
    case ErrorKind::no_intersection: return SALEM_ERR_NO_INTERSECTION;
    case ErrorKind::map_not_increasing: return SALEM_ERR_MAP_NOT_INCREASING;
    case ErrorKind::insufficient_data: return SALEM_ERR_INSUFFICIENT_DATA;
    case ErrorKind::io: return SALEM_ERR_IO;
    case ErrorKind::parse: return SALEM_ERR_PARSE;
  }
  return SALEM_ERR_INTERNAL;
}

salem_status set_error(salem_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

/// Runs `body`, translating exceptions into status codes.
template <class F>
salem_status guarded(F&& body) {
  try {
    body();
    return SALEM_OK;
  } catch (const salem::Error& e) {
    return set_error(status_for(e.kind()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(SALEM_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(SALEM_ERR_INTERNAL, e.what());
  }
}

#define SALEM_REQUIRE(ptr)                                                        \
  do {                                                                            \
    if ((ptr) == nullptr) return set_error(SALEM_ERR_NULL_ARGUMENT, #ptr " is NULL"); \
  } while (0)

salem_status index_error(std::size_t index, std::size_t size) {
  return set_error(SALEM_ERR_DOMAIN,
                   "index " + std::to_string(index) + " out of range (size " + std::to_string(size) + ")");
}

void copy_text(const std::string& text, char* buffer, std::size_t capacity) {
  if (buffer == nullptr || capacity == 0) return;
  const std::size_t n = std::min(text.size(), capacity - 1);
  std::memcpy(buffer, text.data(), n);
  buffer[n] = '\0';
}

}  // namespace

extern "C" {

const char* salem_version(void) { return "0.1.0"; }

const char* salem_last_error(void) { return last_error.c_str(); }

const char* salem_status_name(salem_status status) {
  switch (status) {
    case SALEM_OK: return "ok";
    case SALEM_ERR_DOMAIN: return "domain";
    case SALEM_ERR_PARAMETER: return "parameter";
    case SALEM_ERR_CONSTRUCTION: return "construction";
    case SALEM_ERR_NO_INTERSECTION: return "no_intersection";
    case SALEM_ERR_MAP_NOT_INCREASING: return "map_not_increasing";
    case SALEM_ERR_INSUFFICIENT_DATA: return "insufficient_data";
    case SALEM_ERR_IO: return "io";
    case SALEM_ERR_PARSE: return "parse";
    case SALEM_ERR_NULL_ARGUMENT: return "null_argument";
    case SALEM_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

salem_status salem_delta_of(double t, double alpha, double* out) {
  SALEM_REQUIRE(out);
  return guarded([&] { *out = salem::delta_of(t, alpha); });
}

salem_status salem_gapset_create(double hull_lo, double hull_hi, const double* lo, const double* hi,
                                 const int* generations, size_t n, salem_gapset** out) {
  SALEM_REQUIRE(out);
  if (n > 0) {
    SALEM_REQUIRE(lo);
    SALEM_REQUIRE(hi);
  }
  return guarded([&] {
    std::vector<salem::Gap> gaps(n);
    for (size_t i = 0; i < n; ++i) {
      gaps[i].span = {lo[i], hi[i]};
      if (generations != nullptr) gaps[i].generation = generations[i];
    }
    auto set = std::make_shared<const salem::GapSet>(salem::Interval{hull_lo, hull_hi}, std::move(gaps));
    *out = new salem_gapset{std::move(set)};
  });
}

salem_status salem_gapset_read(const char* path, salem_gapset** out) {
  SALEM_REQUIRE(path);
  SALEM_REQUIRE(out);
  return guarded([&] {
    *out = new salem_gapset{
        std::make_shared<const salem::GapSet>(salem::parse_gap_table(salem::read_file(path)))};
  });
}

salem_status salem_gapset_write(const salem_gapset* gaps, const char* path) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(path);
  return guarded([&] { salem::write_file(path, salem::gap_table_csv(*gaps->value)); });
}

salem_status salem_gapset_size(const salem_gapset* gaps, size_t* out) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(out);
  *out = gaps->value->size();
  return SALEM_OK;
}

salem_status salem_gapset_hull(const salem_gapset* gaps, double* lo, double* hi) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(lo);
  SALEM_REQUIRE(hi);
  *lo = gaps->value->hull().lo;
  *hi = gaps->value->hull().hi;
  return SALEM_OK;
}

salem_status salem_gapset_get(const salem_gapset* gaps, size_t index, double* lo, double* hi,
                              int* generation) {
  SALEM_REQUIRE(gaps);
  if (index >= gaps->value->size()) return index_error(index, gaps->value->size());
  const salem::Gap& g = (*gaps->value)[index];
  if (lo != nullptr) *lo = g.span.lo;
  if (hi != nullptr) *hi = g.span.hi;
  if (generation != nullptr) *generation = g.generation.value_or(-1);
  return SALEM_OK;
}

void salem_gapset_free(salem_gapset* gaps) { delete gaps; }

salem_status salem_schedule_build(const salem_gapset* gaps, int m, double alpha,
                                  salem_schedule** out) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(out);
  return guarded([&] {
    *out = new salem_schedule{std::make_shared<const salem::PerturbationSchedule>(
        salem::build_schedule(*gaps->value, m, alpha))};
  });
}

salem_status salem_schedule_delta(const salem_schedule* schedule, size_t index, double* out) {
  SALEM_REQUIRE(schedule);
  SALEM_REQUIRE(out);
  if (index >= schedule->value->size()) return index_error(index, schedule->value->size());
  *out = schedule->value->delta[index];
  return SALEM_OK;
}

salem_status salem_schedule_total(const salem_schedule* schedule, double* out) {
  SALEM_REQUIRE(schedule);
  SALEM_REQUIRE(out);
  *out = schedule->value->total;
  return SALEM_OK;
}

void salem_schedule_free(salem_schedule* schedule) { delete schedule; }

salem_status salem_psi(const salem_gapset* gaps, const salem_schedule* schedule, double j_lo,
                       double j_hi, double x, size_t* out) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(schedule);
  SALEM_REQUIRE(out);
  return guarded([&] { *out = salem::psi(*gaps->value, *schedule->value, {j_lo, j_hi}, x); });
}

salem_status salem_raw_gap_count(const salem_gapset* gaps, double j_lo, double j_hi, double x,
                                 size_t* out) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(out);
  return guarded([&] { *out = salem::raw_gap_count(*gaps->value, {j_lo, j_hi}, x); });
}

salem_status salem_ifs_build(const double* ratios, const double* offsets, const double* weights,
                             size_t n_maps, int depth, salem_gapset** gaps,
                             salem_measure** measure) {
  SALEM_REQUIRE(ratios);
  SALEM_REQUIRE(offsets);
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(measure);
  return guarded([&] {
    salem::AffineIFSSpec spec;
    for (size_t i = 0; i < n_maps; ++i) spec.maps.push_back({ratios[i], offsets[i]});
    if (weights != nullptr) spec.weights.assign(weights, weights + n_maps);
    spec.depth = depth;
    salem::Construction built = salem::build_ifs(spec);
    auto g = std::make_unique<salem_gapset>(
        salem_gapset{std::make_shared<const salem::GapSet>(std::move(built.gaps))});
    *measure = new salem_measure{std::move(built.measure)};
    *gaps = g.release();
  });
}

salem_status salem_fat_cantor_build(const double* c, int depth, salem_gapset** gaps,
                                    salem_measure** measure) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(measure);
  return guarded([&] {
    salem::FatCantorSpec spec = salem::FatCantorSpec::with_default_sequence(depth);
    if (c != nullptr) {
      if (depth < 1) salem::fail(salem::ErrorKind::parameter, "depth must be >= 1");
      std::vector<double> values(c, c + depth);
      spec.c = [values](int k) { return values.at(static_cast<size_t>(k - 1)); };
    }
    salem::Construction built = salem::build_fat_cantor(spec);
    auto g = std::make_unique<salem_gapset>(
        salem_gapset{std::make_shared<const salem::GapSet>(std::move(built.gaps))});
    *measure = new salem_measure{std::move(built.measure)};
    *gaps = g.release();
  });
}

salem_status salem_measure_create(const double* positions, const double* weights, size_t n,
                                  double resolution, salem_measure** out) {
  SALEM_REQUIRE(out);
  if (n > 0) {
    SALEM_REQUIRE(positions);
    SALEM_REQUIRE(weights);
  }
  return guarded([&] {
    std::vector<salem::Atom> atoms(n);
    for (size_t i = 0; i < n; ++i) atoms[i] = {positions[i], weights[i]};
    *out = new salem_measure{salem::DiscreteMeasure(std::move(atoms), resolution, "c-api")};
  });
}

salem_status salem_measure_read(const char* path, salem_measure** out) {
  SALEM_REQUIRE(path);
  SALEM_REQUIRE(out);
  return guarded(
      [&] { *out = new salem_measure{salem::parse_measure(salem::read_file(path))}; });
}

salem_status salem_measure_write(const salem_measure* measure, const char* path) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(path);
  return guarded([&] { salem::write_file(path, salem::measure_csv(measure->value)); });
}

salem_status salem_measure_size(const salem_measure* measure, size_t* out) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(out);
  *out = measure->value.size();
  return SALEM_OK;
}

salem_status salem_measure_atom(const salem_measure* measure, size_t index, double* position,
                                double* weight) {
  SALEM_REQUIRE(measure);
  if (index >= measure->value.size()) return index_error(index, measure->value.size());
  const salem::Atom& a = measure->value.atoms()[index];
  if (position != nullptr) *position = a.position;
  if (weight != nullptr) *weight = a.weight;
  return SALEM_OK;
}

salem_status salem_measure_resolution(const salem_measure* measure, double* out) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(out);
  *out = measure->value.resolution();
  return SALEM_OK;
}

salem_status salem_measure_mass(const salem_measure* measure, double j_lo, double j_hi,
                                double* out) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(out);
  return guarded([&] { *out = measure->value.mass({j_lo, j_hi}); });
}

salem_status salem_frostman_check(const salem_measure* measure, double s, double* constant,
                                  double* witness_lo, double* witness_hi) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(constant);
  return guarded([&] {
    const salem::FrostmanResult r = salem::frostman_check(measure->value, s);
    *constant = r.constant;
    if (witness_lo != nullptr) *witness_lo = r.witness.lo;
    if (witness_hi != nullptr) *witness_hi = r.witness.hi;
  });
}

salem_status salem_translate_intersect(const salem_measure* mu, const salem_gapset* set,
                                       const double* t_grid, size_t n_t, unsigned workers,
                                       double* t, double* mass, salem_measure** restricted) {
  SALEM_REQUIRE(mu);
  SALEM_REQUIRE(set);
  SALEM_REQUIRE(t);
  return guarded([&] {
    std::vector<double> grid = t_grid != nullptr ? std::vector<double>(t_grid, t_grid + n_t)
                                                 : salem::default_translation_grid(mu->value, *set->value);
    salem::TranslationResult r = salem::translate_intersect(mu->value, *set->value, grid, workers);
    *t = r.t;
    if (mass != nullptr) *mass = r.mass;
    if (restricted != nullptr) *restricted = new salem_measure{std::move(r.restricted)};
  });
}

void salem_measure_free(salem_measure* measure) { delete measure; }

salem_status salem_sample_draw(const salem_gapset* gaps, const salem_schedule* schedule,
                               const char* nu, uint64_t seed, int bump_order, salem_sample** out) {
  SALEM_REQUIRE(gaps);
  SALEM_REQUIRE(schedule);
  SALEM_REQUIRE(out);
  return guarded([&] {
    if (schedule->value->size() != gaps->value->size()) {
      salem::fail(salem::ErrorKind::parameter, "schedule was built for a different gap set");
    }
    const salem::WidthLaw law = salem::parse_width_law(nu != nullptr ? nu : "uniform");
    const int order = bump_order > 0 ? bump_order : schedule->value->m + 1;
    *out = new salem_sample{salem::RandomMapSample::draw(gaps->value, schedule->value, law, seed,
                                                         salem::BumpFunction::smoothstep(order))};
  });
}

salem_status salem_sample_eval(const salem_sample* sample, double x, double* out) {
  SALEM_REQUIRE(sample);
  SALEM_REQUIRE(out);
  return guarded([&] { *out = sample->value.eval(x); });
}

salem_status salem_sample_eval_restricted(const salem_sample* sample, double x, double* out) {
  SALEM_REQUIRE(sample);
  SALEM_REQUIRE(out);
  return guarded([&] { *out = sample->value.eval_restricted(x); });
}

salem_status salem_sample_derivative(const salem_sample* sample, double x, int k, double* out) {
  SALEM_REQUIRE(sample);
  SALEM_REQUIRE(out);
  return guarded([&] { *out = sample->value.derivative(x, k); });
}

salem_status salem_sample_omega(const salem_sample* sample, size_t index, double* out) {
  SALEM_REQUIRE(sample);
  SALEM_REQUIRE(out);
  const auto omega = sample->value.omega();
  if (index >= omega.size()) return index_error(index, omega.size());
  *out = omega[index];
  return SALEM_OK;
}

salem_status salem_modulus_check(const salem_sample* sample, size_t n_pairs, uint64_t seed,
                                 double* max_ratio, double* bound, int* pass) {
  SALEM_REQUIRE(sample);
  return guarded([&] {
    const salem::ModulusReport r = salem::modulus_check(sample->value, n_pairs, seed);
    if (max_ratio != nullptr) *max_ratio = r.max_ratio;
    if (bound != nullptr) *bound = r.bound;
    if (pass != nullptr) *pass = r.pass ? 1 : 0;
  });
}

salem_status salem_pushforward(const salem_measure* measure, const salem_sample* sample,
                               salem_measure** out) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(sample);
  SALEM_REQUIRE(out);
  return guarded([&] {
    const salem::RandomMapSample& f = sample->value;
    *out = new salem_measure{
        salem::pushforward(measure->value, [&f](double x) { return f.eval(x); })};
  });
}

void salem_sample_free(salem_sample* sample) { delete sample; }

salem_status salem_transform(const salem_measure* measure, const double* xi, size_t n,
                             unsigned workers, salem_spectrum** out) {
  SALEM_REQUIRE(measure);
  SALEM_REQUIRE(out);
  if (n > 0) SALEM_REQUIRE(xi);
  return guarded([&] {
    *out = new salem_spectrum{
        salem::transform(measure->value, std::span<const double>(xi, n), workers)};
  });
}

salem_status salem_spectrum_size(const salem_spectrum* spectrum, size_t* out) {
  SALEM_REQUIRE(spectrum);
  SALEM_REQUIRE(out);
  *out = spectrum->value.size();
  return SALEM_OK;
}

salem_status salem_spectrum_get(const salem_spectrum* spectrum, size_t index, double* xi,
                                double* re, double* im) {
  SALEM_REQUIRE(spectrum);
  if (index >= spectrum->value.size()) return index_error(index, spectrum->value.size());
  if (xi != nullptr) *xi = spectrum->value.xi[index];
  if (re != nullptr) *re = spectrum->value.values[index].real();
  if (im != nullptr) *im = spectrum->value.values[index].imag();
  return SALEM_OK;
}

salem_status salem_spectrum_xi_max_valid(const salem_spectrum* spectrum, double* out) {
  SALEM_REQUIRE(spectrum);
  SALEM_REQUIRE(out);
  *out = spectrum->value.xi_max_valid;
  return SALEM_OK;
}

salem_status salem_estimate_fourier_dim(const salem_spectrum* spectrum, int j_min, int j_max,
                                        double* s_hat, double* slope, double* residual) {
  SALEM_REQUIRE(spectrum);
  SALEM_REQUIRE(s_hat);
  return guarded([&] {
    const salem::DecayFit fit = salem::estimate_fourier_dim(spectrum->value, j_min, j_max);
    *s_hat = fit.s_hat;
    if (slope != nullptr) *slope = fit.slope;
    if (residual != nullptr) *residual = fit.residual;
  });
}

void salem_spectrum_free(salem_spectrum* spectrum) { delete spectrum; }

salem_status salem_config_new(salem_config** out) {
  SALEM_REQUIRE(out);
  return guarded([&] { *out = new salem_config{}; });
}

salem_status salem_config_load(salem_config* config, const char* path) {
  SALEM_REQUIRE(config);
  SALEM_REQUIRE(path);
  return guarded([&] {
    salem::RunConfig updated = config->value;
    updated.merge_json(salem::read_file(path));
    config->value = std::move(updated);
  });
}

salem_status salem_config_set(salem_config* config, const char* key, const char* value) {
  SALEM_REQUIRE(config);
  SALEM_REQUIRE(key);
  SALEM_REQUIRE(value);
  return guarded([&] { config->value.set(key, value); });
}

salem_status salem_config_json(const salem_config* config, char* buffer, size_t capacity,
                               size_t* needed) {
  SALEM_REQUIRE(config);
  return guarded([&] {
    const std::string text = config->value.to_json();
    if (needed != nullptr) *needed = text.size();
    copy_text(text, buffer, capacity);
  });
}

size_t salem_config_key_count(void) { return salem::RunConfig::keys().size(); }

const char* salem_config_key(size_t index) {
  const auto& keys = salem::RunConfig::keys();
  return index < keys.size() ? keys[index].c_str() : nullptr;
}

void salem_config_free(salem_config* config) { delete config; }

salem_status salem_run(const salem_config* config, const char* command, int* exit_code,
                       char* dir_buffer, size_t dir_capacity) {
  SALEM_REQUIRE(config);
  SALEM_REQUIRE(command);
  SALEM_REQUIRE(exit_code);
  return guarded([&] {
    const salem::CommandResult r = salem::run_command(config->value, command);
    *exit_code = r.exit_code;
    if (!r.message.empty()) last_error = r.message;
    copy_text(r.output_dir, dir_buffer, dir_capacity);
  });
}

}  // extern "C"
