#include "salem/experiment.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>

#include "salem/bump.hpp"
#include "salem/count_bound.hpp"
#include "salem/error.hpp"
#include "salem/fourier.hpp"
#include "salem/geometry.hpp"
#include "salem/io.hpp"
#include "salem/measures.hpp"
#include "salem/randmap.hpp"

namespace salem {

using Json = nlohmann::ordered_json;

namespace {

// ---- config fields ---------------------------------------------------------

template <class T>
T json_as(const Json& value, std::string_view key) {
  try {
    return value.get<T>();
  } catch (const nlohmann::json::exception&) {
    fail(ErrorKind::parameter, "config field '" + std::string(key) + "' has the wrong type");
  }
}

/// Lists given as "1,2,3" on the command line become JSON arrays.
Json list_from_text(std::string_view text) {
  Json arr = Json::array();
  if (text.empty()) return arr;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find(',', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string item(text.substr(start, end - start));
    try {
      arr.push_back(Json::parse(item));
    } catch (const nlohmann::json::exception&) {
      fail(ErrorKind::parameter, "list element '" + item + "' is not a number");
    }
    start = end + 1;
  }
  return arr;
}

struct Field {
  std::function<Json(const RunConfig&)> get;
  std::function<void(RunConfig&, const Json&)> put;
  bool list = false;
};

template <class T>
Field scalar(T RunConfig::*member) {
  return {[member](const RunConfig& c) { return Json(c.*member); },
          [member](RunConfig& c, const Json& v) { c.*member = json_as<T>(v, "value"); }};
}

template <class T>
Field list(std::vector<T> RunConfig::*member) {
  return {[member](const RunConfig& c) { return Json(c.*member); },
          [member](RunConfig& c, const Json& v) {
            c.*member = v.is_array() ? json_as<std::vector<T>>(v, "value")
                                     : std::vector<T>{json_as<T>(v, "value")};
          },
          true};
}

/// Serialized fields in canonical order.
const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("construction", scalar(&RunConfig::construction));
    t.emplace_back("depth", scalar(&RunConfig::depth));
    t.emplace_back("ifs_ratios", list(&RunConfig::ifs_ratios));
    t.emplace_back("ifs_offsets", list(&RunConfig::ifs_offsets));
    t.emplace_back("ifs_weights", list(&RunConfig::ifs_weights));
    t.emplace_back("fat_c", list(&RunConfig::fat_c));
    t.emplace_back("gap_table", scalar(&RunConfig::gap_table));
    t.emplace_back("measure_file", scalar(&RunConfig::measure_file));
    t.emplace_back("m", scalar(&RunConfig::m));
    t.emplace_back("alpha", scalar(&RunConfig::alpha));
    t.emplace_back("bump", scalar(&RunConfig::bump));
    t.emplace_back("bump_order", scalar(&RunConfig::bump_order));
    t.emplace_back("nu", scalar(&RunConfig::nu));
    t.emplace_back("seed", scalar(&RunConfig::seed));
    t.emplace_back("s", Field{[](const RunConfig& c) { return c.s ? Json(*c.s) : Json(nullptr); },
                              [](RunConfig& c, const Json& v) {
                                if (v.is_null()) {
                                  c.s.reset();
                                } else {
                                  c.s = json_as<double>(v, "s");
                                }
                              }});
    t.emplace_back("j_min", scalar(&RunConfig::j_min));
    t.emplace_back("j_max", scalar(&RunConfig::j_max));
    t.emplace_back("points_per_band", scalar(&RunConfig::points_per_band));
    t.emplace_back("xi_spacing", scalar(&RunConfig::xi_spacing));
    t.emplace_back("q", list(&RunConfig::q));
    t.emplace_back("n_samples", scalar(&RunConfig::n_samples));
    t.emplace_back("modulus_pairs", scalar(&RunConfig::modulus_pairs));
    t.emplace_back("derivative_points", scalar(&RunConfig::derivative_points));
    t.emplace_back("psi_depth", scalar(&RunConfig::psi_depth));
    t.emplace_back("psi_x_max_exp", scalar(&RunConfig::psi_x_max_exp));
    t.emplace_back("psi_margin", scalar(&RunConfig::psi_margin));
    t.emplace_back("psi_mode", scalar(&RunConfig::psi_mode));
    return t;
  }();
  return table;
}

const Field* find_field(std::string_view key) {
  for (const auto& [name, field] : fields()) {
    if (name == key) return &field;
  }
  return nullptr;
}

void put_field(RunConfig& config, std::string_view key, const Json& value) {
  if (key == "workers") {
    config.workers = json_as<unsigned>(value, key);
    return;
  }
  if (key == "output") {
    config.output = json_as<std::string>(value, key);
    return;
  }
  const Field* field = find_field(key);
  if (field == nullptr) fail(ErrorKind::parameter, "unknown config field '" + std::string(key) + "'");
  try {
    field->put(config, value);
  } catch (const Error&) {
    fail(ErrorKind::parameter, "config field '" + std::string(key) + "' has the wrong type");
  }
}

}  // namespace

void RunConfig::validate() const {
  auto bad = [](const std::string& what) { fail(ErrorKind::parameter, what); };
  if (construction != "ifs" && construction != "fat-cantor" && construction != "gap-table") {
    bad("construction must be ifs, fat-cantor or gap-table, got '" + construction + "'");
  }
  if (construction == "gap-table" && gap_table.empty()) bad("gap-table construction needs gap_table");
  if (construction != "gap-table" && (depth < 1 || depth > 24)) bad("depth must be in [1, 24]");
  if (construction == "ifs") {
    if (ifs_ratios.empty() || ifs_ratios.size() != ifs_offsets.size()) {
      bad("ifs_ratios and ifs_offsets must be non-empty and of equal length");
    }
    if (!ifs_weights.empty() && ifs_weights.size() != ifs_ratios.size()) {
      bad("ifs_weights must be empty or match ifs_ratios");
    }
  }
  if (construction == "fat-cantor" && !fat_c.empty() && fat_c.size() < static_cast<std::size_t>(depth)) {
    bad("fat_c must list at least `depth` values");
  }
  if (m < 1) bad("m must be >= 1");
  if (!(alpha >= 0.0 && alpha <= 1.0)) bad("alpha must be in [0, 1]");
  if (bump != "smoothstep" && bump != "exponential") bad("bump must be smoothstep or exponential");
  if (bump_order < 0 || bump_order > 10) bad("bump_order must be in [0, 10]");
  parse_width_law(nu);
  if (s && !(*s > 0.0 && *s <= 1.0)) bad("s must be in (0, 1]");
  if (j_min < 0 || j_max < j_min || j_max > 40) bad("need 0 <= j_min <= j_max <= 40");
  if (points_per_band < 0) bad("points_per_band must be >= 0");
  if (points_per_band == 0 && !(xi_spacing > 0.0)) bad("xi_spacing must be positive");
  if (q.empty()) bad("q must list at least one moment order");
  for (int v : q) {
    if (v < 1 || v > 8) bad("moment orders must be in [1, 8]");
  }
  if (n_samples < 2) bad("n_samples must be >= 2");
  if (modulus_pairs < 1) bad("modulus_pairs must be >= 1");
  if (derivative_points < 1) bad("derivative_points must be >= 1");
  if (psi_depth < 0) bad("psi_depth must be >= 0");
  if (psi_x_max_exp < 0 || psi_x_max_exp > 60) bad("psi_x_max_exp must be in [0, 60]");
  if (!(psi_margin >= 0.0)) bad("psi_margin must be >= 0");
  if (psi_mode != "auto" && psi_mode != "schedule" && psi_mode != "raw") {
    bad("psi_mode must be auto, schedule or raw");
  }
  if (workers < 1) bad("workers must be >= 1");
}

std::string RunConfig::to_json() const {
  Json j = Json::object();
  for (const auto& [name, field] : fields()) j[name] = field.get(*this);
  return j.dump(2) + "\n";
}

std::string RunConfig::hash() const { return sha256_hex(to_json()); }

void RunConfig::merge_json(std::string_view json_text) {
  Json parsed;
  try {
    parsed = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::parse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!parsed.is_object()) fail(ErrorKind::parse, "config must be a JSON object");
  for (const auto& [key, value] : parsed.items()) put_field(*this, key, value);
}

void RunConfig::set(std::string_view key, std::string_view value) {
  const Field* field = find_field(key);
  const bool text_field = key == "output" || (field != nullptr && field->get(RunConfig{}).is_string());
  if (text_field) {
    put_field(*this, key, Json(std::string(value)));
    return;
  }
  Json parsed;
  try {
    parsed = Json::parse(value);
  } catch (const nlohmann::json::exception&) {
    if (field != nullptr && field->list) {
      parsed = list_from_text(value);
    } else {
      parsed = std::string(value);
    }
  }
  put_field(*this, key, parsed);
}

const std::vector<std::string>& RunConfig::keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, field] : fields()) out.push_back(name);
    return out;
  }();
  return names;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"build", "sample", "push", "spectrum", "dim",
                                              "verify-psi", "modulus", "moments", "pipeline"};
  return names;
}

std::string resolve_output_dir(const RunConfig& config) {
  if (!config.output.empty()) return config.output;
  const char* root = std::getenv("SALEMLAB_OUTPUT_ROOT");
  const std::filesystem::path base = (root != nullptr && *root != '\0') ? root : "salemlab-runs";
  return (base / config.hash().substr(0, 12)).string();
}

namespace {

// ---- pipeline state --------------------------------------------------------

struct PropertyFailure {
  std::string stage;
  std::string what;
};

class Run {
 public:
  Run(const RunConfig& config, std::string dir)
      : config_(config), dir_(std::move(dir)), hash_(config.hash()) {}

  const std::string& dir() const { return dir_; }
  Json& artifacts() { return artifacts_; }
  std::vector<PropertyFailure>& failures() { return failures_; }

  void write(const std::string& name, const std::string& contents) {
    write_file((std::filesystem::path(dir_) / name).string(), contents);
    artifacts_[name] = sha256_hex(contents);
  }
  void write_json(const std::string& name, Json body) {
    Json doc = Json::object();
    doc["config_hash"] = hash_;
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(name, doc.dump(2) + "\n");
  }
  HeaderFields header() const { return {{"config_hash", hash_}}; }

  // Stages; each returns the JSON summary it wrote.
  Json build();
  Json sample();
  Json push();
  Json spectrum();
  Json dim();
  Json verify_psi();
  Json modulus();
  Json moments();

  double s() const;
  double target() const { return s() / (config_.m + config_.alpha); }

 private:
  void ensure_built();
  void ensure_sample();
  void ensure_spectra();
  BumpFunction bump() const;
  std::vector<double> xi_grid() const;

  const RunConfig& config_;
  std::string dir_;
  std::string hash_;
  Json artifacts_ = Json::object();
  std::vector<PropertyFailure> failures_;

  std::shared_ptr<const GapSet> gaps_;
  std::shared_ptr<const PerturbationSchedule> schedule_;
  DiscreteMeasure measure_;
  std::vector<std::vector<Interval>> pieces_;
  std::optional<FatCantorSpec> fat_;
  std::optional<AffineIFSSpec> ifs_;
  std::optional<RandomMapSample> sample_;
  std::optional<Spectrum> pushed_spectrum_;
  std::optional<Spectrum> base_spectrum_;
};

Json interval_json(const Interval& i) { return Json::array({i.lo, i.hi}); }

Json fit_json(const DecayFit& fit) {
  Json bands = Json::array();
  for (const BandMax& b : fit.bands) {
    bands.push_back({{"j", b.j}, {"max_abs", b.max_abs}, {"argmax", b.argmax}, {"points", b.points}});
  }
  return {{"s_hat", fit.s_hat},      {"s_raw", fit.s_raw},          {"slope", fit.slope},
          {"intercept", fit.intercept}, {"residual", fit.residual}, {"xi_max_valid", fit.xi_max_valid},
          {"bands", bands}};
}

void Run::ensure_built() {
  if (gaps_) return;
  Construction built;
  if (config_.construction == "ifs") {
    AffineIFSSpec spec;
    for (std::size_t i = 0; i < config_.ifs_ratios.size(); ++i) {
      spec.maps.push_back({config_.ifs_ratios[i], config_.ifs_offsets[i]});
    }
    spec.weights = config_.ifs_weights;
    spec.depth = config_.depth;
    built = build_ifs(spec);
    ifs_ = spec;
  } else if (config_.construction == "fat-cantor") {
    FatCantorSpec spec = FatCantorSpec::with_default_sequence(config_.depth);
    if (!config_.fat_c.empty()) {
      const std::vector<double> c = config_.fat_c;
      spec.c = [c](int k) { return c.at(static_cast<std::size_t>(k - 1)); };
    }
    built = build_fat_cantor(spec);
    fat_ = spec;
  } else {
    built.gaps = parse_gap_table(read_file(config_.gap_table));
    built.measure = config_.measure_file.empty() ? component_measure(built.gaps)
                                                 : parse_measure(read_file(config_.measure_file));
  }
  gaps_ = std::make_shared<const GapSet>(std::move(built.gaps));
  measure_ = std::move(built.measure);
  pieces_ = std::move(built.pieces);
  schedule_ = std::make_shared<const PerturbationSchedule>(
      build_schedule(*gaps_, config_.m, config_.alpha));
}

double Run::s() const {
  if (config_.s) return *config_.s;
  if (ifs_) return similarity_dimension(*ifs_);
  if (fat_) return 1.0;
  fail(ErrorKind::parameter, "gap-table construction needs an explicit s");
}

BumpFunction Run::bump() const {
  const int order = config_.bump_order > 0 ? config_.bump_order : config_.m + 1;
  return config_.bump == "exponential" ? BumpFunction::exponential(order)
                                       : BumpFunction::smoothstep(order);
}

void Run::ensure_sample() {
  ensure_built();
  if (sample_) return;
  sample_ = RandomMapSample::draw(gaps_, schedule_, parse_width_law(config_.nu), config_.seed, bump());
}

std::vector<double> Run::xi_grid() const {
  const double cap = frequency_window(measure_.resolution());
  return config_.points_per_band > 0
             ? dyadic_grid(config_.j_min, config_.j_max, config_.points_per_band, cap)
             : dyadic_grid_spacing(config_.j_min, config_.j_max, config_.xi_spacing, cap);
}

void Run::ensure_spectra() {
  ensure_sample();
  if (pushed_spectrum_) return;
  const std::vector<double> xi = xi_grid();
  base_spectrum_ = transform(measure_, xi, config_.workers);
  pushed_spectrum_ = spectrum_of_pushforward(measure_, *sample_, xi, config_.workers);
}

Json Run::build() {
  ensure_built();
  write("gaps.csv", gap_table_csv(*gaps_, header()));
  write("measure.csv", measure_csv(measure_, header()));
  Json summary = {{"construction", config_.construction},
                  {"hull", interval_json(gaps_->hull())},
                  {"gap_count", gaps_->size()},
                  {"delta_sum", schedule_->total},
                  {"atoms", measure_.size()},
                  {"resolution", measure_.resolution()}};
  if (ifs_) summary["similarity_dimension"] = similarity_dimension(*ifs_);
  if (fat_) {
    const FatCantorDiagnostics d = fat_cantor_diagnostics(*fat_);
    summary["lebesgue_mass"] = d.product;
    summary["log_gap_ratio"] = d.log_gap_ratio;
  }
  if (config_.s || ifs_ || fat_) {
    const FrostmanResult fr = frostman_check(measure_, s());
    summary["frostman"] = {{"s", s()},
                           {"constant", fr.constant},
                           {"witness", interval_json(fr.witness)},
                           {"resolution_limited", fr.resolution_limited}};
  }
  write_json("summary.json", summary);
  return summary;
}

Json Run::sample() {
  ensure_sample();
  const RandomMapSample& f = *sample_;

  // f' >= 1 on a uniform grid over the hull.
  const Interval hull = gaps_->hull();
  const std::size_t n = config_.derivative_points;
  double min_derivative = std::numeric_limits<double>::infinity();
  double min_at = hull.lo;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = hull.lo + hull.length() * (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double d = f.derivative(x, 1);
    if (d < min_derivative) {
      min_derivative = d;
      min_at = x;
    }
  }
  const bool monotone = min_derivative >= 1.0 - 1e-12;

  // Extended and restricted maps agree on E.
  double endpoint_gap = std::abs(f.eval(hull.lo) - f.eval_restricted(hull.lo));
  endpoint_gap = std::max(endpoint_gap, std::abs(f.eval(hull.hi) - f.eval_restricted(hull.hi)));
  for (const Gap& g : gaps_->gaps()) {
    for (const double x : {g.span.lo, g.span.hi}) {
      endpoint_gap = std::max(endpoint_gap, std::abs(f.eval(x) - f.eval_restricted(x)));
    }
  }
  const bool endpoints = endpoint_gap <= 1e-12;

  if (!monotone) failures_.push_back({"sample", "f' < 1 somewhere on the grid"});
  if (!endpoints) failures_.push_back({"sample", "extended and restricted maps disagree on E"});
  // ω itself is not stored: (seed, ν, gap table) regenerates it exactly.
  Json summary = {{"seed", config_.seed},
                  {"nu", std::string(to_string(f.law()))},
                  {"bump", config_.bump},
                  {"bump_order", bump().order()},
                  {"gap_table_sha256", sha256_hex(gap_table_csv(*gaps_, {}))},
                  {"total_width", f.total_width()},
                  {"delta_sum", schedule_->total},
                  {"min_derivative", min_derivative},
                  {"min_derivative_at", min_at},
                  {"derivative_points", n},
                  {"monotone", monotone},
                  {"max_endpoint_difference", endpoint_gap},
                  {"endpoints_agree", endpoints}};
  write_json("sample.json", summary);
  return summary;
}

Json Run::push() {
  ensure_sample();
  const RandomMapSample& f = *sample_;
  const DiscreteMeasure pushed = pushforward(measure_, [&f](double x) { return f.eval(x); });
  write("pushed.csv", measure_csv(pushed, header()));
  return {{"atoms", pushed.size()}, {"resolution", pushed.resolution()}};
}

Json Run::spectrum() {
  ensure_spectra();
  write("spectrum.csv", spectrum_csv(*pushed_spectrum_, header()));
  write("spectrum_base.csv", spectrum_csv(*base_spectrum_, header()));
  return {{"frequencies", pushed_spectrum_->size()},
          {"xi_max_valid", pushed_spectrum_->xi_max_valid},
          {"xi_max_valid_base", base_spectrum_->xi_max_valid}};
}

Json Run::dim() {
  ensure_spectra();
  const DecayFit pushed = estimate_fourier_dim(*pushed_spectrum_, config_.j_min, config_.j_max);
  const DecayFit base = estimate_fourier_dim(*base_spectrum_, config_.j_min, config_.j_max);
  Json summary = {{"s_hat", pushed.s_hat},
                  {"s_hat_base", base.s_hat},
                  {"target", target()},
                  {"pushed", fit_json(pushed)},
                  {"base", fit_json(base)}};
  write_json("fit.json", summary);
  return summary;
}

Json Run::verify_psi() {
  ensure_built();
  const bool raw = config_.psi_mode == "raw" || (config_.psi_mode == "auto" && fat_.has_value());
  CountBoundOptions options;
  options.mode = raw ? CountMode::raw : CountMode::schedule;
  options.s = (raw ? s() : target()) - config_.psi_margin;
  double x_floor = 1.0;
  if (fat_) {
    const FatCantorSpec spec = *fat_;
    options.theta = [spec](double x) { return fat_cantor_theta(spec, x); };
    x_floor = 1.0 / (1.0 - 2.0 * spec.c(1));
  }

  std::vector<Interval> j_grid;
  if (!pieces_.empty()) {
    const std::size_t levels = std::min(pieces_.size(), static_cast<std::size_t>(config_.psi_depth) + 1);
    for (std::size_t k = 0; k < levels; ++k) {
      j_grid.insert(j_grid.end(), pieces_[k].begin(), pieces_[k].end());
    }
  } else {
    const Interval hull = gaps_->hull();
    for (int k = 0; k <= config_.psi_depth; ++k) {
      const std::size_t parts = std::size_t{1} << k;
      for (std::size_t i = 0; i < parts; ++i) {
        const double a = hull.lo + hull.length() * static_cast<double>(i) / static_cast<double>(parts);
        const double b = hull.lo + hull.length() * static_cast<double>(i + 1) / static_cast<double>(parts);
        j_grid.push_back({a, b});
      }
    }
  }
  std::vector<double> x_grid;
  for (double x : geometric_x_grid(1.0, config_.psi_x_max_exp + 1)) {
    if (x >= x_floor) x_grid.push_back(x);
  }
  if (x_grid.empty()) fail(ErrorKind::insufficient_data, "x grid is empty above the θ threshold");

  const CountBoundReport report =
      verify_count_bound(*gaps_, schedule_.get(), measure_, j_grid, x_grid, options);

  std::string points = "# salemlab count bound\n# config_hash," + hash_ +
                       "\njlo,jhi,x,log_mass,abscissa,count,slack\n";
  Json violations = Json::array();
  for (const CountBoundPoint& p : report.violations) {
    violations.push_back({{"j", interval_json(p.j)}, {"x", p.x}, {"count", p.count}, {"slack", p.slack}});
  }
  Json tight = Json::array();
  for (const CountBoundPoint& p : report.tight) {
    tight.push_back({{"j", interval_json(p.j)}, {"x", p.x}, {"count", p.count}, {"abscissa", p.abscissa}});
  }
  if (!report.feasible) failures_.push_back({"verify-psi", "no feasible count bound with b > 0"});
  Json summary = {{"mode", raw ? "raw" : "schedule"},
                  {"exponent", options.s},
                  {"theta", fat_.has_value()},
                  {"a", report.a},
                  {"b", report.b},
                  {"frontier", report.frontier},
                  {"feasible", report.feasible},
                  {"degenerate", report.degenerate},
                  {"evaluated", report.evaluated},
                  {"skipped", report.skipped.size()},
                  {"violation_count", report.violations.size()},
                  {"violations", violations},
                  {"tight", tight}};
  write_json("psi.json", summary);
  return summary;
}

Json Run::modulus() {
  ensure_sample();
  const ModulusReport r = modulus_check(*sample_, config_.modulus_pairs, config_.seed);
  if (!r.pass) failures_.push_back({"modulus", "modulus of continuity bound exceeded"});
  Json summary = {{"status", r.pass ? "PASS" : "FAIL"},
                  {"max_ratio", r.max_ratio},
                  {"bound", r.bound},
                  {"worst_x", r.worst_x},
                  {"worst_y", r.worst_y},
                  {"pairs", r.pairs}};
  write_json("modulus.json", summary);
  return summary;
}

Json Run::moments() {
  ensure_built();
  MomentScanConfig mc;
  mc.q = config_.q;
  for (int j = config_.j_min; j <= config_.j_max; ++j) mc.xi.push_back(std::ldexp(1.0, j));
  mc.n_samples = config_.n_samples;
  mc.seed = config_.seed;
  mc.law = parse_width_law(config_.nu);
  mc.workers = config_.workers;
  const MomentScan scan = moment_scan(gaps_, schedule_, measure_, bump(), mc);
  write("moments.csv", moments_csv(scan, header()));
  const double s_prime = target();
  Json slopes = Json::array();
  for (const MomentSlope& sl : scan.slopes) {
    slopes.push_back({{"q", sl.q},
                      {"slope", sl.slope},
                      {"intercept", sl.intercept},
                      {"reference_slope", -(s_prime * sl.q - 1.0)},
                      {"points", sl.points}});
  }
  Json summary = {{"n_samples", config_.n_samples}, {"slopes", slopes}};
  write_json("moments.json", summary);
  return summary;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parameter:
    case ErrorKind::construction:
    case ErrorKind::io:
    case ErrorKind::parse:
      return kExitConfigError;
    default:
      return kExitPropertyFailure;
  }
}

using Stage = Json (Run::*)();

const std::map<std::string, Stage, std::less<>>& stage_table() {
  static const std::map<std::string, Stage, std::less<>> table{
      {"build", &Run::build},           {"sample", &Run::sample},   {"push", &Run::push},
      {"spectrum", &Run::spectrum},     {"dim", &Run::dim},         {"verify-psi", &Run::verify_psi},
      {"modulus", &Run::modulus},       {"moments", &Run::moments}};
  return table;
}

std::vector<std::string> stages_for(std::string_view command) {
  if (command == "build") return {"build"};
  if (command == "sample") return {"build", "sample"};
  if (command == "push") return {"build", "sample", "push"};
  if (command == "spectrum") return {"build", "sample", "spectrum"};
  if (command == "dim") return {"build", "sample", "spectrum", "dim"};
  if (command == "verify-psi") return {"build", "verify-psi"};
  if (command == "modulus") return {"build", "sample", "modulus"};
  if (command == "moments") return {"build", "moments"};
  return {"build", "sample", "push", "spectrum", "dim", "verify-psi", "modulus", "moments"};
}

Json value_or_null(const Json& obj, const char* key) {
  return obj.is_object() && obj.contains(key) ? obj[key] : Json(nullptr);
}

}  // namespace

CommandResult run_command(const RunConfig& config, std::string_view command) {
  CommandResult result;
  const auto& names = command_names();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    result.exit_code = kExitConfigError;
    result.message = "unknown command '" + std::string(command) + "'";
    return result;
  }
  try {
    config.validate();
    result.output_dir = resolve_output_dir(config);
    std::error_code ec;
    std::filesystem::create_directories(result.output_dir, ec);
    if (ec) fail(ErrorKind::io, "cannot create '" + result.output_dir + "': " + ec.message());
  } catch (const Error& e) {
    result.exit_code = kExitConfigError;
    result.message = e.what();
    return result;
  }

  Run run(config, result.output_dir);
  Json outputs = Json::object();
  std::string failed_stage;
  std::string error;
  try {
    run.write("config.json", config.to_json());
    for (const std::string& stage : stages_for(command)) {
      failed_stage = stage;
      outputs[stage] = (run.*stage_table().at(stage))();
    }
    failed_stage.clear();
  } catch (const Error& e) {
    error = e.what();
    result.exit_code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    error = e.what();
    result.exit_code = kExitPropertyFailure;
  }

  if (error.empty() && !run.failures().empty()) {
    result.exit_code = kExitPropertyFailure;
    for (const PropertyFailure& f : run.failures()) {
      if (!result.message.empty()) result.message += "; ";
      result.message += f.stage + ": " + f.what;
    }
  }
  if (!error.empty()) result.message = failed_stage + ": " + error;

  if (command == "pipeline") {
    try {
      Json report = Json::object();
      report["construction"] = config.construction;
      report["seed"] = config.seed;
      report["m"] = config.m;
      report["alpha"] = config.alpha;
      try {
        report["s"] = run.s();
        report["target"] = run.target();
      } catch (const Error&) {
        report["s"] = nullptr;
        report["target"] = nullptr;
      }
      const Json dim = value_or_null(outputs, "dim");
      report["s_hat"] = value_or_null(dim, "s_hat");
      report["s_hat_base"] = value_or_null(dim, "s_hat_base");
      const Json psi = value_or_null(outputs, "verify-psi");
      report["psi_fit"] = psi.is_null() ? Json(nullptr)
                                        : Json{{"a", psi["a"]},
                                               {"b", psi["b"]},
                                               {"feasible", psi["feasible"]},
                                               {"violations", psi["violation_count"]},
                                               {"exponent", psi["exponent"]},
                                               {"mode", psi["mode"]}};
      report["modulus"] = value_or_null(value_or_null(outputs, "modulus"), "status");
      const Json sample = value_or_null(outputs, "sample");
      report["monotone"] = value_or_null(sample, "monotone");
      report["endpoints_agree"] = value_or_null(sample, "endpoints_agree");
      const Json moments = value_or_null(outputs, "moments");
      report["moment_slopes"] = value_or_null(moments, "slopes");
      report["stages"] = Json::array();
      for (const auto& [stage, body] : outputs.items()) report["stages"].push_back(stage);
      report["failed_stage"] = error.empty() ? Json(nullptr) : Json(failed_stage);
      report["error"] = error.empty() ? Json(nullptr) : Json(error);
      Json failures = Json::array();
      for (const PropertyFailure& f : run.failures()) failures.push_back(f.stage + ": " + f.what);
      report["property_failures"] = failures;
      report["pass"] = result.exit_code == kExitPass;
      report["artifacts"] = run.artifacts();
      run.write_json("report.json", report);
    } catch (const Error& e) {
      result.exit_code = kExitConfigError;
      result.message = std::string("report: ") + e.what();
    }
  }
  return result;
}

}  // namespace salem
