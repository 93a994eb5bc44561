// Copyright 2026 The hmmstein Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hmmstein/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "hmmstein/error.hpp"
#include "hmmstein/germ_grain.hpp"
#include "hmmstein/occupancy.hpp"
#include "hmmstein/parallel.hpp"
#include "hmmstein/stats.hpp"
#include "hmmstein/voronoi.hpp"

namespace hmmstein::experiments {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Standard deviation of the limiting Kolmogorov law; d_K fluctuates by about
// this over sqrt(N).
constexpr double kKolmogorovSd = 0.2603;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Seed base_seed(const ExperimentConfig& config) {
  return Seed(config.seed).derive(fnv1a(config.id));
}

[[noreturn]] void parse_error(const std::string& message) { fail(ErrorCode::ConfigParse, message); }

template <typename T>
T field(const json& j, const char* key, const std::string& where) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    parse_error(where + ": field '" + key + "' is missing or mistyped");
  }
}

template <typename T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  return field<T>(j, key, where);
}

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) parse_error(where + " must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) parse_error(where + ": unknown field '" + item.key() + "'");
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::Io, "cannot write " + path.string());
  out << text;
  if (!out) fail(ErrorCode::Io, "write failed for " + path.string());
}

// ---- functional parameters -------------------------------------------------

std::vector<double> default_weights(std::size_t states) {
  // Lower-half masses spread over [0.3, 0.7].
  std::vector<double> w(states, 0.5);
  if (states > 1)
    for (std::size_t s = 0; s < states; ++s)
      w[s] = 0.3 + 0.4 * static_cast<double>(s) / static_cast<double>(states - 1);
  return w;
}

void density_bounds(const std::vector<double>& w, double& c_m, double& c_M) {
  c_m = 2.0;
  c_M = 0.0;
  for (double x : w) {
    c_m = std::min(c_m, 2.0 * std::min(x, 1.0 - x));
    c_M = std::max(c_M, 2.0 * std::max(x, 1.0 - x));
  }
}

germ_grain::GermGrainConfig germ_params(const json& p, std::size_t states) {
  const std::string where = "germ_grain params";
  reject_unknown(p, {"dimension", "cell_weights", "c_m", "c_M", "volume_min", "volume_max"}, where);
  germ_grain::GermGrainConfig g;
  g.dimension = field_or<std::size_t>(p, "dimension", 2, where);
  g.cell_weights = field_or<std::vector<double>>(p, "cell_weights", default_weights(states), where);
  double c_m, c_M;
  density_bounds(g.cell_weights, c_m, c_M);
  g.c_m = field_or<double>(p, "c_m", c_m, where);
  g.c_M = field_or<double>(p, "c_M", c_M, where);
  g.volume_min = field_or<double>(p, "volume_min", 0.5, where);
  g.volume_max = field_or<double>(p, "volume_max", 1.5, where);
  return g;
}

json germ_json(const germ_grain::GermGrainConfig& g) {
  return {{"dimension", g.dimension}, {"cell_weights", g.cell_weights}, {"c_m", g.c_m},
          {"c_M", g.c_M}, {"volume_min", g.volume_min}, {"volume_max", g.volume_max}};
}

voronoi::RegionPredicate region_params(const json& r, std::size_t d) {
  const std::string where = "voronoi region";
  reject_unknown(r, {"kind", "center", "radius", "lo", "hi"}, where);
  const auto kind = field<std::string>(r, "kind", where);
  voronoi::RegionPredicate k = voronoi::RegionPredicate::full_cube(d);
  if (kind == "ball") {
    k = voronoi::RegionPredicate::ball(field<std::vector<double>>(r, "center", where),
                                       field<double>(r, "radius", where));
  } else if (kind == "box") {
    k = voronoi::RegionPredicate::box(field<std::vector<double>>(r, "lo", where),
                                      field<std::vector<double>>(r, "hi", where));
  } else if (kind != "full-cube") {
    parse_error("unknown region kind '" + kind + "'");
  }
  if (k.dimension() != d) fail(ErrorCode::BadDimensions, "region dimension differs from d");
  return k;
}

json region_json(const voronoi::RegionPredicate& k) {
  json r = {{"kind", voronoi::kind_name(k.kind())}};
  if (k.kind() == voronoi::RegionPredicate::Kind::Ball) {
    r["center"] = k.center();
    r["radius"] = k.radius();
  } else if (k.kind() == voronoi::RegionPredicate::Kind::Box) {
    r["lo"] = k.lo();
    r["hi"] = k.hi();
  }
  return r;
}

struct VoronoiParams {
  voronoi::VoronoiConfig config;
  voronoi::RegionPredicate region = voronoi::RegionPredicate::full_cube(1);
};

VoronoiParams voronoi_params(const json& p, std::size_t states, std::size_t points) {
  const std::string where = "voronoi params";
  reject_unknown(p, {"dimension", "cell_weights", "c_m", "c_M", "region"}, where);
  VoronoiParams v;
  v.config.dimension = field_or<std::size_t>(p, "dimension", 2, where);
  v.config.points = points;
  v.config.cell_weights =
      field_or<std::vector<double>>(p, "cell_weights", default_weights(states), where);
  double c_m, c_M;
  density_bounds(v.config.cell_weights, c_m, c_M);
  v.config.c_m = field_or<double>(p, "c_m", c_m, where);
  v.config.c_M = field_or<double>(p, "c_M", c_M, where);
  const std::size_t d = v.config.dimension;
  if (d == 0) fail(ErrorCode::BadDimensions, "dimension must be positive");
  if (p.contains("region")) {
    v.region = region_params(p.at("region"), d);
  } else {
    v.region = voronoi::RegionPredicate::ball(std::vector<double>(d, 0.5), 0.25);
  }
  return v;
}

json voronoi_json(const VoronoiParams& v) {
  return {{"dimension", v.config.dimension}, {"cell_weights", v.config.cell_weights},
          {"c_m", v.config.c_m}, {"c_M", v.config.c_M}, {"region", region_json(v.region)}};
}

occupancy::OccupancyConfig occupancy_params(const json& p) {
  const std::string where = "occupancy params";
  reject_unknown(p, {"alpha", "family", "coverage"}, where);
  occupancy::OccupancyConfig o;
  o.alpha = field_or<double>(p, "alpha", 1.0, where);
  o.family = occupancy::parse_family(field_or<std::string>(p, "family", "uniform", where));
  o.coverage = field_or<double>(p, "coverage", 0.75, where);
  return o;
}

json occupancy_json(const occupancy::OccupancyConfig& o) {
  return {{"alpha", o.alpha}, {"family", occupancy::family_name(o.family)},
          {"coverage", o.coverage}};
}

const std::set<std::string> kFunctionals = {"builtin.additive", "builtin.constant",
                                            "germ_grain.f_V",   "germ_grain.f_I",
                                            "voronoi.phi",      "occupancy.W"};

json resolved_params(const ExperimentConfig& c) {
  const json& p = c.functional_params;
  if (c.functional == "builtin.additive") {
    reject_unknown(p, {"values"}, "additive params");
    return {{"values", field<std::vector<double>>(p, "values", "additive params")}};
  }
  if (c.functional == "builtin.constant") {
    reject_unknown(p, {"value"}, "constant params");
    return {{"value", field_or<double>(p, "value", 0.0, "constant params")}};
  }
  if (c.functional == "germ_grain.f_V" || c.functional == "germ_grain.f_I")
    return germ_json(germ_params(p, c.model.num_states));
  if (c.functional == "voronoi.phi")
    return voronoi_json(voronoi_params(p, c.model.num_states, c.budgets.points));
  if (c.functional == "occupancy.W") return occupancy_json(occupancy_params(p));
  fail(ErrorCode::UnknownFunctional, "unknown functional '" + c.functional + "'");
}

// ---- rows ------------------------------------------------------------------

struct RowSink {
  const ExperimentConfig& config;
  std::vector<ResultRow>& rows;

  void add(std::size_t n, const std::string& metric, double value, std::optional<double> se) {
    rows.push_back({config.id, config.functional, n, config.seed, metric, value, se});
  }
  void add(std::size_t n, const std::string& metric, const Estimate& e) {
    add(n, metric, e.value, e.standard_error);
  }
  void exact(std::size_t n, const std::string& metric, double value) {
    add(n, metric, value, std::nullopt);
  }
};

std::string int_text(std::uint64_t v) { return std::to_string(v); }

std::string label(const std::string& metric, double x) { return metric + "@" + format_double(x); }

// ---- experiment kinds ------------------------------------------------------

CsvRow samples_header(const ExperimentConfig& c) {
  if (c.functional == "occupancy.W") return {"alpha", "n", "L", "replicate", "W"};
  if (c.functional == "voronoi.phi") return {"d", "n", "replicate", "phi", "phi_stderr"};
  if (c.functional == "germ_grain.f_V") return {"d", "n", "replicate", "f_V", "f_V_stderr"};
  if (c.functional == "germ_grain.f_I") return {"d", "n", "replicate", "f_I"};
  return {"n", "replicate", "value"};
}

CsvRow sample_row(const ExperimentConfig& c, std::size_t n, std::size_t r, double v) {
  const std::string N = int_text(n), R = int_text(r), V = format_double(v);
  if (c.functional == "occupancy.W") {
    const auto o = occupancy_params(c.functional_params);
    return {format_double(o.alpha), N, int_text(o.letters(n)), R, V};
  }
  if (c.functional == "voronoi.phi") {
    const auto p = voronoi_params(c.functional_params, c.model.num_states, c.budgets.points);
    const std::string se =
        p.config.dimension == 1
            ? "exact"
            : format_double(std::sqrt(std::max(0.0, v * (1.0 - v)) /
                                      static_cast<double>(c.budgets.points)));
    return {int_text(p.config.dimension), N, R, V, se};
  }
  if (c.functional == "germ_grain.f_V") {
    const auto g = germ_params(c.functional_params, c.model.num_states);
    const double frac = v / static_cast<double>(n);
    const double se = static_cast<double>(n) *
                      std::sqrt(std::max(0.0, frac * (1.0 - frac)) /
                                static_cast<double>(c.budgets.points_per_volume * n));
    return {int_text(g.dimension), N, R, V, format_double(se)};
  }
  if (c.functional == "germ_grain.f_I") {
    const auto g = germ_params(c.functional_params, c.model.num_states);
    return {int_text(g.dimension), N, R, V};
  }
  return {N, R, V};
}

void run_clt_kind(const ExperimentConfig& c, const ModelFactory& model, RunOutput& out) {
  RowSink sink{c, out.rows};
  const auto points = run_clt(model, c.n_grid, c.replicates, base_seed(c).derive(101), c.threads,
                              std::vector<double>{2.0});
  out.samples_header = samples_header(c);
  std::vector<double> ns, variances;
  bool positive = true;
  for (const CltPoint& p : points) {
    const auto N = static_cast<double>(p.values.size());
    sink.add(p.n, "mean", mean_estimate(p.values));
    const Estimate var = variance_estimate(p.values);
    sink.add(p.n, "variance", p.summary.degenerate() ? Estimate{0.0, 0.0} : var);
    sink.exact(p.n, "dkw_width", p.dkw_width);
    sink.exact(p.n, "degenerate", p.summary.degenerate() ? 1.0 : 0.0);
    if (p.summary.d_kolmogorov)
      sink.add(p.n, "d_K", *p.summary.d_kolmogorov, kKolmogorovSd / std::sqrt(N));
    ns.push_back(static_cast<double>(p.n));
    variances.push_back(p.summary.variance);
    positive = positive && p.summary.variance > 0.0;
    for (std::size_t r = 0; r < p.values.size(); ++r)
      out.samples.push_back(sample_row(c, p.n, r, p.values[r]));
  }
  if (ns.size() >= 3 && positive) {
    const LineFit fit = fit_log_slope(ns, variances);
    sink.add(0, "log_variance_slope", fit.slope, fit.slope_standard_error);
  }
}

SteinBudget stein_budget(const ExperimentConfig& c) {
  SteinBudget b;
  b.variance_replicates = c.budgets.variance_replicates;
  b.outer = c.budgets.outer;
  b.inner = c.budgets.inner;
  b.moment_samples = c.budgets.samples;
  b.threads = c.threads;
  return b;
}

void run_stein_kind(const ExperimentConfig& c, const ModelFactory& model, RunOutput& out) {
  RowSink sink{c, out.rows};
  for (std::size_t n : c.n_grid) {
    const Model m = model(n);
    SteinEstimate e;
    try {
      e = estimate_stein_bound(m.spec, m.functional, n, stein_budget(c),
                               base_seed(c).derive({102, n}));
    } catch (const Error& err) {
      if (err.code() != ErrorCode::ZeroVariance) throw;
      sink.exact(n, "zero_variance", 1.0);
      continue;
    }
    sink.exact(n, "instruction_count", static_cast<double>(e.instruction_count));
    const std::pair<const char*, const Estimate*> fields[] = {
        {"sigma2", &e.sigma2},       {"var_T", &e.var_T},         {"var_Tprime", &e.var_Tprime},
        {"sum_abs3", &e.sum_abs3},   {"sum_sqrt6", &e.sum_sqrt6}, {"wass_bound", &e.wass_bound},
        {"kol_bound", &e.kol_bound}};
    CsvRow flat = {c.functional, int_text(n), int_text(e.instruction_count)};
    for (const auto& [name, est] : fields) {
      sink.add(n, name, *est);
      flat.push_back(format_double(est->value));
      flat.push_back(format_double(est->standard_error));
    }
    out.stein.push_back(std::move(flat));
  }
}

std::vector<double> tail_thresholds(const ExperimentConfig& c) {
  if (!c.budgets.thresholds.empty()) return c.budgets.thresholds;
  std::vector<double> t;
  for (int k = 1; k <= 8; ++k) t.push_back(k);
  return t;
}

void run_tail_kind(const ExperimentConfig& c, const ModelFactory& model, RunOutput& out) {
  RowSink sink{c, out.rows};
  const std::vector<double> thresholds = tail_thresholds(c);
  for (std::size_t n : c.n_grid) {
    const Model m = model(n);
    const MixingConstants mix =
        mixing_constants(m.spec, c.budgets.k_max.value_or(default_k_max(m.spec)));
    const InstructionSampler sampler(m.spec);
    const std::size_t horizon = c.budgets.tail_steps * mix.K;
    const std::size_t steps = n > horizon ? n - horizon : n;
    std::vector<double> abs_delta(c.replicates);
    std::vector<CouplingLength> coupling(c.replicates, CouplingLength::finite(0));
    const Seed seed = base_seed(c).derive({103, n});
    parallel_for(c.replicates, c.threads, [&](std::size_t r) {
      Rng rng = seed.derive(r).rng();
      const InstructionStack stack = sampler.sample(n, rng);
      const InstructionStack fresh = sampler.sample(n, rng);
      const std::size_t j = rng.below(steps);
      const std::size_t i = reconstruct(stack).source[j];
      abs_delta[r] = std::fabs(delta(m.functional, stack, i, fresh));
      coupling[r] = coupling_length(stack, i, fresh);
    });
    sink.exact(n, "K", static_cast<double>(mix.K));
    sink.exact(n, "epsilon", mix.epsilon);
    const auto curve = tail_curve(abs_delta, thresholds);
    std::vector<double> xs, ps;
    for (const TailPoint& tp : curve) {
      sink.add(n, label("abs_delta_tail", tp.threshold), tp.probability, tp.standard_error);
      if (tp.probability > 0.0) {
        xs.push_back(tp.threshold);
        ps.push_back(tp.probability);
      }
    }
    const auto R = static_cast<double>(c.replicates);
    for (std::size_t t = 1; t <= c.budgets.tail_steps; ++t) {
      const auto hits = std::count_if(coupling.begin(), coupling.end(), [&](const CouplingLength& s) {
        return s.at_least(t * mix.K);
      });
      const double p = static_cast<double>(hits) / R;
      sink.add(n, label("coupling_tail", static_cast<double>(t)), p, std::sqrt(p * (1.0 - p) / R));
      sink.exact(n, label("coupling_envelope", static_cast<double>(t)),
                 std::pow(1.0 - mix.epsilon, static_cast<double>(t)));
    }
    if (xs.size() >= 3) {
      const LineFit fit = fit_semilog_slope(xs, ps);
      sink.add(n, "abs_delta_tail_slope", fit.slope, fit.slope_standard_error);
    }
    sink.exact(n, "tail_envelope_slope",
               std::log(1.0 - mix.epsilon) / static_cast<double>(mix.K));
  }
}

void run_moments_kind(const ExperimentConfig& c, const ModelFactory& model, RunOutput& out) {
  RowSink sink{c, out.rows};
  const double r = c.budgets.moment_r;
  std::vector<double> log_n, maxima;
  for (std::size_t n : c.n_grid) {
    const Model m = model(n);
    const DeltaMoments dm = estimate_delta_moments(m.spec, m.functional, n, {r, 2.0},
                                                   c.budgets.samples, base_seed(c).derive({104, n}),
                                                   c.threads);
    const auto& per = dm.per_index[0];
    const auto top = std::max_element(per.begin(), per.end(), [](const Estimate& a, const Estimate& b) {
      return a.value < b.value;
    });
    sink.add(n, label("max_abs_delta_moment", r), *top);
    sink.add(n, label("sum_abs_delta_moment", r), dm.sum[0]);
    sink.add(n, "efron_stein", 0.5 * dm.sum[1].value, 0.5 * dm.sum[1].standard_error);
    log_n.push_back(std::log(static_cast<double>(n)));
    maxima.push_back(top->value);
  }
  if (log_n.size() >= 3) {
    const LineFit fit = fit_line(log_n, maxima);
    sink.add(0, label("max_moment_vs_ln_n_slope", r), fit.slope, fit.slope_standard_error);
  }
}

void run_var_lower_kind(const ExperimentConfig& c, const ModelFactory& model, RunOutput& out) {
  RowSink sink{c, out.rows};
  const auto points = run_clt(model, c.n_grid, c.replicates, base_seed(c).derive(105), c.threads);
  for (std::size_t k = 0; k < c.n_grid.size(); ++k) {
    const std::size_t n = c.n_grid[k];
    const Model m = model(n);
    const Estimate lower = variance_lower_bound(m.spec, m.functional, n, c.budgets.outer,
                                                c.budgets.inner, base_seed(c).derive({106, n}),
                                                c.threads);
    const Estimate var = points[k].summary.degenerate() ? Estimate{0.0, 0.0}
                                                        : variance_estimate(points[k].values);
    sink.add(n, "variance_lower_bound", lower);
    sink.add(n, "variance", var);
    const double slack = 3.0 * std::hypot(lower.standard_error, var.standard_error);
    sink.exact(n, "lower_bound_dominated", lower.value <= var.value + slack + 1e-12 ? 1.0 : 0.0);
  }
}

}  // namespace

const CsvRow kResultHeader = {"experiment", "functional", "n", "seed", "metric", "value", "stderr"};
const CsvRow kSteinHeader = {"name",        "n",          "instruction_count",
                             "sigma2",      "sigma2_se",  "var_T",
                             "var_T_se",    "var_Tprime", "var_Tprime_se",
                             "sum_abs3",    "sum_abs3_se", "sum_sqrt6",
                             "sum_sqrt6_se", "wass_bound", "wass_bound_se",
                             "kol_bound",   "kol_bound_se"};
const CsvRow kCompareHeader = {"functional", "n",         "empirical_d_K", "empirical_d_K_stderr",
                               "kol_bound",  "kol_bound_stderr", "dominated", "vacuous", "note"};

const char* kind_name(Kind kind) {
  switch (kind) {
    case Kind::Clt: return "clt";
    case Kind::SteinBound: return "stein-bound";
    case Kind::Tail: return "tail";
    case Kind::Moments: return "moments";
    case Kind::VarLower: return "var-lower";
  }
  return "unknown";
}

Kind parse_kind(const std::string& name) {
  for (Kind k : {Kind::Clt, Kind::SteinBound, Kind::Tail, Kind::Moments, Kind::VarLower})
    if (name == kind_name(k)) return k;
  parse_error("unknown experiment kind '" + name + "'");
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    parse_error(std::string("config is not valid JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("config") && doc.contains("outputs")) doc = doc.at("config");
  const std::string where = "config";
  reject_unknown(doc, {"id", "experiment", "seed", "threads", "model", "model_path",
                       "stationary_start", "functional", "n_grid", "replicates", "budgets",
                       "output"},
                 where);
  ExperimentConfig c;
  c.id = field<std::string>(doc, "id", where);
  c.kind = parse_kind(field<std::string>(doc, "experiment", where));
  if (!doc.contains("seed") || !doc.at("seed").is_number_unsigned())
    parse_error("config: 'seed' must be present as a non-negative integer");
  c.seed = doc.at("seed").get<std::uint64_t>();
  c.threads = field_or<std::size_t>(doc, "threads", 1, where);
  if (doc.contains("model") == doc.contains("model_path"))
    parse_error("config: give exactly one of 'model' and 'model_path'");
  if (doc.contains("model")) {
    c.model = parse_spec_json(doc.at("model").dump());
  } else {
    fs::path p = field<std::string>(doc, "model_path", where);
    if (p.is_relative()) p = base_dir / p;
    c.model = parse_spec_json(read_file(p));
  }
  c.stationary_start = field_or<bool>(doc, "stationary_start", false, where);
  if (c.stationary_start) c.model = with_stationary_start(c.model);
  const json& f = doc.contains("functional") ? doc.at("functional") : json();
  if (!f.is_object()) parse_error("config: 'functional' must be an object");
  reject_unknown(f, {"kind", "params"}, "functional");
  c.functional = field<std::string>(f, "kind", "functional");
  c.functional_params = f.contains("params") ? f.at("params") : json::object();
  c.n_grid = field<std::vector<std::size_t>>(doc, "n_grid", where);
  c.replicates = field<std::size_t>(doc, "replicates", where);
  if (doc.contains("budgets")) {
    const json& b = doc.at("budgets");
    const std::string bw = "budgets";
    reject_unknown(b, {"points", "points_per_volume", "outer", "inner", "samples", "variance_replicates", "k_max",
                       "thresholds", "tail_steps", "moment_r"},
                   bw);
    Budgets& B = c.budgets;
    B.points = field_or<std::size_t>(b, "points", B.points, bw);
    B.points_per_volume = field_or<std::size_t>(b, "points_per_volume", B.points_per_volume, bw);
    B.outer = field_or<std::size_t>(b, "outer", B.outer, bw);
    B.inner = field_or<std::size_t>(b, "inner", B.inner, bw);
    B.samples = field_or<std::size_t>(b, "samples", B.samples, bw);
    B.variance_replicates = field_or<std::size_t>(b, "variance_replicates", B.variance_replicates, bw);
    if (b.contains("k_max")) B.k_max = field<std::size_t>(b, "k_max", bw);
    B.thresholds = field_or<std::vector<double>>(b, "thresholds", B.thresholds, bw);
    B.tail_steps = field_or<std::size_t>(b, "tail_steps", B.tail_steps, bw);
    B.moment_r = field_or<double>(b, "moment_r", B.moment_r, bw);
  }
  c.output = field<std::string>(doc, "output", where);
  if (c.output.empty()) parse_error("config: 'output' must not be empty");
  if (!kFunctionals.count(c.functional))
    fail(ErrorCode::UnknownFunctional, "unknown functional '" + c.functional + "'");
  c.functional_params = resolved_params(c);
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

json to_json(const ExperimentConfig& c) {
  json b = {{"points", c.budgets.points},
            {"points_per_volume", c.budgets.points_per_volume},
            {"outer", c.budgets.outer},
            {"inner", c.budgets.inner},
            {"samples", c.budgets.samples},
            {"variance_replicates", c.budgets.variance_replicates},
            {"thresholds", c.budgets.thresholds},
            {"tail_steps", c.budgets.tail_steps},
            {"moment_r", c.budgets.moment_r}};
  if (c.budgets.k_max) b["k_max"] = *c.budgets.k_max;
  return {{"id", c.id},
          {"experiment", kind_name(c.kind)},
          {"seed", c.seed},
          {"threads", c.threads},
          {"model", json::parse(spec_to_json(c.model))},
          {"functional", {{"kind", c.functional}, {"params", c.functional_params}}},
          {"n_grid", c.n_grid},
          {"replicates", c.replicates},
          {"budgets", b},
          {"output", c.output}};
}

ModelFactory build_model(const ExperimentConfig& c) {
  const Seed points = base_seed(c).derive(100);
  const json& p = c.functional_params;
  if (c.functional == "builtin.additive") {
    const auto values = field<std::vector<double>>(p, "values", "additive params");
    if (values.size() != c.model.num_symbols)
      fail(ErrorCode::BadDimensions, "additive values need one entry per symbol");
    const Functional f = additive_functional(values);
    return [spec = c.model, f](std::size_t) { return Model{spec, f}; };
  }
  if (c.functional == "builtin.constant") {
    const Functional f = constant_functional(p.at("value").get<double>());
    return [spec = c.model, f](std::size_t) { return Model{spec, f}; };
  }
  if (c.functional == "germ_grain.f_V" || c.functional == "germ_grain.f_I") {
    const auto which = c.functional == "germ_grain.f_V" ? germ_grain::GrainFunctional::Volume
                                                        : germ_grain::GrainFunctional::Isolated;
    return germ_grain::germ_grain_model(germ_params(p, c.model.num_states), c.model, which,
                                        c.budgets.points_per_volume, points);
  }
  if (c.functional == "voronoi.phi") {
    const VoronoiParams v = voronoi_params(p, c.model.num_states, c.budgets.points);
    return voronoi::voronoi_model(v.config, c.model, v.region, points);
  }
  if (c.functional == "occupancy.W")
    return occupancy::occupancy_model(occupancy_params(p), c.model);
  fail(ErrorCode::UnknownFunctional, "unknown functional '" + c.functional + "'");
}

void validate(const ExperimentConfig& c) {
  if (c.id.empty()) fail(ErrorCode::InvalidArgument, "experiment id must not be empty");
  validate_grid(c.n_grid);
  if (c.replicates < 2) fail(ErrorCode::InvalidArgument, "replicates must be at least 2");
  if (c.threads == 0) fail(ErrorCode::InvalidArgument, "threads must be at least 1");
  const Budgets& b = c.budgets;
  if (b.points == 0 || b.points_per_volume == 0)
    fail(ErrorCode::InvalidArgument, "point budgets must be positive");
  if (c.kind == Kind::SteinBound || c.kind == Kind::VarLower) {
    if (b.outer < 2 || b.inner < 2)
      fail(ErrorCode::InvalidArgument, "budgets.outer and budgets.inner must be at least 2");
  }
  if (c.kind == Kind::SteinBound && b.variance_replicates < 2)
    fail(ErrorCode::InvalidArgument, "budgets.variance_replicates must be at least 2");
  if ((c.kind == Kind::SteinBound || c.kind == Kind::Moments) && b.samples < 2)
    fail(ErrorCode::InvalidArgument, "budgets.samples must be at least 2");
  if (!(b.moment_r > 0.0)) fail(ErrorCode::InvalidArgument, "budgets.moment_r must be positive");
  for (std::size_t k = 1; k < b.thresholds.size(); ++k)
    if (!(b.thresholds[k] > b.thresholds[k - 1]))
      fail(ErrorCode::InvalidArgument, "budgets.thresholds must be increasing");
  if (c.kind == Kind::Tail && b.tail_steps == 0)
    fail(ErrorCode::InvalidArgument, "budgets.tail_steps must be positive");
  const ModelFactory model = build_model(c);
  for (std::size_t n : c.n_grid) {
    const Model m = model(n);
    validate_spec(m.spec);
    if (c.kind == Kind::Tail) mixing_constants(m.spec, b.k_max.value_or(default_k_max(m.spec)));
  }
}

RunOutput execute(const ExperimentConfig& c) {
  validate(c);
  const ModelFactory model = build_model(c);
  RunOutput out;
  switch (c.kind) {
    case Kind::Clt: run_clt_kind(c, model, out); break;
    case Kind::SteinBound: run_stein_kind(c, model, out); break;
    case Kind::Tail: run_tail_kind(c, model, out); break;
    case Kind::Moments: run_moments_kind(c, model, out); break;
    case Kind::VarLower: run_var_lower_kind(c, model, out); break;
  }
  // Grid-wide rows (n = 0) go last; otherwise rows keep their emission order.
  std::stable_sort(out.rows.begin(), out.rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return (a.n == 0 ? 1 : 0) < (b.n == 0 ? 1 : 0);
  });
  return out;
}

std::string results_csv(const std::vector<ResultRow>& rows) {
  std::vector<CsvRow> body;
  body.reserve(rows.size());
  for (const ResultRow& r : rows)
    body.push_back({r.experiment, r.functional, int_text(r.n), int_text(r.seed), r.metric,
                    format_double(r.value),
                    r.standard_error ? format_double(*r.standard_error) : "exact"});
  return csv_document(kResultHeader, body);
}

RunFiles write_outputs(const ExperimentConfig& c, const RunOutput& out) {
  RunFiles files;
  files.results = c.output + ".csv";
  files.manifest = c.output + ".manifest.json";
  write_file(files.results, results_csv(out.rows));
  json outputs = {{"results", files.results.filename().string()}};
  if (c.kind == Kind::Clt) {
    files.samples = c.output + ".samples.csv";
    write_file(*files.samples, csv_document(out.samples_header, out.samples));
    outputs["samples"] = files.samples->filename().string();
  }
  if (c.kind == Kind::SteinBound) {
    files.stein = c.output + ".stein.csv";
    write_file(*files.stein, csv_document(kSteinHeader, out.stein));
    outputs["stein"] = files.stein->filename().string();
  }
  const json manifest = {{"version", HMMSTEIN_VERSION}, {"config", to_json(c)}, {"outputs", outputs}};
  write_file(files.manifest, manifest.dump(2) + "\n");
  return files;
}

RunFiles run(const ExperimentConfig& config) { return write_outputs(config, execute(config)); }

// ---- compare ---------------------------------------------------------------

namespace {

struct LoadedRun {
  Kind kind;
  // (functional, n, metric) -> (value, stderr)
  std::map<std::tuple<std::string, std::size_t, std::string>,
           std::pair<double, std::optional<double>>>
      metrics;
};

double parse_number(const std::string& text) {
  if (text == "inf") return HUGE_VAL;
  if (text == "-inf") return -HUGE_VAL;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    fail(ErrorCode::ConfigParse, "not a number in results: '" + text + "'");
  }
}

LoadedRun load_run(const fs::path& where) {
  fs::path manifest = where;
  if (manifest.extension() != ".json") manifest = fs::path(where.string() + ".manifest.json");
  if (!fs::exists(manifest)) fail(ErrorCode::MissingRun, "no run manifest at " + manifest.string());
  json doc;
  try {
    doc = json::parse(read_file(manifest));
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, std::string("manifest is not valid JSON: ") + e.what());
  }
  LoadedRun run;
  std::string results;
  try {
    run.kind = parse_kind(doc.at("config").at("experiment").get<std::string>());
    results = doc.at("outputs").at("results").get<std::string>();
  } catch (const json::exception&) {
    fail(ErrorCode::ConfigParse, "manifest lacks config.experiment or outputs.results");
  }
  const auto rows = parse_csv(read_file(manifest.parent_path() / results));
  if (rows.empty() || rows.front() != kResultHeader)
    fail(ErrorCode::ConfigParse, "results file has an unexpected header");
  for (std::size_t k = 1; k < rows.size(); ++k) {
    const CsvRow& r = rows[k];
    if (r.size() != kResultHeader.size()) fail(ErrorCode::ConfigParse, "ragged results row");
    std::optional<double> se;
    if (r[6] != "exact") se = parse_number(r[6]);
    run.metrics[{r[1], static_cast<std::size_t>(parse_number(r[2])), r[4]}] = {parse_number(r[5]), se};
  }
  return run;
}

}  // namespace

std::vector<CompareRow> compare_runs(const fs::path& a, const fs::path& b) {
  LoadedRun first = load_run(a), second = load_run(b);
  if (first.kind == Kind::SteinBound && second.kind == Kind::Clt) std::swap(first, second);
  if (first.kind != Kind::Clt || second.kind != Kind::SteinBound)
    fail(ErrorCode::MissingRun, "compare needs one clt run and one stein-bound run");
  std::set<std::pair<std::string, std::size_t>> clt_keys, stein_keys;
  for (const auto& [key, value] : first.metrics)
    if (std::get<1>(key) != 0) clt_keys.insert({std::get<0>(key), std::get<1>(key)});
  for (const auto& [key, value] : second.metrics)
    if (std::get<1>(key) != 0) stein_keys.insert({std::get<0>(key), std::get<1>(key)});
  std::vector<CompareRow> out;
  for (const auto& key : clt_keys) {
    if (!stein_keys.count(key)) continue;
    const auto& [name, n] = key;
    CompareRow row;
    row.functional = name;
    row.n = n;
    auto find = [&](const LoadedRun& r, const char* metric) {
      const auto it = r.metrics.find({name, n, metric});
      return it == r.metrics.end() ? std::optional<std::pair<double, std::optional<double>>>{}
                                   : std::optional(it->second);
    };
    const auto dk = find(first, "d_K");
    const auto kol = find(second, "kol_bound");
    const auto degenerate = find(first, "degenerate");
    if (find(second, "zero_variance") || (degenerate && degenerate->first != 0.0) || !dk || !kol) {
      row.note = "ZeroVariance";
      out.push_back(std::move(row));
      continue;
    }
    row.empirical_d_K = dk->first;
    row.empirical_d_K_stderr = dk->second.value_or(0.0);
    row.kol_bound = kol->first;
    row.kol_bound_stderr = kol->second.value_or(0.0);
    row.vacuous = *row.kol_bound >= 1.0;
    const double slack = 3.0 * std::hypot(*row.empirical_d_K_stderr, *row.kol_bound_stderr);
    row.dominated = row.vacuous || *row.empirical_d_K <= *row.kol_bound + slack;
    if (row.vacuous) row.note = "vacuous";
    out.push_back(std::move(row));
  }
  if (out.empty()) fail(ErrorCode::MissingRun, "the runs share no (functional, n) pair");
  return out;
}

std::string compare_csv(const std::vector<CompareRow>& rows) {
  auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
  std::vector<CsvRow> body;
  for (const CompareRow& r : rows)
    body.push_back({r.functional, int_text(r.n), opt(r.empirical_d_K), opt(r.empirical_d_K_stderr),
                    opt(r.kol_bound), opt(r.kol_bound_stderr),
                    r.dominated ? (*r.dominated ? "true" : "false") : "", r.vacuous ? "true" : "false",
                    r.note});
  return csv_document(kCompareHeader, body);
}

}  // namespace hmmstein::experiments
