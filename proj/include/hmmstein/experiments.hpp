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

#ifndef HMMSTEIN_EXPERIMENTS_HPP_
#define HMMSTEIN_EXPERIMENTS_HPP_

// Config-driven experiment runs. A config names a model, a functional, an n
// grid and budgets; a run writes
//   <output>.csv            one row per metric (experiment,functional,n,seed,
//                           metric,value,stderr), stderr "exact" when the
//                           value carries no Monte Carlo error, n = 0 for
//                           rows that summarize the whole grid;
//   <output>.samples.csv    per-replicate values (clt runs);
//   <output>.stein.csv      flat bound estimates (stein-bound runs);
//   <output>.manifest.json  version, resolved config and output paths.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hmmstein/clt.hpp"
#include "hmmstein/csv.hpp"
#include "hmmstein/hmm.hpp"
#include "hmmstein/perturb.hpp"

namespace hmmstein::experiments {

enum class Kind { Clt, SteinBound, Tail, Moments, VarLower };

const char* kind_name(Kind kind);
Kind parse_kind(const std::string& name);  // throws ConfigParse

struct Budgets {
  std::size_t points = 10000;            // phi: points in the unit cube
  std::size_t points_per_volume = 10;    // f_V: points per unit window volume
  std::size_t outer = 200;
  std::size_t inner = 200;
  std::size_t samples = 500;
  std::size_t variance_replicates = 4000;
  std::optional<std::size_t> k_max;
  std::vector<double> thresholds;  // tail runs; default 1..8
  std::size_t tail_steps = 8;      // t = 1..tail_steps for P(s >= tK)
  double moment_r = 1.0;
};

struct ExperimentConfig {
  std::string id;
  Kind kind = Kind::Clt;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  HmmSpec model;
  bool stationary_start = false;
  std::string functional;
  nlohmann::json functional_params = nlohmann::json::object();
  std::vector<std::size_t> n_grid;
  std::size_t replicates = 0;
  Budgets budgets;
  std::string output;
};

// Parses a config, or the manifest of an earlier run (its "config" member).
// A relative model_path is resolved against base_dir. Throws ConfigParse.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// The resolved config: model inline, every default spelled out.
nlohmann::json to_json(const ExperimentConfig& config);

// Everything short of running: grid, replicates, functional construction for
// every n. Throws the error a run would hit first.
void validate(const ExperimentConfig& config);

// Builds the (model, functional) pair for each n.
ModelFactory build_model(const ExperimentConfig& config);

struct ResultRow {
  std::string experiment;
  std::string functional;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
  std::optional<double> standard_error;  // nullopt means exact
};

struct RunOutput {
  std::vector<ResultRow> rows;
  CsvRow samples_header;
  std::vector<CsvRow> samples;
  std::vector<CsvRow> stein;
};

extern const CsvRow kResultHeader;
extern const CsvRow kSteinHeader;

RunOutput execute(const ExperimentConfig& config);

struct RunFiles {
  std::filesystem::path results;
  std::optional<std::filesystem::path> samples;
  std::optional<std::filesystem::path> stein;
  std::filesystem::path manifest;
};

std::string results_csv(const std::vector<ResultRow>& rows);
RunFiles write_outputs(const ExperimentConfig& config, const RunOutput& output);
RunFiles run(const ExperimentConfig& config);

struct CompareRow {
  std::string functional;
  std::size_t n = 0;
  std::optional<double> empirical_d_K;
  std::optional<double> empirical_d_K_stderr;
  std::optional<double> kol_bound;
  std::optional<double> kol_bound_stderr;
  std::optional<bool> dominated;
  bool vacuous = false;
  std::string note;
};

extern const CsvRow kCompareHeader;

// Joins a clt run and a stein-bound run (either order) on (functional, n);
// each argument is a manifest path or an output prefix. Throws MissingRun when
// the kinds are wrong or no (functional, n) pair is shared.
std::vector<CompareRow> compare_runs(const std::filesystem::path& a,
                                     const std::filesystem::path& b);
std::string compare_csv(const std::vector<CompareRow>& rows);

}  // namespace hmmstein::experiments

#endif  // HMMSTEIN_EXPERIMENTS_HPP_
