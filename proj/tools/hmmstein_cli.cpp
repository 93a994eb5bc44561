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

// Command-line front end over the C API.
//
//   hmmstein run <config>             run an experiment (config or manifest)
//   hmmstein validate <config>        check a config without running it
//   hmmstein compare <run-a> <run-b>  clt run vs stein-bound run
//
// Exit status: 0 success, 2 config error, 3 runtime error.

#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "hmmstein/hmmstein.h"

namespace {

constexpr int kConfigError = 2;
constexpr int kRuntimeError = 3;

int report(hs_status status, int code) {
  std::fprintf(stderr, "hmmstein: %s: %s\n", hs_status_name(status), hs_last_error());
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stein-method bounds for functionals of hidden Markov models"};
  app.set_version_flag("--version", std::string(hs_version()));
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a config or manifest");
  run->add_option("config", config_path, "Config or manifest path")->required();

  auto* validate = app.add_subcommand("validate", "Validate a config without running it");
  validate->add_option("config", config_path, "Config or manifest path")->required();

  std::string run_a, run_b, out_path;
  auto* compare = app.add_subcommand("compare", "Compare a clt run with a stein-bound run");
  compare->add_option("run-a", run_a, "Manifest path or output prefix")->required();
  compare->add_option("run-b", run_b, "Manifest path or output prefix")->required();
  compare->add_option("-o,--output", out_path, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*validate || *run) {
    const hs_status status = hs_config_validate(config_path.c_str());
    if (status != HS_OK) return report(status, kConfigError);
    if (*validate) {
      std::printf("%s: ok\n", config_path.c_str());
      return 0;
    }
    const hs_status ran = hs_experiment_run(config_path.c_str());
    return ran == HS_OK ? 0 : report(ran, kRuntimeError);
  }

  char* csv = nullptr;
  const hs_status status = hs_compare_runs(run_a.c_str(), run_b.c_str(), &csv);
  if (status != HS_OK) return report(status, kRuntimeError);
  int code = 0;
  if (out_path.empty()) {
    std::fputs(csv, stdout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << csv;
    if (!out) {
      std::fprintf(stderr, "hmmstein: cannot write %s\n", out_path.c_str());
      code = kRuntimeError;
    }
  }
  hs_string_free(csv);
  return code;
}
