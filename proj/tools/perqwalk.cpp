// Copyright 2026 The perqwalk Authors
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

// perqwalk command-line driver. Talks to the library only through the C
// interface so it exercises the same surface as other bindings.

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "perqwalk/perqwalk.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

constexpr const char* kThreadsEnv = "PERQWALK_THREADS";

struct ConfigDeleter {
  void operator()(pqw_config* c) const { pqw_config_free(c); }
};
struct ReportDeleter {
  void operator()(pqw_report* r) const { pqw_report_free(r); }
};
using ConfigPtr = std::unique_ptr<pqw_config, ConfigDeleter>;
using ReportPtr = std::unique_ptr<pqw_report, ReportDeleter>;

int exit_code(pqw_status s) {
  switch (s) {
    case PQW_OK: return kExitOk;
    case PQW_ERR_CONFIG: return kExitConfig;
    default: return kExitRuntime;
  }
}

int report_error(pqw_status s) {
  std::cerr << "perqwalk: " << pqw_status_name(s) << ": " << pqw_last_error() << '\n';
  return exit_code(s);
}

// Strict non-negative integer; nullopt on anything else.
std::optional<std::size_t> parse_count(const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) return {};
  errno = 0;
  const unsigned long long v = std::strtoull(text.c_str(), nullptr, 10);
  if (errno == ERANGE) return {};
  return static_cast<std::size_t>(v);
}

std::string take(char* s) {
  std::string out = s != nullptr ? s : "";
  pqw_string_free(s);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum walks under dynamical-percolation telegraph noise"};
  app.set_version_flag("--version", pqw_version());
  app.require_subcommand(1);

  std::string config_path;
  std::string output;
  std::optional<std::size_t> threads_flag;
  bool quiet = false;

  auto add_common = [&](CLI::App* sub, bool runs) {
    sub->add_option("config", config_path, "Experiment config (INI)")->required();
    if (runs) {
      sub->add_option("-o,--output", output, "Output directory (overrides [experiment] output)");
      sub->add_option("-t,--threads", threads_flag,
                      std::string("Worker threads, 0 = all cores (") + kThreadsEnv +
                          " overrides the config; this flag overrides both)");
      sub->add_flag("-q,--quiet", quiet, "Do not print the summary");
    }
  };
  auto* run = app.add_subcommand("run", "Run one experiment");
  auto* sweep = app.add_subcommand("sweep", "Run the [sweep] grid of an experiment");
  auto* validate = app.add_subcommand("validate", "Check a config and print it fully resolved");
  add_common(run, true);
  add_common(sweep, true);
  add_common(validate, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  pqw_config* raw = nullptr;
  if (const auto s = pqw_config_load(config_path.c_str(), &raw); s != PQW_OK) {
    return report_error(s);
  }
  ConfigPtr config(raw);

  if (validate->parsed()) {
    char* json = nullptr;
    if (const auto s = pqw_config_to_json(config.get(), &json); s != PQW_OK) {
      return report_error(s);
    }
    std::cout << take(json) << '\n';
    return kExitOk;
  }

  if (const char* env = std::getenv(kThreadsEnv); env != nullptr && *env != '\0') {
    const auto n = parse_count(env);
    if (!n) {
      std::cerr << "perqwalk: config error: " << kThreadsEnv
                << " must be a non-negative integer, got '" << env << "'\n";
      return kExitConfig;
    }
    pqw_config_set_threads(config.get(), *n);
  }
  if (threads_flag) pqw_config_set_threads(config.get(), *threads_flag);
  if (!output.empty()) {
    if (const auto s = pqw_config_set_output(config.get(), output.c_str()); s != PQW_OK) {
      return report_error(s);
    }
  }

  pqw_report* rep = nullptr;
  const auto s = run->parsed() ? pqw_run(config.get(), nullptr, &rep)
                               : pqw_sweep(config.get(), nullptr, &rep);
  if (s != PQW_OK) return report_error(s);
  ReportPtr report(rep);

  if (!quiet) {
    char* dir = nullptr;
    pqw_config_output(config.get(), &dir);
    std::cout << "wrote " << pqw_report_file_count(report.get()) << " files to " << take(dir)
              << '\n';
    char* summary = nullptr;
    if (pqw_report_summary_json(report.get(), &summary) == PQW_OK) {
      std::cout << take(summary) << '\n';
    }
  }
  return kExitOk;
}
