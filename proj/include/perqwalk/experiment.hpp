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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "perqwalk/graph.hpp"
#include "perqwalk/multiparticle.hpp"
#include "perqwalk/noise.hpp"
#include "perqwalk/propagate.hpp"

namespace perqwalk {

/// Invalid or unknown configuration. `key()` is "section.name" when the
/// problem is tied to one key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ExperimentKind { LineSpread, Wavepacket, Search, ScalingSweep, TwoParticle, NoiseCheck };

std::string_view to_string(ExperimentKind k);
ExperimentKind parse_experiment_kind(std::string_view s);

/// Fully resolved experiment description. Every field has a concrete value
/// after parsing, so to_json() echoes exactly what runs.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::LineSpread;

  // [experiment]
  std::uint64_t seed = 1;
  std::size_t trajectories = 100;
  std::size_t threads = 1;
  std::string output = "perqwalk-out";
  PropagationMethod method = PropagationMethod::Auto;

  // [graph]
  std::string graph_type = "ring";  // ring, line, complete, star, edge-list
  std::size_t nodes = 401;
  std::string graph_file;

  // [noise]
  double nu = 0.0;
  double gamma = 1.0;
  double correlation = 0.0;
  NoiseTarget noise_target = NoiseTarget::Tunneling;

  // [time]
  double t_max = 50.0;
  std::size_t samples = 51;

  // [walk]
  std::optional<std::size_t> origin;  // unset: node n/2
  double width = 4.0;
  double momentum = 1.5707963267948966;

  // [search]
  std::string search_target = "0";  // node index, "center" or "external"
  double coupling = 0.0;             // 0: 1/N
  bool coupling_sweep = false;
  std::size_t grid_points = 400;
  double grid_span = 3.0;            // multiples of (pi/2) sqrt(N)

  // [scaling]
  std::vector<std::size_t> scaling_nodes{8, 16, 32, 64, 128};

  // [two-particle]
  Statistics statistics = Statistics::Bosonic;
  std::string interaction = "onsite";  // none, onsite, nearest-neighbor
  double strength = 1.0;
  std::optional<std::size_t> first;   // unset: n/2
  std::optional<std::size_t> second;  // unset: n/2 (+1 for fermions)

  // [sweep]
  std::vector<std::size_t> sweep_nodes;
  std::vector<double> sweep_nu;
  std::vector<double> sweep_gamma;

  nlohmann::json to_json() const;
  /// Throws ConfigError naming the offending key.
  void validate() const;
};

/// INI-style text: `[section]` headers and `key = value` lines, `;` or `#`
/// comments. Unknown sections and keys are rejected.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

Graph make_graph(const ExperimentConfig& config);
std::vector<double> uniform_grid(double t_max, std::size_t samples);

struct RunReport {
  std::vector<std::string> files;  // relative to the output directory
  nlohmann::json summary;
};

/// Runs one experiment and writes its data files plus manifest.json under
/// `outdir` (created if missing). Data files are byte-identical across
/// reruns and thread counts; only the manifest carries a timestamp.
RunReport run_experiment(const ExperimentConfig& config, const std::filesystem::path& outdir);

/// Cartesian product over the [sweep] axes; one run directory per point
/// plus combined sweep.csv / sweep.json and scaling fits where they apply.
RunReport run_sweep(const ExperimentConfig& config, const std::filesystem::path& outdir);

}  // namespace perqwalk
