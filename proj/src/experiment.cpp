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

#include "perqwalk/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "perqwalk/dynamics.hpp"
#include "perqwalk/observables.hpp"
#include "perqwalk/search.hpp"
#include "perqwalk/version.hpp"

namespace perqwalk {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::LineSpread: return "line-spread";
    case ExperimentKind::Wavepacket: return "wavepacket";
    case ExperimentKind::Search: return "search";
    case ExperimentKind::ScalingSweep: return "scaling-sweep";
    case ExperimentKind::TwoParticle: return "two-particle";
    case ExperimentKind::NoiseCheck: return "noise-check";
  }
  return "line-spread";
}

ExperimentKind parse_experiment_kind(std::string_view s) {
  for (auto k : {ExperimentKind::LineSpread, ExperimentKind::Wavepacket, ExperimentKind::Search,
                 ExperimentKind::ScalingSweep, ExperimentKind::TwoParticle,
                 ExperimentKind::NoiseCheck}) {
    if (s == to_string(k)) return k;
  }
  throw ConfigError("experiment.kind",
                    "unknown kind '" + std::string(s) +
                        "' (expected line-spread, wavepacket, search, scaling-sweep, "
                        "two-particle or noise-check)");
}

namespace {

// ---------------------------------------------------------------------------
// Value parsing

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text) {
  std::istringstream is(text);
  is.imbue(std::locale::classic());
  double v = 0.0;
  if (!(is >> v) || !(is >> std::ws).eof() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
  if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key, "expected a non-negative integer, got '" + text + "'");
  }
  try {
    return std::stoull(text);
  } catch (const std::exception&) {
    throw ConfigError(key, "integer out of range: '" + text + "'");
  }
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1") return true;
  if (text == "false" || text == "no" || text == "off" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& key, const std::string& text) {
  std::vector<std::string> items;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ',')) {
    cur = trim(cur);
    if (cur.empty()) throw ConfigError(key, "empty entry in list '" + text + "'");
    items.push_back(cur);
  }
  if (items.empty()) throw ConfigError(key, "empty grid axis");
  return items;
}

std::vector<std::size_t> to_uint_list(const std::string& key, const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& s : split_list(key, text)) out.push_back(to_uint(key, s));
  return out;
}

std::vector<double> to_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& s : split_list(key, text)) out.push_back(to_double(key, s));
  return out;
}

std::optional<std::size_t> to_node_or_center(const std::string& key, const std::string& text) {
  if (text == "center") return std::nullopt;
  return to_uint(key, text);
}

// ---------------------------------------------------------------------------
// Kind-specific defaults

ExperimentConfig defaults_for(ExperimentKind kind) {
  ExperimentConfig c;
  c.kind = kind;
  switch (kind) {
    case ExperimentKind::LineSpread:
      c.graph_type = "ring";
      c.nodes = 401;
      c.t_max = 50.0;
      c.samples = 51;
      break;
    case ExperimentKind::Wavepacket:
      c.graph_type = "ring";
      c.nodes = 128;
      c.t_max = 20.0;
      c.samples = 41;
      break;
    case ExperimentKind::Search:
    case ExperimentKind::ScalingSweep:
      c.graph_type = "complete";
      c.nodes = 16;
      break;
    case ExperimentKind::TwoParticle:
      c.graph_type = "ring";
      c.nodes = 16;
      c.t_max = 10.0;
      c.samples = 21;
      break;
    case ExperimentKind::NoiseCheck:
      c.trajectories = 100000;
      c.t_max = 1.0;
      c.samples = 11;
      break;
  }
  return c;
}

using Setter = std::function<void(ExperimentConfig&, const std::string& key, const std::string&)>;

const std::map<std::string, std::map<std::string, Setter>>& schema() {
  static const std::map<std::string, std::map<std::string, Setter>> s = {
      {"experiment",
       {
           {"kind", [](ExperimentConfig&, const std::string&, const std::string&) {}},
           {"seed", [](auto& c, auto& k, auto& v) { c.seed = to_uint(k, v); }},
           {"trajectories", [](auto& c, auto& k, auto& v) { c.trajectories = to_uint(k, v); }},
           {"threads", [](auto& c, auto& k, auto& v) { c.threads = to_uint(k, v); }},
           {"output", [](auto& c, auto&, auto& v) { c.output = v; }},
           {"method",
            [](auto& c, auto& k, auto& v) {
              try {
                c.method = parse_propagation_method(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError(k, e.what());
              }
            }},
       }},
      {"graph",
       {
           {"type", [](auto& c, auto&, auto& v) { c.graph_type = v; }},
           {"nodes", [](auto& c, auto& k, auto& v) { c.nodes = to_uint(k, v); }},
           {"file", [](auto& c, auto&, auto& v) { c.graph_file = v; }},
       }},
      {"noise",
       {
           {"nu", [](auto& c, auto& k, auto& v) { c.nu = to_double(k, v); }},
           {"gamma", [](auto& c, auto& k, auto& v) { c.gamma = to_double(k, v); }},
           {"correlation", [](auto& c, auto& k, auto& v) { c.correlation = to_double(k, v); }},
           {"target",
            [](auto& c, auto& k, auto& v) {
              try {
                c.noise_target = parse_noise_target(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError(k, e.what());
              }
            }},
       }},
      {"time",
       {
           {"t_max", [](auto& c, auto& k, auto& v) { c.t_max = to_double(k, v); }},
           {"samples", [](auto& c, auto& k, auto& v) { c.samples = to_uint(k, v); }},
       }},
      {"walk",
       {
           {"origin", [](auto& c, auto& k, auto& v) { c.origin = to_node_or_center(k, v); }},
           {"width", [](auto& c, auto& k, auto& v) { c.width = to_double(k, v); }},
           {"momentum", [](auto& c, auto& k, auto& v) { c.momentum = to_double(k, v); }},
       }},
      {"search",
       {
           {"target", [](auto& c, auto&, auto& v) { c.search_target = v; }},
           {"coupling",
            [](auto& c, auto& k, auto& v) { c.coupling = v == "auto" ? 0.0 : to_double(k, v); }},
           {"coupling_sweep", [](auto& c, auto& k, auto& v) { c.coupling_sweep = to_bool(k, v); }},
           {"grid_points", [](auto& c, auto& k, auto& v) { c.grid_points = to_uint(k, v); }},
           {"grid_span", [](auto& c, auto& k, auto& v) { c.grid_span = to_double(k, v); }},
       }},
      {"scaling",
       {
           {"nodes", [](auto& c, auto& k, auto& v) { c.scaling_nodes = to_uint_list(k, v); }},
       }},
      {"two-particle",
       {
           {"statistics",
            [](auto& c, auto& k, auto& v) {
              try {
                c.statistics = parse_statistics(v);
              } catch (const std::invalid_argument& e) {
                throw ConfigError(k, e.what());
              }
            }},
           {"interaction", [](auto& c, auto&, auto& v) { c.interaction = v; }},
           {"strength", [](auto& c, auto& k, auto& v) { c.strength = to_double(k, v); }},
           {"first", [](auto& c, auto& k, auto& v) { c.first = to_node_or_center(k, v); }},
           {"second", [](auto& c, auto& k, auto& v) { c.second = to_node_or_center(k, v); }},
       }},
      {"sweep",
       {
           {"nodes", [](auto& c, auto& k, auto& v) { c.sweep_nodes = to_uint_list(k, v); }},
           {"nu", [](auto& c, auto& k, auto& v) { c.sweep_nu = to_double_list(k, v); }},
           {"gamma", [](auto& c, auto& k, auto& v) { c.sweep_gamma = to_double_list(k, v); }},
       }},
  };
  return s;
}

std::size_t min_nodes(const std::string& type) {
  if (type == "ring") return 3;
  if (type == "line" || type == "complete" || type == "star") return 2;
  return 1;
}

std::size_t resolve_search_target(const ExperimentConfig& c, std::size_t n) {
  if (c.search_target == "center") return 0;
  if (c.search_target == "external") return 1;
  const auto t = to_uint("search.target", c.search_target);
  if (t >= n) {
    throw ConfigError("search.target", "node " + std::to_string(t) + " outside graph of " +
                                           std::to_string(n) + " nodes");
  }
  return t;
}

InteractionSpec make_interaction(const ExperimentConfig& c) {
  if (c.interaction == "none") return InteractionSpec::none();
  if (c.interaction == "onsite") return InteractionSpec::on_site(c.strength);
  if (c.interaction == "nearest-neighbor") return InteractionSpec::nearest_neighbor(c.strength);
  throw ConfigError("two-particle.interaction", "unknown interaction '" + c.interaction +
                                                    "' (expected none, onsite or nearest-neighbor)");
}

void check_graph(const ExperimentConfig& c, std::size_t nodes, const std::string& key) {
  static const std::vector<std::string> types = {"ring", "line", "complete", "star", "edge-list"};
  if (std::find(types.begin(), types.end(), c.graph_type) == types.end()) {
    throw ConfigError("graph.type", "unknown graph type '" + c.graph_type +
                                        "' (expected ring, line, complete, star or edge-list)");
  }
  if (c.graph_type == "edge-list") {
    if (c.graph_file.empty()) throw ConfigError("graph.file", "edge-list graphs need a file");
    return;
  }
  if (!c.graph_file.empty()) {
    throw ConfigError("graph.file", "only used with type = edge-list");
  }
  if (nodes < min_nodes(c.graph_type)) {
    throw ConfigError(key, c.graph_type + " graphs need at least " +
                               std::to_string(min_nodes(c.graph_type)) + " nodes");
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  if (trajectories < 1) throw ConfigError("experiment.trajectories", "must be at least 1");
  if (output.empty()) throw ConfigError("experiment.output", "must not be empty");
  if (kind != ExperimentKind::NoiseCheck) {
    if (kind == ExperimentKind::ScalingSweep) {
      if (graph_type == "edge-list") {
        throw ConfigError("graph.type", "scaling sweeps need a generated graph family");
      }
      if (scaling_nodes.size() < 3) {
        throw ConfigError("scaling.nodes", "need at least three sizes for a scaling fit");
      }
      for (auto n : scaling_nodes) check_graph(*this, n, "scaling.nodes");
    } else {
      check_graph(*this, nodes, "graph.nodes");
    }
  }
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("noise.nu", "must lie in [0, 1]");
  if (!(gamma > 0.0)) throw ConfigError("noise.gamma", "must be positive");
  if (!(correlation >= 0.0 && correlation <= 1.0)) {
    throw ConfigError("noise.correlation", "must lie in [0, 1]");
  }
  if (correlation > 0.0 && graph_type != "ring" && graph_type != "line") {
    throw ConfigError("noise.correlation", "spatial domains are only defined on line or ring graphs");
  }
  if (!(t_max > 0.0)) throw ConfigError("time.t_max", "must be positive");
  if (samples < 2) throw ConfigError("time.samples", "need at least two sample times");

  const std::size_t n = nodes;
  switch (kind) {
    case ExperimentKind::LineSpread:
    case ExperimentKind::Wavepacket:
      if (graph_type != "edge-list" && origin && *origin >= n) {
        throw ConfigError("walk.origin", "node outside graph");
      }
      if (kind == ExperimentKind::Wavepacket) {
        if (!(width > 0.0)) throw ConfigError("walk.width", "must be positive");
        if (graph_type != "edge-list" && n < 3) throw ConfigError("graph.nodes", "need n >= 3");
      }
      break;
    case ExperimentKind::Search:
    case ExperimentKind::ScalingSweep: {
      if (coupling < 0.0) throw ConfigError("search.coupling", "must be positive or auto");
      // Search noise is independent telegraph noise on every link.
      if (correlation > 0.0) {
        throw ConfigError("noise.correlation", "search noise has no spatial domains");
      }
      if (noise_target != NoiseTarget::Tunneling) {
        throw ConfigError("noise.target", "search noise acts on the links only");
      }
      if (grid_points < 2) throw ConfigError("search.grid_points", "need at least two points");
      if (!(grid_span >= 2.0)) {
        throw ConfigError("search.grid_span", "grid must span at least 2 * (pi/2) sqrt(N)");
      }
      if (graph_type != "edge-list") {
        const auto sizes = kind == ExperimentKind::Search ? std::vector<std::size_t>{n}
                                                          : scaling_nodes;
        for (auto size : sizes) resolve_search_target(*this, size);
      }
      break;
    }
    case ExperimentKind::TwoParticle: {
      if (graph_type != "edge-list" && n > 64) {
        throw ConfigError("graph.nodes", "two-particle runs support at most 64 nodes");
      }
      make_interaction(*this);
      if (graph_type != "edge-list") {
        if (first && *first >= n) throw ConfigError("two-particle.first", "node outside graph");
        if (second && *second >= n) throw ConfigError("two-particle.second", "node outside graph");
        if (statistics == Statistics::Fermionic && first.value_or(n / 2) ==
                                                       second.value_or(n / 2 + 1)) {
          throw ConfigError("two-particle.second", "fermions cannot share a node");
        }
      }
      break;
    }
    case ExperimentKind::NoiseCheck:
      if (trajectories < 2) throw ConfigError("experiment.trajectories", "need at least 2 samples");
      break;
  }
  for (auto v : sweep_nu) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("sweep.nu", "values must lie in [0, 1]");
  }
  for (auto v : sweep_gamma) {
    if (!(v > 0.0)) throw ConfigError("sweep.gamma", "values must be positive");
  }
}

json ExperimentConfig::to_json() const {
  auto opt = [](const std::optional<std::size_t>& v) -> json {
    return v ? json(*v) : json("center");
  };
  json j;
  j["experiment"] = {{"kind", std::string(to_string(kind))},
                     {"seed", seed},
                     {"trajectories", trajectories},
                     {"threads", threads},
                     {"output", output},
                     {"method", std::string(to_string(method))}};
  j["graph"] = {{"type", graph_type}, {"nodes", nodes}, {"file", graph_file}};
  j["noise"] = {{"nu", nu},
                {"gamma", gamma},
                {"correlation", correlation},
                {"target", std::string(to_string(noise_target))}};
  j["time"] = {{"t_max", t_max}, {"samples", samples}};
  j["walk"] = {{"origin", opt(origin)}, {"width", width}, {"momentum", momentum}};
  j["search"] = {{"target", search_target},
                 {"coupling", coupling > 0.0 ? json(coupling) : json("auto")},
                 {"coupling_sweep", coupling_sweep},
                 {"grid_points", grid_points},
                 {"grid_span", grid_span}};
  j["scaling"] = {{"nodes", scaling_nodes}};
  j["two-particle"] = {{"statistics", std::string(to_string(statistics))},
                       {"interaction", interaction},
                       {"strength", strength},
                       {"first", opt(first)},
                       {"second", opt(second)}};
  j["sweep"] = {{"nodes", sweep_nodes}, {"nu", sweep_nu}, {"gamma", sweep_gamma}};
  return j;
}

ExperimentConfig parse_config(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", std::string("malformed config: ") + e.what());
  }
  const auto& known = schema();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError(section, "key outside of any [section]");
    }
    auto sit = known.find(section);
    if (sit == known.end()) throw ConfigError(section, "unknown section [" + section + "]");
    for (const auto& [key, value] : body) {
      if (!value.empty()) throw ConfigError(section + "." + key, "nested keys are not allowed");
      if (sit->second.find(key) == sit->second.end()) {
        throw ConfigError(section + "." + key, "unknown key");
      }
    }
  }
  const auto kind_text = tree.get_optional<std::string>("experiment.kind");
  if (!kind_text) throw ConfigError("experiment.kind", "missing (required)");
  ExperimentConfig config = defaults_for(parse_experiment_kind(trim(*kind_text)));
  for (const auto& [section, body] : tree) {
    const auto& setters = known.at(section);
    for (const auto& [key, value] : body) {
      setters.at(key)(config, section + "." + key, trim(value.data()));
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
  return parse_config(in);
}

Graph make_graph(const ExperimentConfig& c) {
  if (c.graph_type == "ring") return line_graph(c.nodes, true);
  if (c.graph_type == "line") return line_graph(c.nodes, false);
  if (c.graph_type == "complete") return complete_graph(c.nodes);
  if (c.graph_type == "star") return star_graph(c.nodes);
  if (c.graph_type == "edge-list") return load_edge_list(c.graph_file);
  throw ConfigError("graph.type", "unknown graph type '" + c.graph_type + "'");
}

std::vector<double> uniform_grid(double t_max, std::size_t samples) {
  if (samples < 2) throw std::invalid_argument("time grid needs at least two samples");
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    t[i] = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
  }
  return t;
}

namespace {

// ---------------------------------------------------------------------------
// Output

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::string& schema, const std::string& header)
      : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    out_ << "# schema=" << schema << '\n' << header << '\n';
  }
  template <class... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ",") << field(fields), first = false), ...);
    out_ << '\n';
  }
  void close() {
    out_.close();
    if (!out_) throw std::runtime_error("error while writing CSV output");
  }

 private:
  static std::string field(double v) { return num(v); }
  static std::string field(std::size_t v) { return std::to_string(v); }
  static std::string field(const std::string& v) { return v; }
  std::ofstream out_;
};

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("error while writing '" + path.string() + "'");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_manifest(const fs::path& dir, const std::string& command, const ExperimentConfig& c,
                    const RunReport& report) {
  json m;
  m["tool"] = "perqwalk";
  m["version"] = kVersion;
  m["command"] = command;
  m["config"] = c.to_json();
  m["files"] = report.files;
  m["created_utc"] = utc_timestamp();
  write_json(dir / "manifest.json", m);
}

HamiltonianSpec walk_spec(const ExperimentConfig& c, Graph g) {
  HamiltonianSpec spec;
  spec.graph = std::move(g);
  spec.coupling = 1.0;
  spec.noise = NoiseSpec{c.nu, c.gamma, c.correlation, c.noise_target, c.seed};
  return spec;
}

std::optional<json> regime_json(const std::vector<double>& t, const std::vector<double>& var) {
  try {
    const auto fit = classify_regime(t, var);
    return json{{"exponent", fit.exponent},
                {"exponent_stderr", fit.exponent_stderr},
                {"label", std::string(to_string(fit.regime))}};
  } catch (const std::invalid_argument&) {
    return std::nullopt;
  }
}

void write_variance(const fs::path& dir, const EnsembleResult& r, RunReport& report) {
  Csv csv(dir / "variance.csv", "variance/1", "t,sigma2_mean,sigma2_stderr");
  for (std::size_t i = 0; i < r.sample_times.size(); ++i) {
    csv.row(r.sample_times[i], r.variance[i], r.variance_stderr[i]);
  }
  csv.close();
  report.files.push_back("variance.csv");
}

void write_distribution(const fs::path& dir, const EnsembleResult& r, RunReport& report) {
  Csv csv(dir / "distribution.csv", "distribution/1", "k,p_k");
  const auto& p = r.distribution.back();
  for (Eigen::Index k = 0; k < p.size(); ++k) csv.row(static_cast<std::size_t>(k), p[k]);
  csv.close();
  report.files.push_back("distribution.csv");
}

RunReport run_walk(const ExperimentConfig& c, const fs::path& dir, bool packet) {
  RunReport report;
  auto g = make_graph(c);
  const std::size_t n = g.node_count();
  const std::size_t origin = c.origin.value_or(n / 2);
  if (origin >= n) throw ConfigError("walk.origin", "node outside graph");
  const auto spec = walk_spec(c, std::move(g));
  const auto psi0 = packet ? gaussian_packet(n, c.width, c.momentum) : localized_state(n, origin);

  EnsembleOptions eo;
  eo.trajectories = c.trajectories;
  eo.sample_times = uniform_grid(c.t_max, c.samples);
  eo.origin = packet ? n / 2 : origin;
  eo.threads = c.threads;
  eo.method = c.method;
  const auto r = ensemble_average(spec, psi0, eo);

  write_variance(dir, r, report);
  write_distribution(dir, r, report);

  json s;
  s["kind"] = std::string(to_string(c.kind));
  s["N"] = n;
  s["nu"] = c.nu;
  s["gamma"] = c.gamma;
  s["correlation"] = c.correlation;
  s["mean_domain_length"] =
      spec.uses_domains() ? mean_domain_length(c.correlation, spec.graph.edge_count()) : 1.0;
  s["M"] = c.trajectories;
  s["seed"] = c.seed;
  s["t_max"] = c.t_max;
  s["final_variance"] = r.variance.back();
  s["final_variance_stderr"] = r.variance_stderr.back();
  const auto regime = regime_json(r.sample_times, r.variance);
  s["regime"] = regime ? *regime : json(nullptr);

  if (packet) {
    Csv csv(dir / "displacement.csv", "displacement/1", "t,mean_displacement");
    for (std::size_t i = 0; i < r.sample_times.size(); ++i) {
      csv.row(r.sample_times[i], r.mean_displacement[i]);
    }
    csv.close();
    report.files.push_back("displacement.csv");
    // Least-squares velocity of the centroid.
    const auto& t = r.sample_times;
    const auto& x = r.mean_displacement;
    const double nt = static_cast<double>(t.size());
    double st = 0, sx = 0, stt = 0, stx = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
      st += t[i];
      sx += x[i];
      stt += t[i] * t[i];
      stx += t[i] * x[i];
    }
    s["centroid_velocity"] = (nt * stx - st * sx) / (nt * stt - st * st);
    s["width"] = c.width;
    s["momentum"] = c.momentum;
  }
  report.summary = s;
  write_json(dir / "summary.json", s);
  report.files.push_back("summary.json");
  return report;
}

SearchResult search_once(const ExperimentConfig& c, Graph g) {
  const std::size_t n = g.node_count();
  SearchProblem problem;
  problem.target = resolve_search_target(c, n);
  problem.graph = std::move(g);
  problem.coupling = c.coupling;
  problem.noise = NoiseSpec{c.nu, c.gamma, 0.0, NoiseTarget::Tunneling, c.seed};
  SearchRunOptions so;
  so.trajectories = c.trajectories;
  so.t_grid = default_search_grid(n, c.grid_points, c.grid_span);
  so.threads = c.threads;
  so.method = c.method;
  if (c.coupling_sweep) {
    return optimize_coupling(problem, so, 1.0 / static_cast<double>(n), 1.0, 10);
  }
  return run_noisy_search(problem, so);
}

json search_summary(const ExperimentConfig& c, std::size_t n, const SearchResult& r) {
  return json{{"N", n},
              {"nu", c.nu},
              {"gamma", c.gamma},
              {"J", r.coupling},
              {"t_opt", r.t_opt},
              {"p_succ", r.p_succ},
              {"p_succ_stderr", r.p_succ_stderr},
              {"T_avg", r.average_running_time},
              {"M", c.trajectories},
              {"seed", c.seed},
              {"graph", c.graph_type},
              {"target", resolve_search_target(c, n)}};
}

void write_search_curve(const fs::path& path, const SearchResult& r) {
  Csv csv(path, "search/1", "t,p_w_mean,p_w_stderr");
  for (std::size_t i = 0; i < r.t_grid.size(); ++i) csv.row(r.t_grid[i], r.p_w[i], r.p_w_stderr[i]);
  csv.close();
}

RunReport run_search(const ExperimentConfig& c, const fs::path& dir) {
  RunReport report;
  auto g = make_graph(c);
  const std::size_t n = g.node_count();
  const auto r = search_once(c, std::move(g));
  write_search_curve(dir / "search.csv", r);
  report.files.push_back("search.csv");
  report.summary = search_summary(c, n, r);
  write_json(dir / "summary.json", report.summary);
  report.files.push_back("summary.json");
  return report;
}

RunReport run_scaling(const ExperimentConfig& c, const fs::path& dir) {
  RunReport report;
  std::vector<double> sizes;
  std::vector<double> times;
  json rows = json::array();
  Csv table(dir / "scaling.csv", "scaling/1", "N,J,t_opt,p_succ,p_succ_stderr,T_avg");
  for (auto n : c.scaling_nodes) {
    ExperimentConfig point = c;
    point.nodes = n;
    const auto r = search_once(point, make_graph(point));
    const std::string name = "search_N" + std::to_string(n) + ".csv";
    write_search_curve(dir / name, r);
    report.files.push_back(name);
    table.row(n, r.coupling, r.t_opt, r.p_succ, r.p_succ_stderr, r.average_running_time);
    rows.push_back(search_summary(point, n, r));
    sizes.push_back(static_cast<double>(n));
    times.push_back(r.average_running_time);
  }
  table.close();
  report.files.push_back("scaling.csv");
  json s;
  s["kind"] = "scaling-sweep";
  s["graph"] = c.graph_type;
  s["nu"] = c.nu;
  s["gamma"] = c.gamma;
  s["M"] = c.trajectories;
  s["seed"] = c.seed;
  s["points"] = rows;
  try {
    const auto fit = scaling_exponent(sizes, times);
    s["slope"] = fit.slope;
    s["slope_stderr"] = fit.slope_stderr;
  } catch (const std::invalid_argument&) {
    s["slope"] = nullptr;
    s["slope_stderr"] = nullptr;
  }
  report.summary = s;
  write_json(dir / "summary.json", s);
  report.files.push_back("summary.json");
  return report;
}

RunReport run_two_particle(const ExperimentConfig& c, const fs::path& dir) {
  RunReport report;
  auto g = make_graph(c);
  const std::size_t n = g.node_count();
  if (n > 64) throw ConfigError("graph.nodes", "two-particle runs support at most 64 nodes");
  const std::size_t a = c.first.value_or(n / 2);
  const std::size_t b =
      c.second.value_or(c.statistics == Statistics::Fermionic ? (n / 2 + 1) % n : n / 2);
  if (a >= n || b >= n) throw ConfigError("two-particle.first", "node outside graph");
  const auto spec = walk_spec(c, std::move(g));
  const auto interaction = make_interaction(c);
  TwoParticleState psi0;
  try {
    psi0 = symmetrize(
        TwoParticleState::product(localized_state(n, a), localized_state(n, b), c.statistics));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("two-particle.second", e.what());
  }
  EnsembleOptions eo;
  eo.trajectories = c.trajectories;
  eo.sample_times = uniform_grid(c.t_max, c.samples);
  eo.threads = c.threads;
  eo.method = c.method;
  const auto r = ensemble_two_particle(spec, interaction, psi0, eo);

  {
    Csv csv(dir / "joint.csv", "joint/1", "j,k,p_jk");
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        csv.row(j, k, r.joint_final(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
      }
    }
    csv.close();
    report.files.push_back("joint.csv");
  }
  {
    Csv csv(dir / "marginals.csv", "marginals/1", "k,p1_k,p2_k");
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      csv.row(k, r.marginal_first.back()[i], r.marginal_second.back()[i]);
    }
    csv.close();
    report.files.push_back("marginals.csv");
  }
  {
    Csv csv(dir / "pair.csv", "pair/1", "t,diagonal_mass_mean,diagonal_mass_stderr,mean_distance");
    for (std::size_t i = 0; i < r.sample_times.size(); ++i) {
      csv.row(r.sample_times[i], r.diagonal_mass[i], r.diagonal_mass_stderr[i], r.mean_distance[i]);
    }
    csv.close();
    report.files.push_back("pair.csv");
  }
  json s;
  s["kind"] = "two-particle";
  s["N"] = n;
  s["nu"] = c.nu;
  s["gamma"] = c.gamma;
  s["statistics"] = std::string(to_string(c.statistics));
  s["interaction"] = c.interaction;
  s["strength"] = c.strength;
  s["first"] = a;
  s["second"] = b;
  s["M"] = c.trajectories;
  s["seed"] = c.seed;
  s["final_diagonal_mass"] = r.diagonal_mass.back();
  s["final_diagonal_mass_stderr"] = r.diagonal_mass_stderr.back();
  s["final_mean_distance"] = r.mean_distance.back();
  report.summary = s;
  write_json(dir / "summary.json", s);
  report.files.push_back("summary.json");
  return report;
}

RunReport run_noise_check(const ExperimentConfig& c, const fs::path& dir) {
  RunReport report;
  const auto grid = uniform_grid(c.t_max, c.samples);
  const auto st = estimate_rtn_statistics(c.gamma, grid, c.trajectories, c.seed);
  Csv csv(dir / "autocorrelation.csv", "autocorrelation/1", "t,c_mean,c_stderr,c_exact");
  double worst_z = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double exact = std::exp(-2.0 * c.gamma * grid[i]);
    csv.row(grid[i], st.autocorrelation[i], st.autocorrelation_stderr[i], exact);
    if (st.autocorrelation_stderr[i] > 0.0) {
      worst_z = std::max(worst_z,
                         std::abs(st.autocorrelation[i] - exact) / st.autocorrelation_stderr[i]);
    }
  }
  csv.close();
  report.files.push_back("autocorrelation.csv");
  const double expected = c.gamma * st.horizon;
  json s;
  s["kind"] = "noise-check";
  s["gamma"] = c.gamma;
  s["horizon"] = st.horizon;
  s["samples"] = st.samples;
  s["seed"] = c.seed;
  s["switch_count_mean"] = st.switch_count_mean;
  s["switch_count_expected"] = expected;
  s["switch_count_variance"] = st.switch_count_variance;
  s["switch_count_z"] =
      (st.switch_count_mean - expected) / std::sqrt(expected / static_cast<double>(st.samples));
  s["autocorrelation_max_z"] = worst_z;
  report.summary = s;
  write_json(dir / "summary.json", s);
  report.files.push_back("summary.json");
  return report;
}

RunReport dispatch(const ExperimentConfig& c, const fs::path& dir) {
  switch (c.kind) {
    case ExperimentKind::LineSpread: return run_walk(c, dir, false);
    case ExperimentKind::Wavepacket: return run_walk(c, dir, true);
    case ExperimentKind::Search: return run_search(c, dir);
    case ExperimentKind::ScalingSweep: return run_scaling(c, dir);
    case ExperimentKind::TwoParticle: return run_two_particle(c, dir);
    case ExperimentKind::NoiseCheck: return run_noise_check(c, dir);
  }
  throw std::logic_error("unhandled experiment kind");
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "': " +
                                   ec.message());
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, const fs::path& outdir) {
  config.validate();
  prepare_dir(outdir);
  auto report = dispatch(config, outdir);
  write_manifest(outdir, "run", config, report);
  return report;
}

RunReport run_sweep(const ExperimentConfig& config, const fs::path& outdir) {
  config.validate();
  if (config.kind == ExperimentKind::ScalingSweep) {
    throw ConfigError("experiment.kind", "scaling-sweep is already a sweep; use run");
  }
  if (config.sweep_nodes.empty() && config.sweep_nu.empty() && config.sweep_gamma.empty()) {
    throw ConfigError("sweep", "declare at least one axis (nodes, nu or gamma)");
  }
  if (!config.sweep_nodes.empty() && config.graph_type == "edge-list") {
    throw ConfigError("sweep.nodes", "cannot vary the size of an edge-list graph");
  }
  const auto nodes = config.sweep_nodes.empty() ? std::vector<std::size_t>{config.nodes}
                                                : config.sweep_nodes;
  const auto nus = config.sweep_nu.empty() ? std::vector<double>{config.nu} : config.sweep_nu;
  const auto gammas =
      config.sweep_gamma.empty() ? std::vector<double>{config.gamma} : config.sweep_gamma;

  std::vector<ExperimentConfig> points;
  for (auto n : nodes) {
    for (double nu : nus) {
      for (double gamma : gammas) {
        ExperimentConfig p = config;
        p.nodes = n;
        p.nu = nu;
        p.gamma = gamma;
        p.sweep_nodes.clear();
        p.sweep_nu.clear();
        p.sweep_gamma.clear();
        p.validate();
        points.push_back(std::move(p));
      }
    }
  }

  prepare_dir(outdir);
  RunReport report;
  json rows = json::array();
  Csv table(outdir / "sweep.csv", "sweep/1", "point,N,nu,gamma,metric,value");
  for (std::size_t i = 0; i < points.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "point_%03zu", i);
    const auto sub = run_experiment(points[i], outdir / name);
    for (const auto& f : sub.files) report.files.push_back(std::string(name) + "/" + f);
    report.files.push_back(std::string(name) + "/manifest.json");
    json row = {{"point", name},
                {"N", points[i].nodes},
                {"nu", points[i].nu},
                {"gamma", points[i].gamma},
                {"summary", sub.summary}};
    // One long-format line per scalar metric keeps the table schema fixed
    // across experiment kinds.
    for (const auto& [key, value] : sub.summary.items()) {
      if (value.is_number()) {
        table.row(std::string(name), points[i].nodes, points[i].nu, points[i].gamma, key,
                  value.get<double>());
      } else if (key == "regime" && value.is_object()) {
        table.row(std::string(name), points[i].nodes, points[i].nu, points[i].gamma,
                  std::string("regime_exponent"), value["exponent"].get<double>());
      }
    }
    rows.push_back(row);
  }
  table.close();
  report.files.push_back("sweep.csv");

  json fits = json::array();
  if (config.kind == ExperimentKind::Search && nodes.size() >= 3) {
    Csv fcsv(outdir / "sweep_fits.csv", "sweep_fits/1", "nu,gamma,slope,slope_stderr");
    for (double nu : nus) {
      for (double gamma : gammas) {
        std::vector<double> xs;
        std::vector<double> ys;
        for (const auto& row : rows) {
          if (row["nu"].get<double>() == nu && row["gamma"].get<double>() == gamma) {
            xs.push_back(row["N"].get<double>());
            ys.push_back(row["summary"]["T_avg"].get<double>());
          }
        }
        try {
          const auto fit = scaling_exponent(xs, ys);
          fcsv.row(nu, gamma, fit.slope, fit.slope_stderr);
          fits.push_back({{"nu", nu}, {"gamma", gamma}, {"slope", fit.slope},
                          {"slope_stderr", fit.slope_stderr}});
        } catch (const std::invalid_argument&) {
          fits.push_back({{"nu", nu}, {"gamma", gamma}, {"slope", nullptr}});
        }
      }
    }
    fcsv.close();
    report.files.push_back("sweep_fits.csv");
  }
  report.summary = {{"kind", std::string(to_string(config.kind))},
                    {"points", rows},
                    {"fits", fits}};
  write_json(outdir / "sweep.json", report.summary);
  report.files.push_back("sweep.json");
  write_manifest(outdir, "sweep", config, report);
  return report;
}

}  // namespace perqwalk
