#pragma once

#include "dynsen/dictionary.hpp"
#include "dynsen/filters.hpp"
#include "dynsen/graph.hpp"
#include "dynsen/placement.hpp"

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynsen {

enum class Scenario { synthetic_bl, synthetic_pc, real_data };

enum class Method { dynamic, dynamic_pinf, static1, static2 };

inline std::string method_name(Method m) {
  switch (m) {
    case Method::dynamic: return "dynamic";
    case Method::dynamic_pinf: return "dynamic-pinf";
    case Method::static1: return "static1";
    case Method::static2: return "static2";
  }
  throw std::logic_error("method_name: unknown method");
}

inline Method parse_method(const std::string& s) {
  if (s == "dynamic") return Method::dynamic;
  if (s == "dynamic-pinf") return Method::dynamic_pinf;
  if (s == "static1") return Method::static1;
  if (s == "static2") return Method::static2;
  throw std::invalid_argument("unknown method: " + s);
}

/// Resolved experiment configuration. Construct via defaults_for() and apply
/// overrides from a key/value file; echo() writes a snapshot that parses back
/// to the identical configuration.
struct ExperimentConfig {
  Scenario scenario = Scenario::synthetic_bl;

  int graph_nodes = 256;
  int graph_knn = 6;

  int bandwidth = 16;            // bandlimited model width
  int clusters = 3;              // piecewise-constant cluster count
  double sampling_period = std::numbers::pi / 30.0;
  double noise_variance = 0.1;

  std::string data_path;         // measurement table; empty selects the bundled stand-in
  int data_nodes = 100;          // nodes sampled from the table

  int window = 20;               // signals kept for learning (D)
  int n_train = 20;
  int n_test = 20;

  int sensor_count = 8;

  FilterKind filter_kind = FilterKind::lowpass_cosine;
  int chebyshev_order = 20;

  LearnerParams learning;

  int hop_limit = 1;
  bool parallel_relocation = false;

  std::vector<Method> methods = {Method::dynamic, Method::static1, Method::static2};
  int replicates = 50;
  std::uint64_t seed = 1;

  std::vector<int> sweep_k = {5, 10, 20};

  static ExperimentConfig defaults_for(Scenario scenario) {
    ExperimentConfig c;
    c.scenario = scenario;
    if (scenario == Scenario::real_data) {
      c.graph_knn = 5;
      c.window = 5;
      c.n_train = 5;
      c.n_test = 55;
      c.sensor_count = 10;
      c.learning.gamma = 1e-3;
      c.learning.eta = 1.0;
      c.replicates = 10;
    }
    return c;
  }

  void validate() const {
    if (graph_nodes < 2) throw std::invalid_argument("config: graph.nodes must be at least 2");
    if (graph_knn < 1) throw std::invalid_argument("config: graph.knn must be positive");
    if (bandwidth < 1) throw std::invalid_argument("config: bandwidth must be positive");
    if (clusters != 3) throw std::invalid_argument("config: clusters must be 3");
    if (!(sampling_period > 0.0)) throw std::invalid_argument("config: sampling_period must be positive");
    if (noise_variance < 0.0) throw std::invalid_argument("config: noise_variance must be nonnegative");
    if (window < 1) throw std::invalid_argument("config: window must be positive");
    if (n_train < window) throw std::invalid_argument("config: horizon.train must be at least window");
    if (n_test < 1) throw std::invalid_argument("config: horizon.test must be positive");
    if (sensor_count < 1) throw std::invalid_argument("config: sensors.count must be positive");
    const int n = scenario == Scenario::real_data ? data_nodes : graph_nodes;
    if (sensor_count > n) throw std::invalid_argument("config: sensors.count exceeds node count");
    if (chebyshev_order < 0) throw std::invalid_argument("config: filter.chebyshev_order must be nonnegative");
    if (hop_limit < 0) throw std::invalid_argument("config: placement.hop_limit must be nonnegative");
    if (methods.empty()) throw std::invalid_argument("config: methods must be nonempty");
    if (replicates < 1) throw std::invalid_argument("config: replicates must be positive");
    if (scenario == Scenario::real_data && data_nodes < 2)
      throw std::invalid_argument("config: data.nodes must be at least 2");
    for (int k : sweep_k)
      if (k < 1 || k > n) throw std::invalid_argument("config: sweep.k entry out of range");
    learning.validate();
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

inline int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer for " + key + ": '" + value + "'");
  }
}

inline double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad number for " + key + ": '" + value + "'");
  }
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": '" + value + "'");
}

inline std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad seed for " + key + ": '" + value + "'");
  }
}

}  // namespace detail

/// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
/// Later duplicates win.
inline std::map<std::string, std::string> parse_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(line_no) + " is not 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw std::invalid_argument("config: empty key on line " + std::to_string(line_no));
    kv[key] = value;
  }
  return kv;
}

/// Applies file overrides onto a config. Unknown keys are an error so typos
/// cannot silently fall back to defaults.
inline void apply_overrides(ExperimentConfig& config, const std::map<std::string, std::string>& kv) {
  using namespace detail;
  for (const auto& [key, value] : kv) {
    if (key == "model") {
      if (value == "bl") config.scenario = Scenario::synthetic_bl;
      else if (value == "pc") config.scenario = Scenario::synthetic_pc;
      else if (value == "real") config.scenario = Scenario::real_data;
      else throw std::invalid_argument("config: unknown model '" + value + "'");
    } else if (key == "bandwidth") {
      config.bandwidth = parse_int(key, value);
    } else if (key == "clusters") {
      config.clusters = parse_int(key, value);
    } else if (key == "sampling_period") {
      config.sampling_period = parse_double(key, value);
    } else if (key == "noise_variance") {
      config.noise_variance = parse_double(key, value);
    } else if (key == "graph.nodes") {
      config.graph_nodes = parse_int(key, value);
    } else if (key == "graph.knn") {
      config.graph_knn = parse_int(key, value);
    } else if (key == "data.path") {
      config.data_path = value;
    } else if (key == "data.nodes") {
      config.data_nodes = parse_int(key, value);
    } else if (key == "window") {
      config.window = parse_int(key, value);
    } else if (key == "horizon.train") {
      config.n_train = parse_int(key, value);
    } else if (key == "horizon.test") {
      config.n_test = parse_int(key, value);
    } else if (key == "sensors.count") {
      config.sensor_count = parse_int(key, value);
    } else if (key == "filter.kind") {
      if (value == "identity") config.filter_kind = FilterKind::identity;
      else if (value == "lowpass_cosine") config.filter_kind = FilterKind::lowpass_cosine;
      else throw std::invalid_argument("config: unknown filter.kind '" + value + "'");
    } else if (key == "filter.chebyshev_order") {
      config.chebyshev_order = parse_int(key, value);
    } else if (key == "learning.mu") {
      config.learning.mu = parse_double(key, value);
    } else if (key == "learning.eta") {
      config.learning.eta = parse_double(key, value);
    } else if (key == "learning.gamma") {
      config.learning.gamma = parse_double(key, value);
    } else if (key == "learning.epsilon") {
      config.learning.epsilon = parse_double(key, value);
    } else if (key == "learning.max_iters") {
      config.learning.max_iters = parse_int(key, value);
    } else if (key == "placement.hop_limit") {
      if (value == "inf") config.hop_limit = kInfiniteHops;
      else config.hop_limit = parse_int(key, value);
    } else if (key == "placement.parallel") {
      config.parallel_relocation = parse_bool(key, value);
    } else if (key == "methods") {
      config.methods.clear();
      for (const auto& name : split_list(value)) config.methods.push_back(parse_method(name));
    } else if (key == "replicates") {
      config.replicates = parse_int(key, value);
    } else if (key == "seed") {
      config.seed = parse_seed(key, value);
    } else if (key == "sweep.k") {
      config.sweep_k.clear();
      for (const auto& item : split_list(value)) config.sweep_k.push_back(parse_int(key, item));
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
}

inline void apply_overrides_file(ExperimentConfig& config, const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("config: cannot open " + path);
  apply_overrides(config, parse_key_values(is));
}

/// Writes the resolved configuration as `key = value` lines. Reading the
/// output back through apply_overrides reproduces the configuration exactly.
inline void echo_config(const ExperimentConfig& config, std::ostream& os) {
  const auto num = [](double v) { return detail::format_double(v); };
  os << "model = "
     << (config.scenario == Scenario::synthetic_bl
             ? "bl"
             : config.scenario == Scenario::synthetic_pc ? "pc" : "real")
     << "\n";
  os << "bandwidth = " << config.bandwidth << "\n";
  os << "clusters = " << config.clusters << "\n";
  os << "sampling_period = " << num(config.sampling_period) << "\n";
  os << "noise_variance = " << num(config.noise_variance) << "\n";
  os << "graph.nodes = " << config.graph_nodes << "\n";
  os << "graph.knn = " << config.graph_knn << "\n";
  os << "data.path = " << config.data_path << "\n";
  os << "data.nodes = " << config.data_nodes << "\n";
  os << "window = " << config.window << "\n";
  os << "horizon.train = " << config.n_train << "\n";
  os << "horizon.test = " << config.n_test << "\n";
  os << "sensors.count = " << config.sensor_count << "\n";
  os << "filter.kind = "
     << (config.filter_kind == FilterKind::identity ? "identity" : "lowpass_cosine") << "\n";
  os << "filter.chebyshev_order = " << config.chebyshev_order << "\n";
  os << "learning.mu = " << num(config.learning.mu) << "\n";
  os << "learning.eta = " << num(config.learning.eta) << "\n";
  os << "learning.gamma = " << num(config.learning.gamma) << "\n";
  os << "learning.epsilon = " << num(config.learning.epsilon) << "\n";
  os << "learning.max_iters = " << config.learning.max_iters << "\n";
  if (config.hop_limit == kInfiniteHops) {
    os << "placement.hop_limit = inf\n";
  } else {
    os << "placement.hop_limit = " << config.hop_limit << "\n";
  }
  os << "placement.parallel = " << (config.parallel_relocation ? "true" : "false") << "\n";
  os << "methods = ";
  for (std::size_t i = 0; i < config.methods.size(); ++i) {
    if (i) os << ",";
    os << method_name(config.methods[i]);
  }
  os << "\n";
  os << "replicates = " << config.replicates << "\n";
  os << "seed = " << config.seed << "\n";
  os << "sweep.k = ";
  for (std::size_t i = 0; i < config.sweep_k.size(); ++i) {
    if (i) os << ",";
    os << config.sweep_k[i];
  }
  os << "\n";
}

}  // namespace dynsen
