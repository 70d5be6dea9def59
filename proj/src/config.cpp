#include "poropinn/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "poropinn/errors.hpp"

namespace poropinn {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_integer(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(fmt::format("{}: expected an integer, got '{}'", key, value));
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, value));
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError(fmt::format("{}: expected true or false, got '{}'", key, value));
}

struct KeyHandler {
  std::string key;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

std::string real(double v) { return fmt::format("{:.17g}", v); }

template <typename T, typename Field>
KeyHandler integer_key(std::string key, Field field) {
  return {key, [key, field](RunConfig& c, const std::string& v) { field(c) = parse_integer<T>(key, v); },
          [field](const RunConfig& c) { return std::to_string(field(c)); }};
}

template <typename Field>
KeyHandler real_key(std::string key, Field field) {
  return {key, [key, field](RunConfig& c, const std::string& v) { field(c) = parse_real(key, v); },
          [field](const RunConfig& c) { return real(field(c)); }};
}

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = [] {
    std::vector<KeyHandler> t;
    t.push_back(integer_key<std::uint64_t>("seed", [](auto& c) -> auto& { return c.train.seed; }));
    t.push_back(integer_key<int>("grid.nx", [](auto& c) -> auto& { return c.train.grid.nx; }));
    t.push_back(integer_key<int>("grid.nz", [](auto& c) -> auto& { return c.train.grid.nz; }));
    t.push_back(integer_key<int>("grid.nt", [](auto& c) -> auto& { return c.train.grid.nt; }));
    t.push_back(integer_key<int>("net.hidden_layers", [](auto& c) -> auto& { return c.train.net.hidden_layers; }));
    t.push_back(integer_key<int>("net.hidden_units", [](auto& c) -> auto& { return c.train.net.hidden_units; }));
    t.push_back(integer_key<int>("train.epochs", [](auto& c) -> auto& { return c.train.epochs; }));
    t.push_back(integer_key<std::size_t>("train.batch_size", [](auto& c) -> auto& { return c.train.batch_size; }));
    t.push_back(real_key("train.learning_rate", [](auto& c) -> auto& { return c.train.learning_rate; }));
    t.push_back(integer_key<std::size_t>("train.colloc_total", [](auto& c) -> auto& { return c.train.colloc_total; }));
    t.push_back(real_key("adam.beta1", [](auto& c) -> auto& { return c.train.adam.beta1; }));
    t.push_back(real_key("adam.beta2", [](auto& c) -> auto& { return c.train.adam.beta2; }));
    t.push_back(real_key("adam.epsilon", [](auto& c) -> auto& { return c.train.adam.epsilon; }));
    t.push_back(integer_key<int>("curriculum.n_intervals", [](auto& c) -> auto& { return c.curriculum.n_intervals; }));
    t.push_back(integer_key<int>("curriculum.epochs_per_interval",
                                 [](auto& c) -> auto& { return c.curriculum.epochs_per_interval; }));
    t.push_back({"curriculum.mode",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "incremental") c.curriculum.mode = CurriculumMode::kIncremental;
                   else if (v == "cumulative") c.curriculum.mode = CurriculumMode::kCumulative;
                   else throw ConfigError("curriculum.mode: expected incremental or cumulative, got '" + v + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.curriculum.mode == CurriculumMode::kIncremental ? "incremental" : "cumulative");
                 }});
    t.push_back(integer_key<std::size_t>("curriculum.ic_subsample",
                                         [](auto& c) -> auto& { return c.curriculum.ic_subsample; }));
    t.push_back(real_key("solution.alpha", [](auto& c) -> auto& { return c.train.solution.alpha; }));
    t.push_back(real_key("solution.beta", [](auto& c) -> auto& { return c.train.solution.beta; }));
    t.push_back(real_key("solution.delta", [](auto& c) -> auto& { return c.train.solution.delta; }));
    t.push_back(real_key("solution.eps", [](auto& c) -> auto& { return c.train.solution.eps; }));
    t.push_back(real_key("solution.zeta", [](auto& c) -> auto& { return c.train.solution.zeta; }));
    t.push_back(real_key("solution.eta", [](auto& c) -> auto& { return c.train.solution.eta; }));
    t.push_back({"sampling.lhs_jitter",
                 [](RunConfig& c, const std::string& v) {
                   if (v == "uniform") c.train.lhs_jitter = LhsJitter::kUniform;
                   else if (v == "centered") c.train.lhs_jitter = LhsJitter::kCentered;
                   else throw ConfigError("sampling.lhs_jitter: expected uniform or centered, got '" + v + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.train.lhs_jitter == LhsJitter::kUniform ? "uniform" : "centered");
                 }});
    t.push_back({"log.wall_clock",
                 [](RunConfig& c, const std::string& v) { c.train.record_wall_clock = parse_bool("log.wall_clock", v); },
                 [](const RunConfig& c) { return std::string(c.train.record_wall_clock ? "true" : "false"); }});
    t.push_back({"output.dir", [](RunConfig& c, const std::string& v) { c.output_dir = v; },
                 [](const RunConfig& c) { return c.output_dir; }});
    t.push_back(real_key("eval.slice_t", [](auto& c) -> auto& { return c.slice_t; }));
    t.push_back(real_key("eval.profile_x", [](auto& c) -> auto& { return c.profile_x; }));
    t.push_back(integer_key<int>("eval.slice_nx", [](auto& c) -> auto& { return c.slice_nx; }));
    t.push_back(integer_key<int>("eval.slice_nz", [](auto& c) -> auto& { return c.slice_nz; }));
    t.push_back(integer_key<int>("eval.profile_nz", [](auto& c) -> auto& { return c.profile_nz; }));
    return t;
  }();
  return table;
}

}  // namespace

void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& h : handlers()) {
    if (h.key == key) {
      h.set(cfg, value);
      return;
    }
  }
  throw ConfigError("unknown config key '" + key + "'");
}

RunConfig parse_config(std::istream& is) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(fmt::format("line {}: expected 'key = value', got '{}'", line_no, line));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ConfigError(fmt::format("line {}: duplicate key '{}'", line_no, key));
    try {
      set_config_value(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config file '" + path + "'");
  return parse_config(is);
}

std::string echo_config(const RunConfig& cfg) {
  std::ostringstream os;
  for (const auto& h : handlers()) os << h.key << " = " << h.get(cfg) << '\n';
  return os.str();
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& h : handlers()) keys.push_back(h.key);
  return keys;
}

void validate(const RunConfig& cfg, bool curriculum) {
  if (cfg.train.net.hidden_layers < 1) throw ConfigError("net.hidden_layers must be at least 1");
  if (cfg.train.net.hidden_units < 1) throw ConfigError("net.hidden_units must be at least 1");
  if (cfg.slice_nx < 2 || cfg.slice_nz < 2 || cfg.profile_nz < 2) {
    throw ConfigError("eval grid sizes must be at least 2");
  }
  try {
    validate(train_config_for(cfg, curriculum));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

TrainConfig train_config_for(const RunConfig& cfg, bool curriculum) {
  TrainConfig out = cfg.train;
  if (curriculum) {
    out.curriculum = cfg.curriculum;
  } else {
    out.curriculum.reset();
  }
  return out;
}

}  // namespace poropinn
