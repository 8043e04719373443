#include "abelconv/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "abelconv/activation.hpp"
#include "abelconv/errors.hpp"
#include "abelconv/rng.hpp"

#ifndef ABELCONV_GIT_DESCRIBE
#define ABELCONV_GIT_DESCRIBE "unknown"
#endif

namespace abelconv {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view want) {
  throw InvalidConfigError(std::string(key), "invalid value '" + std::string(value) + "' for " +
                                                 std::string(key) + ": expected " +
                                                 std::string(want));
}

long long parse_integer(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (...) {
    bad_value(key, text, "an integer");
  }
  if (used != s.size()) bad_value(key, text, "an integer");
  return v;
}

double parse_real(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (...) {
    bad_value(key, text, "a number");
  }
  if (used != s.size() || !std::isfinite(v)) bad_value(key, text, "a finite number");
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  bad_value(key, text, "true or false");
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text) {
  std::string s = trim(text);
  if (!s.empty() && s.front() == '[') {
    if (s.back() != ']') bad_value(key, text, "a list like [1, 2, 3]");
    s = s.substr(1, s.size() - 2);
  }
  std::vector<int> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');) {
    if (trim(item).empty()) bad_value(key, text, "a list of integers");
    const long long v = parse_integer(key, item);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) {
      bad_value(key, text, "integers in int range");
    }
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) bad_value(key, text, "a non-empty list");
  return out;
}

std::string format_list(const std::vector<int>& v) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string format_scale(const StepScale& s) {
  switch (s.mode) {
    case StepScale::Mode::standard: return "none";
    case StepScale::Mode::oracle: return "oracle";
    case StepScale::Mode::fixed: return format_real(s.value);
  }
  return "none";
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "group",       "widths",     "n",          "offset_policy", "activation",
      "layer_init",  "input",      "band_a",     "band_b",        "c_w",
      "delta",       "a_override", "trials",     "seed",          "probes",
      "samples",     "exact_frobenius_max_n0",   "experiment",    "sweep_groups",
      "sweep_kind",  "output_dir", "format",     "dense",         "dense_cap"};
  return keys;
}

namespace {

void assign(RunConfig& c, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "group") c.group = parse_int_list(key, value);
  else if (key == "widths") c.widths = parse_int_list(key, value);
  else if (key == "n") c.n = parse_int_list(key, value);
  else if (key == "offset_policy") c.offset_policy = offset_policy_from_name(value);
  else if (key == "activation") {
    c.activation = std::string(Activation::from_name(value).name());
  } else if (key == "layer_init") {
    if (value != "gaussian" && value != "identity") bad_value(key, value, "gaussian or identity");
    c.layer_init = value;
  } else if (key == "input") {
    if (value != "zero") signal_kind_from_name(value);
    c.input = value == "uniform" ? "bounded-uniform" : value;
  } else if (key == "band_a") c.band_a = parse_real(key, value);
  else if (key == "band_b") c.band_b = parse_real(key, value);
  else if (key == "c_w") c.c_w = parse_real(key, value);
  else if (key == "delta") c.delta = parse_real(key, value);
  else if (key == "a_override") {
    if (value == "none" || value.empty()) c.step_scale = StepScale::standard();
    else if (value == "oracle") c.step_scale = StepScale::oracle();
    else c.step_scale = StepScale::fixed(parse_real(key, value));
  } else if (key == "trials") c.trials = static_cast<int>(parse_integer(key, value));
  else if (key == "seed") {
    const long long v = parse_integer(key, value);
    if (v < 0) bad_value(key, value, "a non-negative integer");
    c.seed = static_cast<std::uint64_t>(v);
  } else if (key == "probes") c.probes = static_cast<int>(parse_integer(key, value));
  else if (key == "samples") c.samples = static_cast<int>(parse_integer(key, value));
  else if (key == "exact_frobenius_max_n0") {
    const long long v = parse_integer(key, value);
    if (v < 0) bad_value(key, value, "a non-negative integer");
    c.exact_frobenius_max_n0 = static_cast<std::size_t>(v);
  } else if (key == "experiment") c.experiment = value;
  else if (key == "sweep_groups") c.sweep_groups = parse_int_list(key, value);
  else if (key == "sweep_kind") c.sweep_kind = value;
  else if (key == "output_dir") c.output_dir = value;
  else if (key == "format") c.format = value;
  else if (key == "dense") c.dense = parse_bool(key, value);
  else if (key == "dense_cap") {
    const long long v = parse_integer(key, value);
    if (v < 1) bad_value(key, value, "a positive integer");
    c.dense_cap = static_cast<std::size_t>(v);
  } else {
    throw InvalidConfigError(std::string(key), "unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace

void set_config_value(RunConfig& c, std::string_view key, std::string_view raw) {
  try {
    assign(c, key, raw);
  } catch (const InvalidConfigError& e) {
    if (e.field() == key) throw;
    throw InvalidConfigError(std::string(key), e.what());
  }
}

void apply_config_text(RunConfig& config, std::string_view text) {
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfigError("line " + std::to_string(line_no),
                               "expected 'key = value' on line " + std::to_string(line_no));
    }
    set_config_value(config, trim(std::string_view(line).substr(0, eq)),
                     std::string_view(line).substr(eq + 1));
  }
}

void validate(const RunConfig& c) {
  const GroupSpec spec(c.group);
  if (c.widths.size() < 2) throw InvalidConfigError("widths", "widths needs d_0..d_t with t >= 1");
  for (const int d : c.widths)
    if (d < 1) throw InvalidConfigError("widths", "widths must be >= 1");
  const std::size_t depth = c.widths.size() - 1;
  if (c.n.size() != 1 && c.n.size() != depth) {
    throw InvalidConfigError("n", "n needs one entry or one per layer (" + std::to_string(depth) + ")");
  }
  for (const int n : c.n) {
    if (n < 1 || static_cast<std::size_t>(n) > spec.order()) {
      throw InvalidConfigError("n", "n = " + std::to_string(n) + " must be in [1, |G| = " +
                                        std::to_string(spec.order()) + "]");
    }
  }
  if (!(c.band_a < c.band_b)) throw InvalidConfigError("band_a", "band requires band_a < band_b");
  if (!(c.c_w > 0)) throw InvalidConfigError("c_w", "c_w must be positive");
  if (!(c.delta > 0)) throw InvalidConfigError("delta", "delta must be positive");
  if (c.step_scale.mode == StepScale::Mode::fixed && !(c.step_scale.value > 0)) {
    throw InvalidConfigError("a_override", "a_override must be positive");
  }
  if (c.trials < 1) throw InvalidConfigError("trials", "trials must be >= 1");
  if (c.probes < 1) throw InvalidConfigError("probes", "probes must be >= 1");
  if (c.samples < 0) throw InvalidConfigError("samples", "samples must be >= 0");
  if (c.layer_init == "identity" && c.widths[0] != c.widths[1]) {
    throw InvalidConfigError("layer_init", "identity layers need widths[0] == widths[1]");
  }
  static const std::vector<std::string> experiments{"spectrum", "gradient", "output",
                                                    "robustness", "attack", "minf_sweep",
                                                    "all"};
  if (std::find(experiments.begin(), experiments.end(), c.experiment) == experiments.end()) {
    throw InvalidConfigError("experiment", "unknown experiment '" + c.experiment + "'");
  }
  for (const int m : c.sweep_groups) {
    if (m < 1) throw InvalidConfigError("sweep_groups", "sweep group orders must be >= 1");
    for (const int n : c.n) {
      if (n > m) {
        throw InvalidConfigError("sweep_groups", "n = " + std::to_string(n) +
                                                     " exceeds sweep group order " + std::to_string(m));
      }
    }
  }
  if (c.sweep_kind != "attack" && c.sweep_kind != "minf") {
    throw InvalidConfigError("sweep_kind", "sweep_kind must be attack or minf");
  }
  if (c.format != "csv" && c.format != "json" && c.format != "both") {
    throw InvalidConfigError("format", "format must be csv, json or both");
  }
  if (c.output_dir.empty()) throw InvalidConfigError("output_dir", "output_dir must not be empty");
}

RunConfig parse_and_validate(const std::string& config_path,
                             const std::vector<std::pair<std::string, std::string>>& overrides,
                             RunConfig defaults) {
  RunConfig config = std::move(defaults);
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw InvalidConfigError("config", "cannot read config file '" + config_path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    apply_config_text(config, buffer.str());
  }
  for (const auto& [key, value] : overrides) set_config_value(config, key, value);
  validate(config);
  return config;
}

std::string to_text(const RunConfig& c) {
  std::ostringstream os;
  os << "group = " << format_list(c.group) << '\n'
     << "widths = " << format_list(c.widths) << '\n'
     << "n = " << format_list(c.n) << '\n'
     << "offset_policy = " << offset_policy_name(c.offset_policy) << '\n'
     << "activation = " << c.activation << '\n'
     << "layer_init = " << c.layer_init << '\n'
     << "input = " << c.input << '\n'
     << "band_a = " << format_real(c.band_a) << '\n'
     << "band_b = " << format_real(c.band_b) << '\n'
     << "c_w = " << format_real(c.c_w) << '\n'
     << "delta = " << format_real(c.delta) << '\n'
     << "a_override = " << format_scale(c.step_scale) << '\n'
     << "trials = " << c.trials << '\n'
     << "seed = " << c.seed << '\n'
     << "probes = " << c.probes << '\n'
     << "samples = " << c.samples << '\n'
     << "exact_frobenius_max_n0 = " << c.exact_frobenius_max_n0 << '\n'
     << "experiment = " << c.experiment << '\n'
     << "sweep_groups = " << format_list(c.sweep_groups) << '\n'
     << "sweep_kind = " << c.sweep_kind << '\n'
     << "output_dir = " << c.output_dir << '\n'
     << "format = " << c.format << '\n'
     << "dense = " << (c.dense ? "true" : "false") << '\n'
     << "dense_cap = " << c.dense_cap << '\n';
  return os.str();
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["group"] = c.group;
  j["widths"] = c.widths;
  j["n"] = c.n;
  j["offset_policy"] = offset_policy_name(c.offset_policy);
  j["activation"] = c.activation;
  j["layer_init"] = c.layer_init;
  j["input"] = c.input;
  j["band_a"] = c.band_a;
  j["band_b"] = c.band_b;
  j["c_w"] = c.c_w;
  j["delta"] = c.delta;
  j["a_override"] = format_scale(c.step_scale);
  j["trials"] = c.trials;
  j["seed"] = c.seed;
  j["probes"] = c.probes;
  j["samples"] = c.samples;
  j["exact_frobenius_max_n0"] = c.exact_frobenius_max_n0;
  j["experiment"] = c.experiment;
  j["sweep_groups"] = c.sweep_groups;
  j["sweep_kind"] = c.sweep_kind;
  return j;
}

std::string config_hash(const RunConfig& config) {
  // Output location and format do not change results.
  RunConfig canonical = config;
  canonical.output_dir = ".";
  canonical.format = "csv";
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(to_text(canonical));
  return os.str();
}

Hypotheses check_hypotheses(const RunConfig& c) {
  Hypotheses h;
  const GroupSpec spec(c.group);
  const double order = static_cast<double>(spec.order());
  h.width_ratio = true;
  for (std::size_t l = 1; l < c.widths.size(); ++l) {
    if (static_cast<double>(c.widths[l - 1]) < c.c_w * c.widths[l]) h.width_ratio = false;
  }
  const int d_max = *std::max_element(c.widths.begin(), c.widths.end());
  const int d_min = *std::min_element(c.widths.begin(), c.widths.end());
  h.d_max_le_order = static_cast<double>(d_max) <= order;
  h.d_min_log = static_cast<double>(d_min) >= c.c_w * c.c_w * std::log(order);
  h.order_ge_depth = spec.order() >= c.widths.size() - 1;
  return h;
}

nlohmann::json to_json(const Hypotheses& h) {
  return {{"width_ratio", h.width_ratio},
          {"d_max_le_order", h.d_max_le_order},
          {"d_min_log", h.d_min_log},
          {"order_ge_depth", h.order_ge_depth}};
}

std::string git_describe() { return ABELCONV_GIT_DESCRIBE; }

}  // namespace abelconv
