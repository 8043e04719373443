#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "abelconv/attack.hpp"
#include "abelconv/convop.hpp"

namespace abelconv {

/// Everything a CLI run or an experiment needs. Defaults are the desk-scale
/// configuration used throughout the test suite.
struct RunConfig {
  std::vector<int> group{64};
  std::vector<int> widths{64, 32, 16};  // d_0..d_t
  std::vector<int> n{9};                // one entry, or one per layer
  OffsetPolicy offset_policy = OffsetPolicy::uniform;
  std::string activation = "shifted-softplus";
  std::string layer_init = "gaussian";   // gaussian | identity (spectrum experiment)
  std::string input = "bounded-uniform";  // bounded-uniform | rademacher | gaussian | zero

  double band_a = 0.05;
  double band_b = 30.0;
  double c_w = 20000.0;
  double delta = 1.0;
  StepScale step_scale;  // "a_override": none | oracle | <number>

  int trials = 100;
  std::uint64_t seed = 1;
  int probes = 64;
  int samples = 50;
  std::size_t exact_frobenius_max_n0 = 512;

  std::string experiment = "gradient";
  std::vector<int> sweep_groups{16, 32, 64, 128, 256};  // cyclic orders for sweeps
  std::string sweep_kind = "attack";                     // attack | minf

  std::string output_dir = ".";
  std::string format = "csv";  // csv | json | both
  bool dense = false;
  std::size_t dense_cap = kDefaultDenseCap;
};

/// Known keys, in canonical order.
const std::vector<std::string>& config_keys();

/// Sets one key from its textual value. Lists are written `[1, 2, 3]` (a bare
/// scalar is accepted as a one-element list). Throws InvalidConfigError naming
/// the key on unknown keys or malformed values.
void set_config_value(RunConfig& config, std::string_view key, std::string_view value);

/// Flat `key = value` text; `#` starts a comment; blank lines are ignored.
void apply_config_text(RunConfig& config, std::string_view text);

/// Range and consistency checks; throws InvalidConfigError naming the field.
void validate(const RunConfig& config);

/// Reads `config_path` (if non-empty), then applies `overrides` (key, value)
/// in order, then validates.
RunConfig parse_and_validate(const std::string& config_path,
                             const std::vector<std::pair<std::string, std::string>>& overrides,
                             RunConfig defaults = {});

nlohmann::json to_json(const RunConfig& config);

/// Canonical `key = value` text; apply_config_text(to_text(c)) reproduces c.
std::string to_text(const RunConfig& config);

/// FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const RunConfig& config);

/// Which width/size hypotheses of the asymptotic analysis a configuration
/// meets, with c_G = c_w^2.
struct Hypotheses {
  bool width_ratio = false;   // d_{l-1} >= c_w d_l for every layer
  bool d_max_le_order = false;
  bool d_min_log = false;     // d_min >= c_G log |G|
  bool order_ge_depth = false;
};

Hypotheses check_hypotheses(const RunConfig& config);
nlohmann::json to_json(const Hypotheses& h);

std::string git_describe();

}  // namespace abelconv
