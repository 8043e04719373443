#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "abelconv/config.hpp"

namespace abelconv {

struct TrialRecord {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;  // aligned with TrialStats::value_columns
  std::vector<int> checks;     // 0/1, aligned with TrialStats::check_columns

  friend bool operator==(const TrialRecord&, const TrialRecord&);
};

/// Pass count of one named bound. `required_rate` is the asserted floor; a
/// bound with `asserted == false` is recorded only.
struct BoundSummary {
  std::string name;
  std::size_t passes = 0;
  std::size_t trials = 0;
  double required_rate = 0.0;
  bool asserted = true;

  double rate() const { return trials ? static_cast<double>(passes) / static_cast<double>(trials) : 0.0; }
  bool ok() const { return !asserted || rate() >= required_rate; }

  friend bool operator==(const BoundSummary&, const BoundSummary&) = default;
};

struct ColumnSummary {
  std::string name;
  double min = 0, q05 = 0, q25 = 0, median = 0, q75 = 0, q95 = 0, max = 0, mean = 0;
};

struct TrialStats {
  std::string experiment;
  nlohmann::json config;
  std::string config_hash;
  std::vector<std::string> value_columns;
  std::vector<std::string> check_columns;
  std::vector<TrialRecord> records;
  std::vector<BoundSummary> bounds;
  std::vector<std::pair<std::string, double>> metrics;  // experiment-level scalars

  bool passed() const;
  std::vector<ColumnSummary> summaries() const;
  double metric(std::string_view name) const;
  const BoundSummary& bound(std::string_view name) const;
  std::vector<double> column(std::string_view name) const;

  friend bool operator==(const TrialStats&, const TrialStats&);
};

// Trial k of experiment E draws from derive_seed(config.seed, E, k); inside a
// trial the network uses tag "network", the input "input", Hutchinson probes
// "probes" and ball samples "ball". Trials run in parallel and are merged in
// trial order, so results do not depend on the worker count.

/// Per trial: a random layer widths[0] -> widths[1] with n[0] offsets; checks
/// s_min >= band_a and s_max <= band_b.
TrialStats run_spectrum_experiment(const RunConfig& config);

/// Per trial: ||grad H_b||^2 >= 0.0001 (0.1 c^2)^t / (2e), Hutchinson
/// ||J||_F^2 >= (0.1 c^2)^t d_t |G| / 2, and the per-layer growth
/// ||D_l L_l v||^2 >= 0.1 c^2 (d_l / d_{l-1}) ||v||^2 along a random direction.
TrialStats run_gradient_experiment(const RunConfig& config);

/// Per trial: |H_b(f)| <= 10 sup|s'|^t; plus the mean of H_b^2 against
/// sup|s'|^{2t}.
TrialStats run_output_experiment(const RunConfig& config);

/// Per trial: sampled gradient deviations in B(f, delta) against the analytic
/// robustness bound, the sampled M(f, delta) against its analytic bound, and
/// M_inf against its high-probability formula.
TrialStats run_robustness_experiment(const RunConfig& config);

/// Per trial: the single-step attack, a linear-activation control, and flips
/// at a/4, a/2 and 2a (recorded only).
TrialStats run_attack_experiment(const RunConfig& config);

/// M_inf across the cyclic groups in config.sweep_groups.
TrialStats run_minf_sweep(const RunConfig& config);

/// Dispatches on `name` (spectrum | gradient | output | robustness | attack).
TrialStats run_experiment(std::string_view name, const RunConfig& config);

/// Pass-rate floors used by the experiments.
inline constexpr double kStatedProbability = 0.99;
inline constexpr double kAttackFlipFloor = 0.8;

enum class EmitFormat { csv, json };

/// CSV: `trial,seed,<value columns>,<check columns>`, one row per trial,
/// doubles printed with 17 significant digits. JSON: the full TrialStats.
std::string render(const TrialStats& stats, EmitFormat format);
void emit(const TrialStats& stats, EmitFormat format, const std::string& path);

nlohmann::json to_json(const TrialStats& stats);
TrialStats trial_stats_from_json(const nlohmann::json& j);

}  // namespace abelconv
