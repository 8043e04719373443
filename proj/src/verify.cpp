#include "abelconv/verify.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "abelconv/attack.hpp"
#include "abelconv/errors.hpp"
#include "abelconv/network.hpp"
#include "abelconv/parallel.hpp"
#include "abelconv/rng.hpp"
#include "abelconv/spectral.hpp"
#include "abelconv/stats.hpp"

namespace abelconv {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

Signal make_input(const RunConfig& c, const GroupSpec& spec, int channels, std::uint64_t seed) {
  if (c.input == "zero") return Signal(spec, channels);
  return random_signal(spec, channels, signal_kind_from_name(c.input), seed);
}

Network make_network(const RunConfig& c, const GroupSpec& spec, std::uint64_t seed) {
  return random_network(spec, c.widths, c.n, Activation::from_name(c.activation), seed,
                        c.offset_policy);
}

struct BoundRule {
  std::string name;
  double required_rate;
  bool asserted = true;
};

// Runs `count` trials in parallel and merges them in trial order.
template <typename Trial>
TrialStats run_trials(std::string experiment, const RunConfig& config,
                      std::vector<std::string> value_columns, std::vector<BoundRule> rules,
                      std::size_t count, Trial&& trial) {
  TrialStats stats;
  stats.experiment = std::move(experiment);
  stats.config = to_json(config);
  stats.config_hash = config_hash(config);
  stats.value_columns = std::move(value_columns);
  for (const auto& r : rules) stats.check_columns.push_back(r.name);
  stats.records.resize(count);
  parallel_for(count, [&](std::size_t k) {
    TrialRecord& rec = stats.records[k];
    rec.trial = k;
    rec.values.assign(stats.value_columns.size(), kNaN);
    rec.checks.assign(stats.check_columns.size(), 0);
    trial(k, rec);
  });
  for (std::size_t b = 0; b < rules.size(); ++b) {
    BoundSummary summary{rules[b].name, 0, count, rules[b].required_rate, rules[b].asserted};
    for (const auto& rec : stats.records) summary.passes += rec.checks[b] ? 1 : 0;
    stats.bounds.push_back(summary);
  }
  return stats;
}

double stated_floor(const RunConfig& c) {
  return binomial_floor(kStatedProbability, static_cast<std::size_t>(c.trials));
}

}  // namespace

bool operator==(const TrialRecord& a, const TrialRecord& b) {
  return a.trial == b.trial && a.seed == b.seed && a.checks == b.checks &&
         std::equal(a.values.begin(), a.values.end(), b.values.begin(), b.values.end(), same_double);
}

bool operator==(const TrialStats& a, const TrialStats& b) {
  if (a.metrics.size() != b.metrics.size()) return false;
  for (std::size_t i = 0; i < a.metrics.size(); ++i) {
    if (a.metrics[i].first != b.metrics[i].first ||
        !same_double(a.metrics[i].second, b.metrics[i].second)) {
      return false;
    }
  }
  return a.experiment == b.experiment && a.config == b.config && a.config_hash == b.config_hash &&
         a.value_columns == b.value_columns && a.check_columns == b.check_columns &&
         a.records == b.records && a.bounds == b.bounds;
}

bool TrialStats::passed() const {
  return std::all_of(bounds.begin(), bounds.end(), [](const BoundSummary& b) { return b.ok(); });
}

std::vector<double> TrialStats::column(std::string_view name) const {
  const auto it = std::find(value_columns.begin(), value_columns.end(), name);
  if (it == value_columns.end()) throw StructuralError("no column '" + std::string(name) + "'");
  const auto idx = static_cast<std::size_t>(it - value_columns.begin());
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records) out.push_back(rec.values[idx]);
  return out;
}

double TrialStats::metric(std::string_view name) const {
  for (const auto& [key, value] : metrics)
    if (key == name) return value;
  throw StructuralError("no metric '" + std::string(name) + "'");
}

const BoundSummary& TrialStats::bound(std::string_view name) const {
  for (const auto& b : bounds)
    if (b.name == name) return b;
  throw StructuralError("no bound '" + std::string(name) + "'");
}

std::vector<ColumnSummary> TrialStats::summaries() const {
  std::vector<ColumnSummary> out;
  for (const auto& name : value_columns) {
    const auto values = column(name);
    std::vector<double> finite;
    std::copy_if(values.begin(), values.end(), std::back_inserter(finite),
                 [](double v) { return !std::isnan(v); });
    ColumnSummary s{name};
    s.min = quantile(finite, 0.0);
    s.q05 = quantile(finite, 0.05);
    s.q25 = quantile(finite, 0.25);
    s.median = quantile(finite, 0.5);
    s.q75 = quantile(finite, 0.75);
    s.q95 = quantile(finite, 0.95);
    s.max = quantile(finite, 1.0);
    s.mean = mean(finite);
    out.push_back(s);
  }
  return out;
}

TrialStats run_spectrum_experiment(const RunConfig& c) {
  const GroupSpec spec(c.group);
  const int d_in = c.widths[0];
  const int d_out = c.widths[1];
  return run_trials(
      "spectrum", c, {"s_min", "s_max", "lower_margin", "upper_margin"},
      {{"band", stated_floor(c)}}, static_cast<std::size_t>(c.trials),
      [&](std::size_t k, TrialRecord& rec) {
        rec.seed = derive_seed(c.seed, "spectrum", k);
        const ConvLayer layer =
            c.layer_init == "identity"
                ? ConvLayer::identity(spec, d_in)
                : random_layer(spec, d_in, d_out, c.n[0], c.offset_policy,
                               derive_seed(rec.seed, "layer"));
        const SpectralReport report = block_singular_values(layer);
        const BandCheck band = band_check(report, c.band_a, c.band_b);
        rec.values = {report.s_min, report.s_max, band.lower_margin, band.upper_margin};
        rec.checks = {band.pass};
      });
}

TrialStats run_gradient_experiment(const RunConfig& c) {
  const GroupSpec spec(c.group);
  const Activation act = Activation::from_name(c.activation);
  const double t = static_cast<double>(c.widths.size() - 1);
  const double c2 = act.c() * act.c();
  const double grad_bound = 0.0001 * std::pow(0.1 * c2, t) / (2.0 * std::numbers::e);
  const double frob_bound =
      0.5 * std::pow(0.1 * c2, t) * c.widths.back() * static_cast<double>(spec.order());
  return run_trials(
      "gradient", c,
      {"grad_norm_sq", "grad_bound", "frobenius_estimate", "frobenius_se", "frobenius_bound",
       "frobenius_exact", "layer_growth_min", "layer_growth_bound"},
      {{"gradient_bound", stated_floor(c)},
       {"frobenius_within_bound", stated_floor(c)},
       {"layer_growth", stated_floor(c)}},
      static_cast<std::size_t>(c.trials), [&](std::size_t k, TrialRecord& rec) {
        rec.seed = derive_seed(c.seed, "gradient", k);
        const Network net = make_network(c, spec, derive_seed(rec.seed, "network"));
        const ForwardTrace trace =
            forward(net, make_input(c, spec, net.input_channels(), derive_seed(rec.seed, "input")));
        const double grad_sq = gradient(net, trace).as_vector().squaredNorm();
        const FrobeniusEstimate est =
            frobenius_estimate(net, trace, c.probes, derive_seed(rec.seed, "probes"));
        const double exact = net.input_size() <= c.exact_frobenius_max_n0
                                 ? exact_jacobian_frobenius_sq(net, trace)
                                 : kNaN;

        // ||g_l||^2 / ((d_l / d_{l-1}) ||g_{l-1}||^2) along a fixed random direction.
        const Signal v = random_signal(spec, net.input_channels(), SignalKind::gaussian,
                                       derive_seed(rec.seed, "direction"));
        const auto products = jacobian_layer_products(net, trace, v);
        double growth = std::numeric_limits<double>::infinity();
        double previous = v.as_vector().squaredNorm();
        for (std::size_t l = 0; l < products.size(); ++l) {
          const double current = products[l].as_vector().squaredNorm();
          const double ratio = static_cast<double>(c.widths[l + 1]) / c.widths[l];
          growth = std::min(growth, current / (ratio * previous));
          previous = current;
        }
        rec.values = {grad_sq, grad_bound, est.mean, est.standard_error, frob_bound,
                      exact,   growth,     0.1 * c2};
        rec.checks = {grad_sq >= grad_bound, est.mean >= frob_bound, growth >= 0.1 * c2};
      });
}

TrialStats run_output_experiment(const RunConfig& c) {
  const GroupSpec spec(c.group);
  const Activation act = Activation::from_name(c.activation);
  const double t = static_cast<double>(c.widths.size() - 1);
  const double bound = 10.0 * std::pow(act.sup_derivative(), t);
  TrialStats stats = run_trials(
      "output", c, {"hb", "abs_hb", "bound"}, {{"output_bound", stated_floor(c)}},
      static_cast<std::size_t>(c.trials), [&](std::size_t k, TrialRecord& rec) {
        rec.seed = derive_seed(c.seed, "output", k);
        const Network net = make_network(c, spec, derive_seed(rec.seed, "network"));
        const double hb =
            forward(net, make_input(c, spec, net.input_channels(), derive_seed(rec.seed, "input")))
                .output;
        rec.values = {hb, std::abs(hb), bound};
        rec.checks = {std::abs(hb) <= bound};
      });

  std::vector<double> squares;
  for (const double hb : stats.column("hb")) squares.push_back(hb * hb);
  const double m2 = mean(squares);
  double var = 0.0;
  for (const double s : squares) var += (s - m2) * (s - m2);
  const double n = static_cast<double>(squares.size());
  const double se = n > 1 ? std::sqrt(var / (n - 1.0) / n) : 0.0;
  const double m2_bound = std::pow(act.sup_derivative(), 2.0 * t);
  stats.metrics = {{"second_moment", m2}, {"second_moment_se", se}, {"second_moment_bound", m2_bound}};
  stats.bounds.push_back({"second_moment", m2 <= m2_bound + 3.0 * se ? 1u : 0u, 1, 1.0, true});
  return stats;
}

TrialStats run_robustness_experiment(const RunConfig& c) {
  const GroupSpec spec(c.group);
  return run_trials(
      "robustness", c,
      {"m_s", "m_infinity", "m_infinity_readout", "m_analytic", "m_sampled", "robustness_bound",
       "max_gradient_deviation", "m_infinity_bound"},
      {{"deviation_within_bound", 1.0},
       {"m_sampled_within_analytic", 1.0},
       {"m_infinity_within_bound", stated_floor(c)}},
      static_cast<std::size_t>(c.trials), [&](std::size_t k, TrialRecord& rec) {
        rec.seed = derive_seed(c.seed, "robustness", k);
        const Network net = make_network(c, spec, derive_seed(rec.seed, "network"));
        const ForwardTrace trace =
            forward(net, make_input(c, spec, net.input_channels(), derive_seed(rec.seed, "input")));
        const Diagnostics d = diagnostics(net, trace, c.delta, c.samples, derive_seed(rec.seed, "ball"));
        const double minf_bound = m_infinity_formula(net, d.m_s);
        rec.values = {d.m_s,       d.m_infinity,       d.m_infinity_readout,     d.m_analytic,
                      d.m_sampled, d.robustness_bound, d.max_gradient_deviation, minf_bound};
        rec.checks = {d.max_gradient_deviation <= d.robustness_bound, d.m_sampled <= d.m_analytic,
                      d.m_infinity <= minf_bound};
      });
}

TrialStats run_attack_experiment(const RunConfig& c) {
  const GroupSpec spec(c.group);
  return run_trials(
      "attack", c,
      {"hb_before", "hb_after", "a", "eta", "step_len", "rho", "grad_norm", "flip_quarter_a",
       "flip_half_a", "flip_double_a", "control_hb_before", "control_hb_after", "control_a",
       "control_change_error"},
      {{"flip", kAttackFlipFloor}, {"control_flip", 1.0}}, static_cast<std::size_t>(c.trials),
      [&](std::size_t k, TrialRecord& rec) {
        rec.seed = derive_seed(c.seed, "attack", k);
        const Network net = make_network(c, spec, derive_seed(rec.seed, "network"));
        const Signal f = make_input(c, spec, net.input_channels(), derive_seed(rec.seed, "input"));
        try {
          const AttackReport rep = single_step_attack(net, f, c.step_scale);
          auto flips_at = [&](double factor) {
            return single_step_attack(net, f, StepScale::fixed(rep.a * factor)).flipped ? 1.0 : 0.0;
          };
          rec.values[0] = rep.output_before;
          rec.values[1] = rep.output_after;
          rec.values[2] = rep.a;
          rec.values[3] = rep.eta;
          rec.values[4] = rep.step_length;
          rec.values[5] = rep.rho;
          rec.values[6] = rep.gradient_norm;
          rec.values[7] = flips_at(0.25);
          rec.values[8] = flips_at(0.5);
          rec.values[9] = flips_at(2.0);
          rec.checks[0] = rep.flipped;
        } catch (const DegenerateAttackError&) {
          rec.checks[0] = 0;
        }

        // Same architecture with the identity activation: H_b is linear, so
        // the step moves the output by exactly -2a sign(H_b(f)).
        RunConfig linear = c;
        linear.activation = "identity";
        const Network control = make_network(linear, spec, derive_seed(rec.seed, "control"));
        const AttackReport ctl = single_step_attack(control, f, c.step_scale);
        const double expected =
            ctl.output_before - 2.0 * ctl.a * (ctl.sign_before < 0 ? -1.0 : 1.0);
        rec.values[10] = ctl.output_before;
        rec.values[11] = ctl.output_after;
        rec.values[12] = ctl.a;
        rec.values[13] = std::abs(ctl.output_after - expected);
        rec.checks[1] = ctl.flipped || ctl.a < std::abs(ctl.output_before);
      });
}

TrialStats run_minf_sweep(const RunConfig& c) {
  const auto per_group = static_cast<std::size_t>(c.trials);
  TrialStats stats = run_trials(
      "minf_sweep", c, {"group_order", "m_infinity", "m_infinity_bound", "m_s"},
      {{"m_infinity_within_bound", stated_floor(c)}}, c.sweep_groups.size() * per_group,
      [&](std::size_t k, TrialRecord& rec) {
        const std::size_t p = k / per_group;
        const GroupSpec spec({c.sweep_groups[p]});
        rec.seed = derive_seed(c.seed, "minf", (p << 32) + k % per_group);
        const Network net = make_network(c, spec, derive_seed(rec.seed, "network"));
        const ForwardTrace trace =
            forward(net, make_input(c, spec, net.input_channels(), derive_seed(rec.seed, "input")));
        const MInfinityCheck check = m_infty_bound_check(net, trace);
        rec.values = {static_cast<double>(spec.order()), check.m_infinity, check.bound,
                      max_layer_norm(net)};
        rec.checks = {check.pass};
      });
  const auto orders = stats.column("group_order");
  const auto minf = stats.column("m_infinity");
  for (const int m : c.sweep_groups) {
    std::vector<double> values;
    for (std::size_t k = 0; k < orders.size(); ++k)
      if (orders[k] == m) values.push_back(minf[k]);
    stats.metrics.emplace_back("median_m_infinity_" + std::to_string(m), quantile(values, 0.5));
  }
  return stats;
}

TrialStats run_experiment(std::string_view name, const RunConfig& config) {
  if (name == "spectrum") return run_spectrum_experiment(config);
  if (name == "gradient") return run_gradient_experiment(config);
  if (name == "output") return run_output_experiment(config);
  if (name == "robustness") return run_robustness_experiment(config);
  if (name == "attack") return run_attack_experiment(config);
  if (name == "minf_sweep") return run_minf_sweep(config);
  throw InvalidConfigError("experiment", "unknown experiment '" + std::string(name) + "'");
}

namespace {

nlohmann::json number_or_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

double number_from(const nlohmann::json& j) { return j.is_null() ? kNaN : j.get<double>(); }

}  // namespace

nlohmann::json to_json(const TrialStats& s) {
  nlohmann::json j;
  j["experiment"] = s.experiment;
  j["config"] = s.config;
  j["config_hash"] = s.config_hash;
  j["git_describe"] = git_describe();
  j["value_columns"] = s.value_columns;
  j["check_columns"] = s.check_columns;
  auto& records = j["records"] = nlohmann::json::array();
  for (const auto& r : s.records) {
    nlohmann::json values = nlohmann::json::array();
    for (const double v : r.values) values.push_back(number_or_null(v));
    records.push_back({{"trial", r.trial}, {"seed", r.seed}, {"values", values}, {"checks", r.checks}});
  }
  auto& bounds = j["bounds"] = nlohmann::json::array();
  for (const auto& b : s.bounds) {
    bounds.push_back({{"name", b.name},
                      {"passes", b.passes},
                      {"trials", b.trials},
                      {"rate", b.rate()},
                      {"required_rate", b.required_rate},
                      {"asserted", b.asserted},
                      {"ok", b.ok()}});
  }
  auto& metrics = j["metrics"] = nlohmann::json::array();
  for (const auto& [name, value] : s.metrics) {
    metrics.push_back({{"name", name}, {"value", number_or_null(value)}});
  }
  auto& summary = j["summary"] = nlohmann::json::array();
  for (const auto& c : s.summaries()) {
    summary.push_back({{"name", c.name},
                       {"min", number_or_null(c.min)},
                       {"q05", number_or_null(c.q05)},
                       {"q25", number_or_null(c.q25)},
                       {"median", number_or_null(c.median)},
                       {"q75", number_or_null(c.q75)},
                       {"q95", number_or_null(c.q95)},
                       {"max", number_or_null(c.max)},
                       {"mean", number_or_null(c.mean)}});
  }
  j["passed"] = s.passed();
  return j;
}

TrialStats trial_stats_from_json(const nlohmann::json& j) {
  TrialStats s;
  s.experiment = j.at("experiment").get<std::string>();
  s.config = j.at("config");
  s.config_hash = j.at("config_hash").get<std::string>();
  s.value_columns = j.at("value_columns").get<std::vector<std::string>>();
  s.check_columns = j.at("check_columns").get<std::vector<std::string>>();
  for (const auto& r : j.at("records")) {
    TrialRecord rec;
    rec.trial = r.at("trial").get<std::size_t>();
    rec.seed = r.at("seed").get<std::uint64_t>();
    for (const auto& v : r.at("values")) rec.values.push_back(number_from(v));
    rec.checks = r.at("checks").get<std::vector<int>>();
    s.records.push_back(std::move(rec));
  }
  for (const auto& b : j.at("bounds")) {
    s.bounds.push_back({b.at("name").get<std::string>(), b.at("passes").get<std::size_t>(),
                        b.at("trials").get<std::size_t>(), b.at("required_rate").get<double>(),
                        b.at("asserted").get<bool>()});
  }
  for (const auto& m : j.at("metrics")) {
    s.metrics.emplace_back(m.at("name").get<std::string>(), number_from(m.at("value")));
  }
  return s;
}

std::string render(const TrialStats& stats, EmitFormat format) {
  if (format == EmitFormat::json) return to_json(stats).dump(2) + "\n";
  std::ostringstream os;
  os.precision(17);
  os << "trial,seed";
  for (const auto& c : stats.value_columns) os << ',' << c;
  for (const auto& c : stats.check_columns) os << ',' << c;
  os << '\n';
  for (const auto& r : stats.records) {
    os << r.trial << ',' << r.seed;
    for (const double v : r.values) os << ',' << v;
    for (const int v : r.checks) os << ',' << v;
    os << '\n';
  }
  return os.str();
}

void emit(const TrialStats& stats, EmitFormat format, const std::string& path) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << render(stats, format);
}

}  // namespace abelconv
