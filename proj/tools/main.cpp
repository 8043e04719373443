// abelconv: spectra, attacks and bound checks for random convolutional
// networks on finite abelian groups.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "abelconv/attack.hpp"
#include "abelconv/config.hpp"
#include "abelconv/errors.hpp"
#include "abelconv/network.hpp"
#include "abelconv/rng.hpp"
#include "abelconv/serialize.hpp"
#include "abelconv/spectral.hpp"
#include "abelconv/verify.hpp"

namespace fs = std::filesystem;
using namespace abelconv;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBoundFailure = 2;

struct Options {
  std::string config_path;
  std::vector<std::string> sets;
  std::optional<std::string> group, widths, n, activation, offset_policy, seed, trials, a_override,
      out_dir, format, experiment, input, sweep_kind;
  bool json = false;
  bool dense = false;
  bool identity = false;
  std::string bundle;  // net-dump --load
};

void add_common(CLI::App* app, Options& o) {
  app->add_option("--config", o.config_path, "Flat key = value config file");
  app->add_option("--set", o.sets, "Override any config key: key=value (repeatable)");
  app->add_option("--group", o.group, "Group moduli, e.g. [64] or [2,2,16]");
  app->add_option("--widths", o.widths, "Channel widths d_0..d_t, e.g. [64,32,16]");
  app->add_option("--n", o.n, "Offsets per layer: one value or one per layer");
  app->add_option("--activation", o.activation, "identity | shifted-softplus | gelu-like");
  app->add_option("--offset-policy", o.offset_policy, "uniform | contiguous");
  app->add_option("--seed", o.seed, "Master seed (default: $ABELCONV_SEED, else 1)");
  app->add_option("--trials", o.trials, "Trials per experiment");
  app->add_option("--a-override", o.a_override, "Attack scale: none | oracle | <number>");
  app->add_option("--input", o.input, "bounded-uniform | rademacher | gaussian | zero");
  app->add_option("--out-dir", o.out_dir, "Directory for every file written");
  app->add_option("--format", o.format, "csv | json | both");
  app->add_flag("--json", o.json, "Machine-readable JSON on stdout");
}

RunConfig build_config(const Options& o) {
  RunConfig defaults;
  if (const char* env = std::getenv("ABELCONV_SEED"); env && *env) {
    set_config_value(defaults, "seed", env);
  }
  std::vector<std::pair<std::string, std::string>> overrides;
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw InvalidConfigError("set", "--set expects key=value, got '" + s + "'");
    overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  auto flag = [&](const char* key, const std::optional<std::string>& v) {
    if (v) overrides.emplace_back(key, *v);
  };
  flag("group", o.group);
  flag("widths", o.widths);
  flag("n", o.n);
  flag("activation", o.activation);
  flag("offset_policy", o.offset_policy);
  flag("seed", o.seed);
  flag("trials", o.trials);
  flag("a_override", o.a_override);
  flag("input", o.input);
  flag("output_dir", o.out_dir);
  flag("format", o.format);
  flag("experiment", o.experiment);
  flag("sweep_kind", o.sweep_kind);
  if (o.dense) overrides.emplace_back("dense", "true");
  if (o.identity) overrides.emplace_back("layer_init", "identity");
  return parse_and_validate(o.config_path, overrides, defaults);
}

fs::path out_path(const RunConfig& c, const std::string& name) {
  fs::create_directories(c.output_dir);
  return fs::path(c.output_dir) / name;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

Signal make_input(const RunConfig& c, const GroupSpec& spec, int channels, std::uint64_t seed) {
  if (c.input == "zero") return Signal(spec, channels);
  return random_signal(spec, channels, signal_kind_from_name(c.input), seed);
}

int cmd_spectra(const Options& o) {
  const RunConfig c = build_config(o);
  const GroupSpec spec(c.group);
  const ConvLayer layer = c.layer_init == "identity"
                              ? ConvLayer::identity(spec, c.widths[0])
                              : random_layer(spec, c.widths[0], c.widths[1], c.n[0], c.offset_policy,
                                             derive_seed(c.seed, "layer"));
  SpectralReport report = block_singular_values(layer);
  nlohmann::json summary = spectra_summary(report);
  if (c.dense) {
    const auto dense = attach_dense_timing(report, layer, c.dense_cap);
    const auto block = report.all_values();
    double dev = 0.0;
    for (std::size_t i = 0; i < dense.size() && i < block.size(); ++i)
      dev = std::max(dev, std::abs(dense[i] - block[i]));
    summary = spectra_summary(report);
    summary["dense_max_abs_deviation"] = dev;
  }
  const BandCheck band = band_check(report, c.band_a, c.band_b);
  summary["band"] = {{"a", c.band_a}, {"b", c.band_b}, {"pass", band.pass},
                     {"lower_margin", band.lower_margin}, {"upper_margin", band.upper_margin}};
  summary["config_hash"] = config_hash(c);
  summary["git_describe"] = git_describe();

  write_file(out_path(c, "spectra.csv"), spectra_csv(report));
  write_file(out_path(c, "spectra.json"), summary.dump(2) + "\n");

  if (o.json) {
    std::cout << summary.dump(2) << '\n';
  } else {
    std::cout << "group " << spec.to_string() << "  d_in " << report.d_in << "  d_out " << report.d_out
              << "\n"
              << "s_min=" << fmt(report.s_min) << "  s_max=" << fmt(report.s_max)
              << "  count=" << report.total_count << "\n"
              << "band [" << c.band_a << ", " << c.band_b << "]: " << (band.pass ? "pass" : "fail")
              << "\n"
              << "block path " << fmt(report.block_seconds) << " s";
    if (report.dense_seconds) std::cout << "  dense path " << fmt(*report.dense_seconds) << " s";
    std::cout << '\n';
  }
  return kExitOk;
}

int cmd_attack(const Options& o) {
  const RunConfig c = build_config(o);
  const GroupSpec spec(c.group);
  const Network net = random_network(spec, c.widths, c.n, Activation::from_name(c.activation),
                                     derive_seed(c.seed, "network"), c.offset_policy);
  const Signal f = make_input(c, spec, net.input_channels(), derive_seed(c.seed, "input"));
  const AttackReport rep = single_step_attack(net, f, c.step_scale);
  nlohmann::json j = to_json(rep);
  j["config_hash"] = config_hash(c);
  j["seed"] = c.seed;
  if (o.out_dir) write_file(out_path(c, "attack.json"), j.dump(2) + "\n");
  if (o.json) {
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "H_b(f) " << fmt(rep.output_before) << " -> " << fmt(rep.output_after)
              << (rep.flipped ? "  flipped" : "  not flipped") << "\n"
              << "a=" << fmt(rep.a) << "  eta=" << fmt(rep.eta) << "  |grad|=" << fmt(rep.gradient_norm)
              << "  step=" << fmt(rep.step_length) << "  rho=" << fmt(rep.rho) << '\n';
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << '\n';
  }
  return kExitOk;
}

void print_stats(const TrialStats& s) {
  std::cout << s.experiment << " (" << s.records.size() << " trials)\n";
  for (const auto& b : s.bounds) {
    std::cout << "  " << std::left << std::setw(28) << b.name << std::right << std::setw(5) << b.passes
              << "/" << std::setw(4) << b.trials << "  rate " << std::setw(7) << fmt(b.rate())
              << "  floor " << std::setw(7) << fmt(b.required_rate) << "  "
              << (!b.asserted ? "recorded" : b.ok() ? "PASS" : "FAIL") << '\n';
  }
  for (const auto& [name, value] : s.metrics) std::cout << "  " << name << " = " << fmt(value) << '\n';
}

void emit_all(const RunConfig& c, const TrialStats& stats, double seconds) {
  if (c.format == "csv" || c.format == "both")
    emit(stats, EmitFormat::csv, out_path(c, stats.experiment + ".csv").string());
  if (c.format == "json" || c.format == "both")
    emit(stats, EmitFormat::json, out_path(c, stats.experiment + ".json").string());
  // Timings live apart from the results so that result files stay byte-stable.
  const nlohmann::json run{{"experiment", stats.experiment},
                           {"config_hash", stats.config_hash},
                           {"git_describe", git_describe()},
                           {"wall_seconds", seconds}};
  write_file(out_path(c, stats.experiment + ".run.json"), run.dump(2) + "\n");
}

int cmd_verify(const Options& o) {
  const RunConfig c = build_config(o);
  std::vector<std::string> names{c.experiment};
  if (c.experiment == "all") names = {"spectrum", "gradient", "output", "robustness", "attack"};
  bool ok = true;
  nlohmann::json summary = nlohmann::json::array();
  for (const auto& name : names) {
    RunConfig run = c;
    run.experiment = name;
    const auto start = std::chrono::steady_clock::now();
    const TrialStats stats = run_experiment(name, run);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    emit_all(run, stats, seconds);
    ok = ok && stats.passed();
    if (o.json) {
      nlohmann::json j = to_json(stats);
      j.erase("records");
      summary.push_back(j);
    } else {
      print_stats(stats);
    }
  }
  if (o.json) std::cout << summary.dump(2) << '\n';
  return ok ? kExitOk : kExitBoundFailure;
}

int cmd_sweep(const Options& o) {
  const RunConfig c = build_config(o);
  if (c.sweep_kind == "minf") {
    const auto start = std::chrono::steady_clock::now();
    const TrialStats stats = run_minf_sweep(c);
    emit_all(c, stats, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    if (o.json) {
      nlohmann::json j = to_json(stats);
      j.erase("records");
      std::cout << j.dump(2) << '\n';
    } else {
      print_stats(stats);
    }
    return stats.passed() ? kExitOk : kExitBoundFailure;
  }
  SweepConfig sc;
  for (const int m : c.sweep_groups) sc.groups.push_back({m});
  sc.widths = c.widths;
  sc.n = c.n;
  sc.activation = Activation::from_name(c.activation);
  sc.offset_policy = c.offset_policy;
  sc.scale = c.step_scale;
  sc.seeds = c.trials;
  sc.master_seed = c.seed;
  const SweepTable table = distance_scaling_sweep(sc);
  write_file(out_path(c, "sweep.csv"), sweep_csv(table));
  nlohmann::json points = nlohmann::json::array();
  for (const auto& p : table.points) {
    points.push_back({{"N_0", p.n0},
                      {"group_order", p.group_order},
                      {"flip_rate", p.flip_rate},
                      {"median_rho", p.median_rho},
                      {"median_step_len", p.median_step_len},
                      {"median_grad_norm", p.median_grad_norm}});
  }
  if (o.json) {
    std::cout << points.dump(2) << '\n';
  } else {
    std::cout << std::setw(8) << "N_0" << std::setw(8) << "|G|" << std::setw(12) << "flip_rate"
              << std::setw(14) << "median_rho" << std::setw(14) << "median_step" << '\n';
    for (const auto& p : table.points) {
      std::cout << std::setw(8) << p.n0 << std::setw(8) << p.group_order << std::setw(12)
                << fmt(p.flip_rate) << std::setw(14) << fmt(p.median_rho) << std::setw(14)
                << fmt(p.median_step_len) << '\n';
    }
  }
  return kExitOk;
}

int cmd_net_dump(const Options& o) {
  const RunConfig c = build_config(o);
  std::optional<Network> net;
  if (!o.bundle.empty()) {
    std::ifstream in(o.bundle);
    if (!in) throw Error("cannot read '" + o.bundle + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw StructuralError(std::string("malformed bundle: ") + e.what());
    }
    net = network_from_json(j);
  } else {
    net = random_network(GroupSpec(c.group), c.widths, c.n, Activation::from_name(c.activation),
                         derive_seed(c.seed, "network"), c.offset_policy);
  }
  const nlohmann::json bundle = to_json(*net);
  if (c.format == "json" || c.format == "both") write_file(out_path(c, "network.json"), bundle.dump(2) + "\n");
  if (c.format == "csv" || c.format == "both") write_file(out_path(c, "network.csv"), network_to_csv(*net));
  if (o.json) {
    std::cout << bundle.dump(2) << '\n';
  } else {
    std::cout << "group " << net->spec().to_string() << "  depth " << net->depth() << "  activation "
              << net->activation().name() << "  N_0 " << net->input_size() << "  N_t "
              << net->output_size() << '\n';
    for (std::size_t l = 0; l < net->depth(); ++l) {
      const ConvLayer& layer = net->layers()[l];
      std::cout << "  layer " << l + 1 << ": " << layer.d_in() << " -> " << layer.d_out()
                << "  n=" << layer.n() << "  ||L||=" << fmt(spectral_norm(layer)) << '\n';
    }
  }
  return kExitOk;
}

void print_error(const char* kind, const std::string& message, const std::string& field = {}) {
  nlohmann::json j{{"error", kind}, {"message", message}};
  if (!field.empty()) j["field"] = field;
  std::cerr << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spectra, attacks and bound checks for random convolutional networks on finite abelian groups"};
  app.require_subcommand(1);
  Options o;

  auto* spectra = app.add_subcommand("spectra", "Singular spectrum of one layer (widths[0] -> widths[1], n[0])");
  add_common(spectra, o);
  spectra->add_flag("--dense", o.dense, "Also run the dense SVD and compare");
  spectra->add_flag("--identity", o.identity, "Use the identity layer");

  auto* attack = app.add_subcommand("attack", "Single-step gradient attack on one seeded network and input");
  add_common(attack, o);

  auto* verify = app.add_subcommand("verify", "Monte-Carlo bound checks; exits 2 if an asserted check fails");
  add_common(verify, o);
  verify->add_option("--experiment", o.experiment,
                     "spectrum | gradient | output | robustness | attack | minf_sweep | all");
  verify->add_flag("--identity", o.identity, "Identity layers for the spectrum experiment");

  auto* sweep = app.add_subcommand("sweep", "Sweep over the cyclic groups in sweep_groups");
  add_common(sweep, o);
  sweep->add_option("--kind", o.sweep_kind, "attack | minf");

  auto* dump = app.add_subcommand("net-dump", "Write the network bundle for a seed, or re-emit a saved one");
  add_common(dump, o);
  dump->add_option("--load", o.bundle, "Existing network.json to load instead of sampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (spectra->parsed()) return cmd_spectra(o);
    if (attack->parsed()) return cmd_attack(o);
    if (verify->parsed()) return cmd_verify(o);
    if (sweep->parsed()) return cmd_sweep(o);
    if (dump->parsed()) return cmd_net_dump(o);
  } catch (const InvalidConfigError& e) {
    print_error("invalid_config", e.what(), e.field());
    return kExitError;
  } catch (const DegenerateAttackError& e) {
    print_error("degenerate_attack", e.what());
    return kExitError;
  } catch (const CapacityError& e) {
    print_error("capacity", e.what());
    return kExitError;
  } catch (const std::exception& e) {
    print_error("structural", e.what());
    return kExitError;
  }
  return kExitError;
}
