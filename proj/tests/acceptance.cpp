// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "abelconv/attack.hpp"
#include "abelconv/network.hpp"
#include "abelconv/rng.hpp"
#include "abelconv/spectral.hpp"
#include "abelconv/stats.hpp"
#include "abelconv/verify.hpp"

using namespace abelconv;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

// Random group of order in [lo, hi]: cyclic, or split into two or three factors.
GroupSpec random_group(Rng& rng, int lo, int hi) {
  const int order = std::uniform_int_distribution<int>(lo, hi)(rng);
  std::vector<int> moduli{order};
  for (int split = 0; split < 2; ++split) {
    if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) break;
    const int last = moduli.back();
    std::vector<int> divisors;
    for (int d = 2; d < last; ++d)
      if (last % d == 0) divisors.push_back(d);
    if (divisors.empty()) break;
    const int d = divisors[std::uniform_int_distribution<std::size_t>(0, divisors.size() - 1)(rng)];
    moduli.back() = last / d;
    moduli.push_back(d);
  }
  return GroupSpec(moduli);
}

Outcome block_vs_dense() {
  const auto start = Clock::now();
  Rng rng(derive_seed(2024, "block-vs-dense"));
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    const GroupSpec g = random_group(rng, 4, 24);
    const int d_in = std::uniform_int_distribution<int>(1, 8)(rng);
    const int d_out = std::uniform_int_distribution<int>(1, 4)(rng);
    const int n = std::uniform_int_distribution<int>(1, static_cast<int>(g.order()))(rng);
    const ConvLayer layer = random_layer(g, d_in, d_out, n, OffsetPolicy::uniform, rng());
    const auto block = block_singular_values(layer).all_values();
    const auto dense = dense_singular_values(layer);
    if (block.size() != dense.size()) return {false, "count mismatch on " + g.to_string()};
    for (std::size_t i = 0; i < block.size(); ++i) worst = std::max(worst, std::abs(block[i] - dense[i]));
  }
  const double secs = seconds_since(start);
  return {worst <= 1e-8 && secs < 30.0,
          format("50 configs, max |dev| %.2e (<= 1e-8), %.2f s (< 30 s)", worst, secs)};
}

Outcome equivariance() {
  Rng rng(derive_seed(2024, "equivariance"));
  double worst = 0.0;
  int layers = 0;
  for (const auto& moduli : std::vector<std::vector<int>>{
           {1}, {7}, {16}, {24}, {2, 12}, {3, 8}, {4, 6}, {2, 2, 6}, {2, 3, 4}, {2, 2, 2, 3}}) {
    const GroupSpec g(moduli);
    for (int rep = 0; rep < 3; ++rep) {
      const int n = std::uniform_int_distribution<int>(1, static_cast<int>(g.order()))(rng);
      const ConvLayer layer = random_layer(g, 3, 2, n, rep == 2 ? OffsetPolicy::contiguous : OffsetPolicy::uniform, rng());
      const Signal f = random_signal(g, 3, SignalKind::gaussian, rng());
      const Signal lf = apply(layer, f);
      for (const auto& x : g.elements()) {
        const Signal a = apply(layer, translate(f, x));
        const Signal b = translate(lf, x);
        worst = std::max(worst, (a.as_vector() - b.as_vector()).cwiseAbs().maxCoeff());
      }
      ++layers;
    }
  }
  return {worst <= 1e-12, format("%d layers, every translation, max |dev| %.2e (<= 1e-12)", layers, worst)};
}

Outcome gradient_fd() {
  const GroupSpec g({16});
  double worst = 0.0;
  int checked = 0;
  for (const auto& act : {Activation::identity(), Activation::shifted_softplus(), Activation::gelu_like()}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const Network net = random_network(g, {4, 6, 3}, {5}, act, derive_seed(seed, "fd-network"));
      const Signal f = random_signal(g, 4, SignalKind::bounded_uniform, derive_seed(seed, "fd-input"));
      const Signal grad = gradient(net, forward(net, f));
      Rng rng(derive_seed(seed, "fd-coords"));
      std::uniform_int_distribution<std::size_t> pick(0, f.size() - 1);
      for (int k = 0; k < 20; ++k) {
        const std::size_t i = pick(rng);
        const double h = 1e-5;
        Signal plus = f, minus = f;
        plus.values()[i] += h;
        minus.values()[i] -= h;
        const double fd = (forward(net, plus).output - forward(net, minus).output) / (2 * h);
        const double g_i = grad.flat()[i];
        worst = std::max(worst, std::abs(fd - g_i) / std::abs(g_i));
        ++checked;
      }
    }
  }
  return {worst <= 1e-5, format("3 activations x 10 seeds x 20 coords (%d), max rel err %.2e (<= 1e-5)", checked, worst)};
}

Outcome hutchinson() {
  const GroupSpec g({8});
  int ok = 0;
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Network net = random_network(g, {3, 4, 2}, {3}, Activation::shifted_softplus(), derive_seed(seed, "hutch"));
    const ForwardTrace tr = forward(net, random_signal(g, 3, SignalKind::bounded_uniform, derive_seed(seed, "input")));
    const double exact = exact_jacobian_frobenius_sq(net, tr);
    const FrobeniusEstimate est = frobenius_estimate(net, tr, 256, derive_seed(seed, "probes"));
    const double z = std::abs(est.mean - exact) / est.standard_error;
    worst = std::max(worst, z);
    ok += z <= 3.0 ? 1 : 0;
  }
  return {ok == 10, format("|G|=8, 10 seeds, 256 probes: %d/10 within 3 SE, worst %.2f SE", ok, worst)};
}

RunConfig base(std::vector<int> group, std::vector<int> widths, int trials) {
  RunConfig c;
  c.group = std::move(group);
  c.widths = std::move(widths);
  c.n = {9};
  c.trials = trials;
  c.seed = 20240601;
  validate(c);
  return c;
}

Outcome band() {
  const TrialStats s = run_spectrum_experiment(base({64}, {32, 8}, 200));
  const auto& b = s.bound("band");
  const auto smin = s.column("s_min");
  const auto smax = s.column("s_max");
  return {b.passes == b.trials,
          format("|G|=64 d=32 q=8 n=9: %zu/%zu in [0.05, 30]; s_min >= %.3f, s_max <= %.3f", b.passes, b.trials,
                 *std::min_element(smin.begin(), smin.end()), *std::max_element(smax.begin(), smax.end()))};
}

struct GradientRun {
  TrialStats stats;
  GradientRun() : stats(run_gradient_experiment(base({64}, {64, 32, 16}, 100))) {}
};

const TrialStats& gradient_stats() {
  static const GradientRun run;
  return run.stats;
}

Outcome gradient_bound() {
  const auto& b = gradient_stats().bound("gradient_bound");
  const auto v = gradient_stats().column("grad_norm_sq");
  return {b.passes >= 95, format("widths (64,32,16) t=2: %zu/100 >= 95; min ||grad||^2 %.3e vs bound %.3e", b.passes,
                                 *std::min_element(v.begin(), v.end()), gradient_stats().column("grad_bound")[0])};
}

Outcome frobenius_bound() {
  const auto& b = gradient_stats().bound("frobenius_within_bound");
  const auto v = gradient_stats().column("frobenius_estimate");
  return {b.passes >= 95, format("%zu/100 >= 95; min estimate %.3f vs bound %.3f", b.passes,
                                 *std::min_element(v.begin(), v.end()), gradient_stats().column("frobenius_bound")[0])};
}

Outcome output_bound() {
  const TrialStats s = run_output_experiment(base({64}, {64, 32, 16}, 200));
  const auto& b = s.bound("output_bound");
  return {b.passes >= 190, format("%zu/200 >= 190; max |H_b| %.3f vs %.3f; E[H_b^2] %.3g (bound %.3g)", b.passes,
                                  quantile(s.column("abs_hb"), 1.0), s.column("bound")[0], s.metric("second_moment"),
                                  s.metric("second_moment_bound"))};
}

Outcome robustness() {
  RunConfig c = base({64}, {64, 32, 16}, 20);
  c.samples = 50;
  const TrialStats s = run_robustness_experiment(c);
  const auto& b = s.bound("deviation_within_bound");
  const auto dev = s.column("max_gradient_deviation");
  const auto bound = s.column("robustness_bound");
  double ratio = 0.0;
  for (std::size_t i = 0; i < dev.size(); ++i) ratio = std::max(ratio, dev[i] / bound[i]);
  return {b.passes == 20, format("20 seeds x 50 samples: %zu/20 within bound, max deviation/bound %.2e", b.passes, ratio)};
}

Outcome attack() {
  RunConfig c = base({256}, {64, 16}, 100);
  const TrialStats s = run_attack_experiment(c);
  const auto& control = s.bound("control_flip");
  const auto& flip = s.bound("flip");

  // Step-length scale from the gradient lower bound: 2a / sqrt(bound).
  const Activation act = Activation::from_name(c.activation);
  const double c1 = std::sqrt(0.0001 * 0.1 * act.c() * act.c() / (2.0 * std::exp(1.0)));
  const double a = 10.0 * act.sup_derivative();
  const double step_scale = 2.0 * a / c1;

  SweepConfig sc;
  sc.groups = {{16}, {32}, {64}, {128}, {256}};
  sc.widths = c.widths;
  sc.n = c.n;
  sc.activation = act;
  sc.seeds = 100;
  sc.master_seed = c.seed;
  const SweepTable t = distance_scaling_sweep(sc);
  double step_lo = INFINITY, step_hi = 0, rho_lo = INFINITY, rho_hi = 0;
  std::ostringstream pts;
  for (const auto& p : t.points) {
    step_lo = std::min(step_lo, p.median_step_len);
    step_hi = std::max(step_hi, p.median_step_len);
    rho_lo = std::min(rho_lo, p.median_rho);
    rho_hi = std::max(rho_hi, p.median_rho);
    pts << " N0=" << p.n0 << ":step " << format("%.3g", p.median_step_len) << ",rho " << format("%.3g", p.median_rho)
        << ",flip " << p.flip_rate;
  }
  const bool a_ok = control.passes == control.trials;
  const bool b_ok = flip.rate() >= 0.8 && step_hi <= step_scale;
  const bool c_ok = rho_hi <= 2.0 * rho_lo;
  return {a_ok && b_ok && c_ok,
          format("(a) control %zu/%zu; (b) |G|=256 flip %.2f >= 0.8, median step in [%.3g, %.3g] <= %.3g; "
                 "(c) median rho in [%.3g, %.3g], ratio %.2f <= 2;",
                 control.passes, control.trials, flip.rate(), step_lo, step_hi, step_scale, rho_lo, rho_hi,
                 rho_hi / rho_lo) +
              pts.str()};
}

Outcome performance() {
  const ConvLayer layer = random_layer(GroupSpec({256}), 16, 8, 9, OffsetPolicy::uniform, 11);
  SpectralReport r = block_singular_values(layer);
  // best of three for the cheap path, so scheduler noise cannot sink it
  for (int k = 0; k < 2; ++k) r.block_seconds = std::min(r.block_seconds, block_singular_values(layer).block_seconds);
  const auto dense = attach_dense_timing(r, layer);
  const auto block = r.all_values();
  double dev = 0.0;
  for (std::size_t i = 0; i < dense.size(); ++i) dev = std::max(dev, std::abs(dense[i] - block[i]));
  const double speedup = *r.dense_seconds / r.block_seconds;
  return {speedup >= 10.0 && dev <= 1e-8 && dense.size() == block.size(),
          format("|G|=256 d=16 q=8: block %.4f s, dense %.2f s, speedup %.0fx (>= 10); max |dev| %.2e", r.block_seconds,
                 *r.dense_seconds, speedup, dev)};
}

Outcome reproducibility() {
  RunConfig c = base({32}, {16, 8, 4}, 10);
  c.samples = 10;
  c.probes = 16;
  c.sweep_groups = {16, 32};
  int same = 0, total = 0;
  std::string failed;
  for (const std::string name : {"spectrum", "gradient", "output", "robustness", "attack", "minf_sweep"}) {
    const TrialStats first = run_experiment(name, c);
    const TrialStats second = run_experiment(name, c);
    for (const auto fmt : {EmitFormat::csv, EmitFormat::json}) {
      ++total;
      if (render(first, fmt) == render(second, fmt)) ++same;
      else failed += " " + name;
    }
  }
  SweepConfig sc;
  sc.groups = {{16}, {32}};
  sc.widths = {16, 4};
  sc.seeds = 10;
  ++total;
  if (sweep_csv(distance_scaling_sweep(sc)) == sweep_csv(distance_scaling_sweep(sc))) ++same;
  else failed += " sweep";
  return {same == total, format("%d/%d outputs byte-identical across two runs", same, total) + failed};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"block-vs-dense spectra", block_vs_dense},
      {"translation equivariance", equivariance},
      {"gradient vs finite differences", gradient_fd},
      {"Hutchinson consistency", hutchinson},
      {"singular-value band", band},
      {"gradient-norm bound", gradient_bound},
      {"Frobenius bound", frobenius_bound},
      {"output bound", output_bound},
      {"robustness bound", robustness},
      {"attack behaviour", attack},
      {"block path speed", performance},
      {"reproducibility", reproducibility},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::cout << "criterion " << std::setw(2) << i + 1 << ' ' << (o.pass ? "PASS" : "FAIL") << "  "
              << criteria[i].first << ": " << o.detail << format("  [%.1f s]", seconds_since(start)) << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
