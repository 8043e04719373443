#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "abelconv/network.hpp"
#include "abelconv/signal.hpp"

namespace abelconv {

/// How the attack picks its target output change a.
struct StepScale {
  enum class Mode {
    standard,// a = 10 sup|sigma'|^t
    fixed,   // a = value
    oracle,  // a = |H_b(f)|
  };
  Mode mode = Mode::standard;
  double value = 0.0;

  static StepScale standard() { return {}; }
  static StepScale fixed(double a) { return {Mode::fixed, a}; }
  static StepScale oracle() { return {Mode::oracle, 0.0}; }
};

double default_attack_scale(const Network& net);

struct AttackReport {
  double output_before = 0.0;  // H_b(f)
  int sign_before = 0;
  double a = 0.0;
  double eta = 0.0;            // 2a / ||grad||^2
  int direction = 0;           // -1 descends, +1 ascends
  Signal perturbed;            // f^(1) = f + direction * eta * grad
  double output_after = 0.0;
  int sign_after = 0;
  bool flipped = false;        // sign_after != sign_before
  bool on_boundary = false;    // H_b(f) == 0
  bool input_bounded = true;   // ||f||_inf <= 1
  double step_length = 0.0;    // ||f - f^(1)||
  double rho = 0.0;            // step_length sqrt(N_0) / ||f||; NaN for f = 0
  double gradient_norm = 0.0;
  double input_norm = 0.0;
  std::vector<std::string> warnings;
};

/// One gradient step of length 2a / ||grad H_b(f)|| against the sign of H_b(f).
/// A zero output descends. Throws DegenerateAttackError on a zero gradient.
AttackReport single_step_attack(const Network& net, const Signal& f,
                                const StepScale& scale = StepScale::standard());

struct SweepConfig {
  std::vector<std::vector<int>> groups;  // one group per grid point
  std::vector<int> widths;
  std::vector<int> n{9};
  Activation activation = Activation::shifted_softplus();
  OffsetPolicy offset_policy = OffsetPolicy::uniform;
  StepScale scale;
  int seeds = 100;
  std::uint64_t master_seed = 1;
};

struct SweepRow {
  std::size_t n0 = 0;
  std::size_t group_order = 0;
  int d0 = 0;
  std::uint64_t seed = 0;
  bool flip = false;
  double rho = 0.0;
  double step_len = 0.0;
  double grad_norm = 0.0;
  double hb_before = 0.0;
  double hb_after = 0.0;
};

struct SweepPoint {
  std::size_t n0 = 0;
  std::size_t group_order = 0;
  double flip_rate = 0.0;
  double median_rho = 0.0;
  double median_step_len = 0.0;
  double median_grad_norm = 0.0;
};

struct SweepTable {
  std::vector<SweepRow> rows;
  std::vector<SweepPoint> points;
};

/// Per grid point, `seeds` random networks each attacked at a bounded-uniform
/// input. Trial k of grid point p uses derive_seed(master, "sweep", p * 2^32 + k).
SweepTable distance_scaling_sweep(const SweepConfig& config);

/// Columns: N_0,group_order,d_0,seed,flip,rho,step_len,grad_norm,Hb_before,Hb_after
std::string sweep_csv(const SweepTable& table);

}  // namespace abelconv
