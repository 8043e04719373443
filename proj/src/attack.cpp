#include "abelconv/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "abelconv/errors.hpp"
#include "abelconv/parallel.hpp"
#include "abelconv/rng.hpp"
#include "abelconv/stats.hpp"

namespace abelconv {

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

double default_attack_scale(const Network& net) {
  return 10.0 * std::pow(net.activation().sup_derivative(), static_cast<double>(net.depth()));
}

AttackReport single_step_attack(const Network& net, const Signal& f, const StepScale& scale) {
  const ForwardTrace trace = forward(net, f);
  const Signal grad = gradient(net, trace);

  AttackReport report{.perturbed = f, .warnings = {}};
  report.output_before = trace.output;
  report.sign_before = sign_of(trace.output);
  report.on_boundary = report.sign_before == 0;
  report.input_norm = l2_norm(f);
  report.gradient_norm = l2_norm(grad);
  report.input_bounded = linf_norm(f) <= 1.0;
  if (!report.input_bounded) {
    report.warnings.push_back("input violates ||f||_inf <= 1");
  }
  if (report.on_boundary) report.warnings.push_back("input already on the decision boundary");

  switch (scale.mode) {
    case StepScale::Mode::standard: report.a = default_attack_scale(net); break;
    case StepScale::Mode::fixed: report.a = scale.value; break;
    case StepScale::Mode::oracle: report.a = std::abs(trace.output); break;
  }
  if (!(report.gradient_norm > 0.0)) {
    std::ostringstream os;
    os << "zero gradient at the input (H_b(f) = " << trace.output << ", ||f|| = "
       << report.input_norm << ")";
    throw DegenerateAttackError(os.str());
  }

  report.eta = 2.0 * report.a / (report.gradient_norm * report.gradient_norm);
  report.direction = report.sign_before < 0 ? 1 : -1;
  report.perturbed.as_vector() += (report.direction * report.eta) * grad.as_vector();

  report.output_after = forward(net, report.perturbed).output;
  report.sign_after = sign_of(report.output_after);
  report.flipped = report.sign_after != report.sign_before;
  report.step_length = report.eta * report.gradient_norm;
  report.rho = report.input_norm > 0.0
                   ? report.step_length * std::sqrt(static_cast<double>(f.size())) / report.input_norm
                   : std::numeric_limits<double>::quiet_NaN();
  return report;
}

SweepTable distance_scaling_sweep(const SweepConfig& config) {
  if (config.groups.empty()) throw InvalidConfigError("sweep_groups", "sweep needs at least one group");
  if (config.seeds < 1) throw InvalidConfigError("trials", "sweep needs at least one seed");
  SweepTable table;
  const auto seeds = static_cast<std::size_t>(config.seeds);
  table.rows.resize(config.groups.size() * seeds);
  for (std::size_t p = 0; p < config.groups.size(); ++p) {
    const GroupSpec spec(config.groups[p]);
    parallel_for(seeds, [&](std::size_t k) {
      const std::uint64_t seed = derive_seed(config.master_seed, "sweep", (p << 32) + k);
      const Network net = random_network(spec, config.widths, config.n, config.activation,
                                         derive_seed(seed, "network"), config.offset_policy);
      const Signal f = random_signal(spec, net.input_channels(), SignalKind::bounded_uniform,
                                     derive_seed(seed, "input"));
      const AttackReport rep = single_step_attack(net, f, config.scale);
      SweepRow& row = table.rows[p * seeds + k];
      row.n0 = net.input_size();
      row.group_order = spec.order();
      row.d0 = net.input_channels();
      row.seed = seed;
      row.flip = rep.flipped;
      row.rho = rep.rho;
      row.step_len = rep.step_length;
      row.grad_norm = rep.gradient_norm;
      row.hb_before = rep.output_before;
      row.hb_after = rep.output_after;
    });
    SweepPoint point;
    std::vector<double> rho, step, grad;
    std::size_t flips = 0;
    for (std::size_t k = 0; k < seeds; ++k) {
      const SweepRow& row = table.rows[p * seeds + k];
      point.n0 = row.n0;
      point.group_order = row.group_order;
      flips += row.flip ? 1 : 0;
      rho.push_back(row.rho);
      step.push_back(row.step_len);
      grad.push_back(row.grad_norm);
    }
    point.flip_rate = static_cast<double>(flips) / static_cast<double>(seeds);
    point.median_rho = quantile(rho, 0.5);
    point.median_step_len = quantile(step, 0.5);
    point.median_grad_norm = quantile(grad, 0.5);
    table.points.push_back(point);
  }
  return table;
}

std::string sweep_csv(const SweepTable& table) {
  std::ostringstream os;
  os.precision(17);
  os << "N_0,group_order,d_0,seed,flip,rho,step_len,grad_norm,Hb_before,Hb_after\n";
  for (const auto& r : table.rows) {
    os << r.n0 << ',' << r.group_order << ',' << r.d0 << ',' << r.seed << ',' << (r.flip ? 1 : 0)
       << ',' << r.rho << ',' << r.step_len << ',' << r.grad_norm << ',' << r.hb_before << ','
       << r.hb_after << '\n';
  }
  return os.str();
}

}  // namespace abelconv
