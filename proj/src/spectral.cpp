#include "abelconv/spectral.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <limits>

#include <Eigen/SVD>

#include "abelconv/errors.hpp"
#include "abelconv/parallel.hpp"

extern "C" void dgesvd_(const char* jobu, const char* jobvt, const int* m, const int* n, double* a,
                        const int* lda, double* s, double* u, const int* ldu, double* vt, const int* ldvt,
                        double* work, const int* lwork, int* info);

namespace abelconv {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// chi(g_i) for every offset, using the index form of the character.
std::vector<std::complex<double>> offset_phases(const ConvLayer& layer, const Character& chi) {
  std::vector<std::complex<double>> out;
  out.reserve(layer.n());
  for (const auto& g : layer.offsets()) out.push_back(eval_character(chi, g, layer.spec()));
  return out;
}

std::vector<double> block_values(const Eigen::MatrixXcd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& s = svd.singularValues();
  return {s.data(), s.data() + s.size()};
}

}  // namespace

Eigen::MatrixXcd multiplier(const ConvLayer& layer, const Character& chi) {
  const auto phases = offset_phases(layer, chi);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(layer.d_out(), layer.d_in());
  for (std::size_t i = 0; i < layer.n(); ++i) {
    m += phases[i] * layer.weights()[i].cast<std::complex<double>>();
  }
  return m * layer.scale();
}

std::vector<FourierMultiplier> multipliers(const ConvLayer& layer) {
  std::vector<FourierMultiplier> out;
  for (auto& chi : characters(layer.spec())) {
    Eigen::MatrixXcd m = multiplier(layer, chi);
    out.push_back({std::move(chi), std::move(m)});
  }
  return out;
}

SpectralReport block_singular_values(const ConvLayer& layer) {
  const auto start = Clock::now();
  const GroupSpec& spec = layer.spec();
  const auto chars = characters(spec);

  SpectralReport report;
  report.group_order = spec.order();
  report.d_in = layer.d_in();
  report.d_out = layer.d_out();

  // Representatives: every character whose position is <= its conjugate's.
  for (std::size_t k = 0; k < chars.size(); ++k) {
    const std::size_t conj = spec.inverse_index(k);
    if (k > conj) continue;
    CharacterBlock block;
    block.character = k;
    block.conjugate = conj;
    block.multiplicity = (k == conj) ? 1 : 2;
    report.blocks.push_back(std::move(block));
  }

  parallel_for(report.blocks.size(), [&](std::size_t b) {
    CharacterBlock& block = report.blocks[b];
    block.singular_values = block_values(multiplier(layer, chars[block.character]));
    block.rank = static_cast<std::size_t>(
        std::count_if(block.singular_values.begin(), block.singular_values.end(),
                      [](double s) { return s > kRankTolerance; }));
  });

  report.s_min = std::numeric_limits<double>::infinity();
  report.s_max = 0.0;
  for (const auto& block : report.blocks) {
    report.total_count += block.singular_values.size() * static_cast<std::size_t>(block.multiplicity);
    if (!block.singular_values.empty()) {
      report.s_max = std::max(report.s_max, block.singular_values.front());
      report.s_min = std::min(report.s_min, block.singular_values.back());
    }
  }
  report.block_seconds = seconds_since(start);
  return report;
}

std::vector<double> SpectralReport::all_values() const {
  std::vector<double> out;
  out.reserve(total_count);
  for (const auto& block : blocks) {
    for (int rep = 0; rep < block.multiplicity; ++rep) {
      out.insert(out.end(), block.singular_values.begin(), block.singular_values.end());
    }
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

const std::vector<double>& SpectralReport::values_for(std::size_t character) const {
  for (const auto& block : blocks) {
    if (block.character == character || block.conjugate == character) return block.singular_values;
  }
  throw StructuralError("character position " + std::to_string(character) + " not in report");
}

std::vector<double> dense_singular_values(const ConvLayer& layer, std::size_t max_entries) {
  // LAPACK dgesvd rather than Eigen's BDCSVD: the latter (3.4.0) returns wrong
  // values on the heavily repeated spectra these operators have.
  Eigen::MatrixXd dense = to_dense(layer, max_entries);
  int m = static_cast<int>(dense.rows());
  int n = static_cast<int>(dense.cols());
  int lda = std::max(1, m);
  int one = 1;
  int info = 0;
  char job = 'N';
  std::vector<double> s(static_cast<std::size_t>(std::min(m, n)));
  double unused = 0.0;
  double query = 0.0;
  int lwork = -1;
  dgesvd_(&job, &job, &m, &n, dense.data(), &lda, s.data(), &unused, &one, &unused, &one, &query, &lwork,
          &info);
  lwork = static_cast<int>(query);
  std::vector<double> work(static_cast<std::size_t>(std::max(1, lwork)));
  dgesvd_(&job, &job, &m, &n, dense.data(), &lda, s.data(), &unused, &one, &unused, &one, work.data(),
          &lwork, &info);
  if (info != 0) throw Error("dgesvd failed with info = " + std::to_string(info));
  return s;
}

std::vector<double> attach_dense_timing(SpectralReport& report, const ConvLayer& layer,
                                        std::size_t max_entries) {
  const auto start = Clock::now();
  auto values = dense_singular_values(layer, max_entries);
  report.dense_seconds = seconds_since(start);
  return values;
}

BandCheck band_check(const SpectralReport& report, double a, double b) {
  if (!(a < b)) throw InvalidConfigError("band", "band requires a < b");
  BandCheck check;
  check.lower_margin = report.s_min - a;
  check.upper_margin = b - report.s_max;
  check.pass = check.lower_margin >= 0.0 && check.upper_margin >= 0.0;
  return check;
}

double spectral_norm(const ConvLayer& layer) { return block_singular_values(layer).s_max; }

}  // namespace abelconv
