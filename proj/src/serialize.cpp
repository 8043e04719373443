#include "abelconv/serialize.hpp"

#include <cmath>
#include <sstream>

#include "abelconv/errors.hpp"

namespace abelconv {

namespace {

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  if (!j.contains(key)) throw StructuralError(std::string("bundle is missing '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw StructuralError(std::string("bundle field '") + key + "': " + e.what());
  }
}

}  // namespace

nlohmann::json to_json(const ConvLayer& layer) {
  nlohmann::json offsets = nlohmann::json::array();
  for (const auto& g : layer.offsets()) offsets.push_back(g.residues);
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : layer.weights()) {
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(w.size()));
    for (Eigen::Index r = 0; r < w.rows(); ++r)
      for (Eigen::Index c = 0; c < w.cols(); ++c) flat.push_back(w(r, c));
    weights.push_back(flat);
  }
  return {{"d_in", layer.d_in()}, {"d_out", layer.d_out()}, {"offsets", offsets}, {"weights", weights}};
}

ConvLayer layer_from_json(const GroupSpec& spec, const nlohmann::json& j) {
  const int d_in = field<int>(j, "d_in");
  const int d_out = field<int>(j, "d_out");
  std::vector<GroupElement> offsets;
  for (auto& r : field<std::vector<std::vector<int>>>(j, "offsets")) offsets.push_back({std::move(r)});
  std::vector<Eigen::MatrixXd> weights;
  for (const auto& flat : field<std::vector<std::vector<double>>>(j, "weights")) {
    if (flat.size() != static_cast<std::size_t>(d_in) * static_cast<std::size_t>(d_out)) {
      throw StructuralError("weight matrix has " + std::to_string(flat.size()) + " entries, expected " +
                            std::to_string(d_in * d_out));
    }
    Eigen::MatrixXd w(d_out, d_in);
    for (int r = 0; r < d_out; ++r)
      for (int c = 0; c < d_in; ++c) w(r, c) = flat[static_cast<std::size_t>(r * d_in + c)];
    weights.push_back(std::move(w));
  }
  return ConvLayer(spec, d_in, d_out, std::move(offsets), std::move(weights));
}

nlohmann::json to_json(const Network& net) {
  nlohmann::json j;
  j["format"] = "abelconv-network";
  j["version"] = kBundleVersion;
  j["group"] = std::vector<int>(net.spec().moduli().begin(), net.spec().moduli().end());
  j["widths"] = net.widths();
  j["activation"] = std::string(net.activation().name());
  j["seed"] = net.seed() ? nlohmann::json(*net.seed()) : nlohmann::json(nullptr);
  auto& layers = j["layers"] = nlohmann::json::array();
  for (const auto& layer : net.layers()) layers.push_back(to_json(layer));
  j["readout"] = std::vector<double>(net.readout().data(), net.readout().data() + net.readout().size());
  return j;
}

Network network_from_json(const nlohmann::json& j) {
  if (field<std::string>(j, "format") != "abelconv-network") throw StructuralError("not a network bundle");
  if (field<int>(j, "version") != kBundleVersion) throw StructuralError("unsupported bundle version");
  const GroupSpec spec(field<std::vector<int>>(j, "group"));
  std::vector<ConvLayer> layers;
  for (const auto& lj : j.at("layers")) layers.push_back(layer_from_json(spec, lj));
  const auto readout = field<std::vector<double>>(j, "readout");
  std::optional<std::uint64_t> seed;
  if (!j.at("seed").is_null()) seed = field<std::uint64_t>(j, "seed");
  Network net(std::move(layers), Activation::from_name(field<std::string>(j, "activation")),
              Eigen::Map<const Eigen::VectorXd>(readout.data(), static_cast<Eigen::Index>(readout.size())),
              seed);
  if (j.contains("widths") && field<std::vector<int>>(j, "widths") != net.widths()) {
    throw StructuralError("bundle widths disagree with its layers");
  }
  return net;
}

std::string network_to_csv(const Network& net) {
  std::ostringstream os;
  os.precision(17);
  os << "# group=" << net.spec().to_string() << " activation=" << net.activation().name() << " seed=";
  if (net.seed()) os << *net.seed();
  else os << "none";
  os << '\n' << "kind,layer,index,row,values\n";
  auto joined = [&](auto begin, auto end) {
    bool first = true;
    for (auto it = begin; it != end; ++it) {
      if (!first) os << ';';
      os << *it;
      first = false;
    }
  };
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const ConvLayer& layer = net.layers()[l];
    for (std::size_t i = 0; i < layer.n(); ++i) {
      os << "offset," << l << ',' << i << ",0,";
      joined(layer.offsets()[i].residues.begin(), layer.offsets()[i].residues.end());
      os << '\n';
    }
    for (std::size_t i = 0; i < layer.n(); ++i) {
      const Eigen::MatrixXd& w = layer.weights()[i];
      for (Eigen::Index r = 0; r < w.rows(); ++r) {
        const Eigen::RowVectorXd row = w.row(r);
        os << "weight," << l << ',' << i << ',' << r << ',';
        joined(row.data(), row.data() + row.size());
        os << '\n';
      }
    }
  }
  os << "readout,0,0,0,";
  joined(net.readout().data(), net.readout().data() + net.readout().size());
  os << '\n';
  return os.str();
}

std::string spectra_csv(const SpectralReport& report) {
  std::ostringstream os;
  os.precision(17);
  os << "character_index,block_sv_rank,value\n";
  for (std::size_t c = 0; c < report.group_order; ++c) {
    const auto& values = report.values_for(c);
    for (std::size_t r = 0; r < values.size(); ++r) os << c << ',' << r << ',' << values[r] << '\n';
  }
  return os.str();
}

nlohmann::json spectra_summary(const SpectralReport& report) {
  nlohmann::json j;
  j["group_order"] = report.group_order;
  j["d_in"] = report.d_in;
  j["d_out"] = report.d_out;
  j["s_min"] = report.s_min;
  j["s_max"] = report.s_max;
  j["total_count"] = report.total_count;
  j["blocks_computed"] = report.blocks.size();
  j["block_seconds"] = report.block_seconds;
  j["dense_seconds"] = report.dense_seconds ? nlohmann::json(*report.dense_seconds) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const AttackReport& r, bool with_signal) {
  nlohmann::json j{{"output_before", r.output_before},
                   {"sign_before", r.sign_before},
                   {"a", r.a},
                   {"eta", r.eta},
                   {"direction", r.direction},
                   {"output_after", r.output_after},
                   {"sign_after", r.sign_after},
                   {"flipped", r.flipped},
                   {"on_boundary", r.on_boundary},
                   {"input_bounded", r.input_bounded},
                   {"step_length", r.step_length},
                   {"rho", number_or_null(r.rho)},
                   {"gradient_norm", r.gradient_norm},
                   {"input_norm", r.input_norm},
                   {"warnings", r.warnings}};
  if (with_signal) j["perturbed"] = r.perturbed.flat();
  return j;
}

nlohmann::json to_json(const Diagnostics& d) {
  return {{"m_s", d.m_s},
          {"m_infinity", d.m_infinity},
          {"m_infinity_readout", d.m_infinity_readout},
          {"m_analytic", d.m_analytic},
          {"m_sampled", d.m_sampled},
          {"robustness_bound", d.robustness_bound},
          {"max_gradient_deviation", d.max_gradient_deviation},
          {"pairs", d.pairs}};
}

}  // namespace abelconv
