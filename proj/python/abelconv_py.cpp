// Python bindings. Signals cross the boundary as float64 arrays of shape
// (|G|, channels) in group enumeration order.

#include <complex>
#include <map>
#include <string>
#include <vector>

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "abelconv/attack.hpp"
#include "abelconv/config.hpp"
#include "abelconv/convop.hpp"
#include "abelconv/errors.hpp"
#include "abelconv/group.hpp"
#include "abelconv/network.hpp"
#include "abelconv/serialize.hpp"
#include "abelconv/spectral.hpp"
#include "abelconv/verify.hpp"

namespace py = pybind11;
using namespace abelconv;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

Signal to_signal(const GroupSpec& spec, int channels, const Array& x) {
  const auto order = static_cast<py::ssize_t>(spec.order());
  const bool flat_ok = x.ndim() == 1 && x.shape(0) == order * channels;
  const bool shaped_ok = x.ndim() == 2 && x.shape(0) == order && x.shape(1) == channels;
  if (!flat_ok && !shaped_ok) {
    throw StructuralError("expected an array of shape (" + std::to_string(order) + ", " +
                          std::to_string(channels) + ")");
  }
  return Signal(spec, channels, std::vector<double>(x.data(), x.data() + x.size()));
}

Array to_array(const Signal& s) {
  Array out({static_cast<py::ssize_t>(s.spec().order()), static_cast<py::ssize_t>(s.channels())});
  std::copy(s.flat().begin(), s.flat().end(), out.mutable_data());
  return out;
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

nlohmann::json py_to_json(const py::object& o) {
  return nlohmann::json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

StepScale scale_from(const py::object& a) {
  if (a.is_none()) return StepScale::standard();
  if (py::isinstance<py::str>(a)) {
    if (a.cast<std::string>() == "oracle") return StepScale::oracle();
    throw InvalidConfigError("a_override", "expected None, 'oracle' or a number");
  }
  return StepScale::fixed(a.cast<double>());
}

RunConfig config_from(const std::map<std::string, py::object>& overrides) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto& [key, value] : overrides) {
    pairs.emplace_back(key, py::isinstance<py::str>(value) ? value.cast<std::string>()
                                                          : py::str(py::module_::import("json").attr("dumps")(value))
                                                                .cast<std::string>());
  }
  return parse_and_validate("", pairs);
}

}  // namespace

PYBIND11_MODULE(_abelconv, m) {
  m.doc() = "Convolutional operators on finite abelian groups";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<StructuralError>(m, "StructuralError", base.ptr());
  py::register_exception<InvalidConfigError>(m, "InvalidConfigError", base.ptr());
  py::register_exception<CapacityError>(m, "CapacityError", base.ptr());
  py::register_exception<DegenerateAttackError>(m, "DegenerateAttackError", base.ptr());

  py::class_<GroupSpec>(m, "Group")
      .def(py::init<std::vector<int>>(), py::arg("moduli"))
      .def_property_readonly("moduli", [](const GroupSpec& g) {
        return std::vector<int>(g.moduli().begin(), g.moduli().end());
      })
      .def_property_readonly("order", &GroupSpec::order)
      .def("element", [](const GroupSpec& g, std::size_t i) { return g.element(i).residues; })
      .def("index_of", [](const GroupSpec& g, std::vector<int> r) { return g.index_of(GroupElement{std::move(r)}); })
      .def("multiply_index", &GroupSpec::multiply_index)
      .def("inverse_index", &GroupSpec::inverse_index)
      .def("character_table", [](const GroupSpec& g) {
        const auto chars = characters(g);
        py::array_t<std::complex<double>> out(
            {static_cast<py::ssize_t>(chars.size()), static_cast<py::ssize_t>(g.order())});
        auto* data = out.mutable_data();
        for (std::size_t c = 0; c < chars.size(); ++c) {
          for (std::size_t h = 0; h < g.order(); ++h) *data++ = eval_character(chars[c], g.element(h), g);
        }
        return out;
      })
      .def("__repr__", [](const GroupSpec& g) { return "Group(" + g.to_string() + ")"; });

  py::class_<ConvLayer>(m, "ConvLayer")
      .def_static(
          "random",
          [](const GroupSpec& g, int d_in, int d_out, int n, const std::string& policy, std::uint64_t seed) {
            return random_layer(g, d_in, d_out, n, offset_policy_from_name(policy), seed);
          },
          py::arg("group"), py::arg("d_in"), py::arg("d_out"), py::arg("n"),
          py::arg("offset_policy") = "uniform", py::arg("seed") = 1)
      .def_static("identity", &ConvLayer::identity, py::arg("group"), py::arg("d"))
      .def_property_readonly("group", &ConvLayer::spec)
      .def_property_readonly("d_in", &ConvLayer::d_in)
      .def_property_readonly("d_out", &ConvLayer::d_out)
      .def_property_readonly("n", &ConvLayer::n)
      .def_property_readonly("offsets", [](const ConvLayer& l) {
        std::vector<std::vector<int>> out;
        for (const auto& g : l.offsets()) out.push_back(g.residues);
        return out;
      })
      .def_property_readonly("weights", &ConvLayer::weights)
      .def("apply", [](const ConvLayer& l, const Array& x) { return to_array(apply(l, to_signal(l.spec(), l.d_in(), x))); })
      .def("apply_adjoint",
           [](const ConvLayer& l, const Array& y) { return to_array(apply_adjoint(l, to_signal(l.spec(), l.d_out(), y))); })
      .def("to_dense", [](const ConvLayer& l) { return to_dense(l); })
      .def("to_json", [](const ConvLayer& l) { return json_to_py(to_json(l)); });

  py::class_<SpectralReport>(m, "SpectralReport")
      .def_readonly("s_min", &SpectralReport::s_min)
      .def_readonly("s_max", &SpectralReport::s_max)
      .def_readonly("total_count", &SpectralReport::total_count)
      .def_readonly("block_seconds", &SpectralReport::block_seconds)
      .def("values", &SpectralReport::all_values)
      .def("values_for", &SpectralReport::values_for, py::arg("character"));

  m.def("block_singular_values", &block_singular_values, py::arg("layer"),
        "Singular values of a layer through its per-character multipliers.");
  m.def("dense_singular_values", [](const ConvLayer& l) { return dense_singular_values(l); }, py::arg("layer"),
        "Singular values of the materialised operator, descending.");
  m.def("multiplier", [](const ConvLayer& l, std::size_t c) { return Eigen::MatrixXcd(multipliers(l).at(c).matrix); },
        py::arg("layer"), py::arg("character"));

  py::class_<Network>(m, "Network")
      .def_static(
          "random",
          [](const GroupSpec& g, const std::vector<int>& widths, const std::vector<int>& n,
             const std::string& activation, std::uint64_t seed, const std::string& policy) {
            return random_network(g, widths, n, Activation::from_name(activation), seed,
                                  offset_policy_from_name(policy));
          },
          py::arg("group"), py::arg("widths"), py::arg("n") = std::vector<int>{9},
          py::arg("activation") = "shifted-softplus", py::arg("seed") = 1, py::arg("offset_policy") = "uniform")
      .def_static("from_json", [](const py::object& o) { return network_from_json(py_to_json(o)); })
      .def("to_json", [](const Network& net) { return json_to_py(to_json(net)); })
      .def_property_readonly("group", &Network::spec)
      .def_property_readonly("widths", &Network::widths)
      .def_property_readonly("depth", &Network::depth)
      .def_property_readonly("layers", &Network::layers)
      .def_property_readonly("readout", &Network::readout)
      .def("__call__", [](const Network& net, const Array& x) {
        return forward(net, to_signal(net.spec(), net.input_channels(), x)).output;
      })
      .def("gradient", [](const Network& net, const Array& x) {
        return to_array(gradient(net, forward(net, to_signal(net.spec(), net.input_channels(), x))));
      })
      .def("jvp", [](const Network& net, const Array& x, const Array& v) {
        const auto trace = forward(net, to_signal(net.spec(), net.input_channels(), x));
        return to_array(jacobian_vector_product(net, trace, to_signal(net.spec(), net.input_channels(), v)));
      });

  m.def(
      "attack",
      [](const Network& net, const Array& x, const py::object& a) {
        const AttackReport r =
            single_step_attack(net, to_signal(net.spec(), net.input_channels(), x), scale_from(a));
        py::dict out = json_to_py(to_json(r)).cast<py::dict>();
        out["perturbed"] = to_array(r.perturbed);
        return out;
      },
      py::arg("network"), py::arg("x"), py::arg("a") = py::none(),
      "One gradient step against the sign of the output. `a` is None, 'oracle' or a number.");

  m.def(
      "run_experiment",
      [](const std::string& name, const std::map<std::string, py::object>& overrides) {
        return json_to_py(to_json(run_experiment(name, config_from(overrides))));
      },
      py::arg("name"), py::arg("config") = std::map<std::string, py::object>{},
      "Run a named experiment with config overrides and return its JSON report.");

  m.def("config_keys", &config_keys);
}
