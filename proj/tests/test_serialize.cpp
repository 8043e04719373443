#include <sstream>

#include "doctest.h"

#include "abelconv/errors.hpp"
#include "abelconv/serialize.hpp"

using namespace abelconv;

TEST_CASE("network bundle round trip") {
  const Network net = random_network(GroupSpec({2, 6}), {3, 4, 2}, {5, 2}, Activation::gelu_like(), 42,
                                     OffsetPolicy::contiguous);
  const nlohmann::json j = to_json(net);
  CHECK(j["format"] == "abelconv-network");
  CHECK(j["layers"][0]["offsets"][0].is_array());
  CHECK(j["layers"][0]["weights"][0].size() == 12);
  const Network back = network_from_json(nlohmann::json::parse(j.dump()));
  CHECK(back == net);
  CHECK(to_json(back) == j);

  // row-major weights
  CHECK(j["layers"][0]["weights"][0][1] == net.layers()[0].weights()[0](0, 1));

  nlohmann::json no_seed = j;
  no_seed["seed"] = nullptr;
  CHECK_FALSE(network_from_json(no_seed).seed().has_value());

  nlohmann::json bad = j;
  bad["version"] = 99;
  CHECK_THROWS_AS(network_from_json(bad), StructuralError);
  bad = j;
  bad["layers"][0]["weights"][0].erase(0);
  CHECK_THROWS_AS(network_from_json(bad), StructuralError);
  bad = j;
  bad.erase("readout");
  CHECK_THROWS_AS(network_from_json(bad), StructuralError);
}

TEST_CASE("network csv lists every parameter") {
  const Network net = random_network(GroupSpec({4}), {2, 3}, {2}, Activation::identity(), 1);
  const std::string csv = network_to_csv(net);
  std::istringstream in(csv);
  std::size_t offsets = 0, weights = 0, readout = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("offset,", 0) == 0) ++offsets;
    if (line.rfind("weight,", 0) == 0) ++weights;
    if (line.rfind("readout,", 0) == 0) ++readout;
  }
  CHECK(offsets == 2);
  CHECK(weights == 6);
  CHECK(readout == 1);
}

TEST_CASE("spectra csv") {
  const ConvLayer layer = random_layer(GroupSpec({6}), 3, 2, 2, OffsetPolicy::uniform, 5);
  const SpectralReport r = block_singular_values(layer);
  const std::string csv = spectra_csv(r);
  CHECK(csv.rfind("character_index,block_sv_rank,value\n", 0) == 0);
  std::size_t rows = 0;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) ++rows;
  CHECK(rows == r.total_count);
  const auto s = spectra_summary(r);
  CHECK(s["s_min"] == r.s_min);
  CHECK(s["dense_seconds"].is_null());
}
