#pragma once

#include <string>

#include "json.hpp"

#include "abelconv/attack.hpp"
#include "abelconv/convop.hpp"
#include "abelconv/network.hpp"
#include "abelconv/spectral.hpp"

namespace abelconv {

inline constexpr int kBundleVersion = 1;

// Layer: {"d_in", "d_out", "offsets": [[residues]...], "weights": [[row-major]...]}
nlohmann::json to_json(const ConvLayer& layer);
ConvLayer layer_from_json(const GroupSpec& spec, const nlohmann::json& j);

// Network bundle: {"format": "abelconv-network", "version", "group", "widths",
// "activation", "seed" (null when unknown), "layers", "readout"}.
nlohmann::json to_json(const Network& net);
Network network_from_json(const nlohmann::json& j);

/// Same content as the JSON bundle, one CSV table: `kind,layer,index,row,values`
/// where kind is offset | weight | readout; values are ';'-joined.
std::string network_to_csv(const Network& net);

/// `character_index,block_sv_rank,value` for every character (conjugates
/// included), ranks counted from 0 in descending order.
std::string spectra_csv(const SpectralReport& report);

/// s_min, s_max, counts and timings.
nlohmann::json spectra_summary(const SpectralReport& report);

/// Everything except the perturbed signal unless `with_signal`.
nlohmann::json to_json(const AttackReport& report, bool with_signal = false);

nlohmann::json to_json(const Diagnostics& d);

}  // namespace abelconv
