#pragma once

#include <string>

#include "json.hpp"
#include "gmdiv/mixture.hpp"

namespace gmdiv {

// Text record for a mixture:
//   {"dim":d,"atoms":[[[loc...],weight],...],"class_tag":"compact","params":{"M":2}}
// Field order is fixed; numbers are written with 17 significant digits.
std::string to_record(const MixingDistribution& m);
std::string to_record(const GaussianMixture& gm);

MixingDistribution mixing_from_record(const nlohmann::json& j);
MixingDistribution mixing_from_record(const std::string& text);
GaussianMixture mixture_from_record(const nlohmann::json& j);

}  // namespace gmdiv
