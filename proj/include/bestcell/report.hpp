#pragma once

#include <string>

#include <json.hpp>

#include "bestcell/attachment.hpp"
#include "bestcell/dimensioning.hpp"
#include "bestcell/montecarlo.hpp"

namespace bestcell::report {

/// Round-trip decimal text: 17 significant digits, "inf"/"-inf"/"nan" spelled out.
std::string format_double(double v);

nlohmann::json to_json(const NetworkConfig& cfg);
nlohmann::json to_json(const SystemConstants& sys);
nlohmann::json to_json(const montecarlo::SimSpec& spec);
nlohmann::json to_json(const montecarlo::Moments& m);
nlohmann::json to_json(const montecarlo::SimResult& result);

}  // namespace bestcell::report
