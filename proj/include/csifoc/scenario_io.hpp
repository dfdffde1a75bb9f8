#pragma once

#include <string>

#include <nlohmann/json_fwd.hpp>

#include "csifoc/scenario.hpp"

namespace csifoc {

/// Parse a scenario document. Missing groups/keys take the shipped
/// defaults; unknown keys and invalid values are rejected with messages
/// naming the key and expected unit. An empty document yields the full
/// default scenario.
Scenario scenario_from_json(const nlohmann::ordered_json& j);
Scenario load_scenario(const std::string& path);

/// Serialize with every effective (resolved) value made explicit, so that
/// parse(write(sc)) == sc.
nlohmann::ordered_json scenario_to_json(const Scenario& sc);
void save_scenario(const Scenario& sc, const std::string& path);

}  // namespace csifoc
