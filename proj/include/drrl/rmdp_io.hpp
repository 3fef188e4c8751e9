#pragma once

#include "drrl/robust_core.hpp"

#include <json.hpp>
#include <string>

namespace drrl {

/// Keys: S, A, H, rewards[h][s][a], kernel[h][s][a][s'], fail_states, initial_state.
nlohmann::json rmdp_to_json(const TabularRMDP& rmdp);

/// Parses and validates; throws ValidationError on schema or invariant violations.
TabularRMDP rmdp_from_json(const nlohmann::json& doc);

TabularRMDP load_rmdp(const std::string& path);
void save_rmdp(const TabularRMDP& rmdp, const std::string& path);

} // namespace drrl
