#pragma once

#include "latent_diversity/latent_core.hpp"
#include "latent_diversity/stats.hpp"

#include <json.hpp>

#include <string>

namespace latent_diversity {

// Schemas are documented in docs/json_schemas.md.
nlohmann::json to_json(const DiversityScore& score);
nlohmann::json to_json(const FidScore& score);
nlohmann::json to_json(const ComparisonReport& report);

/// Compact, byte-stable rendering: object keys sorted, floating-point values
/// printed with 17 significant digits.
std::string stable_dump(const nlohmann::json& doc);

}  // namespace latent_diversity
