#pragma once

// Internal JSON glue shared by the persistence and command layers.

#include "json.hpp"
#include "ovfit/forest.hpp"
#include "ovfit/manifest.hpp"

namespace ovfit::detail {

nlohmann::json forest_to_json(const RandomForest& f);
RandomForest forest_from_json(const nlohmann::json& j);

nlohmann::json manifest_to_json(const RunManifest& m);

}  // namespace ovfit::detail
