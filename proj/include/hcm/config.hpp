#pragma once

#include <filesystem>
#include <string>

#include "hcm/engine.hpp"
#include "json.hpp"

namespace hcm {

// Strict parser for the run configuration document. Unknown keys are
// rejected so unit or convention mistakes surface immediately.
HcmConfig config_from_json(const nlohmann::json& doc);

HcmConfig load_config(const std::filesystem::path& path);

// Round-trip serialisation (used by manifests and the calibration patch).
nlohmann::ordered_json config_to_json(const HcmConfig& cfg);

}  // namespace hcm
