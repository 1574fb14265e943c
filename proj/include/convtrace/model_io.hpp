#pragma once

#include <filesystem>
#include <string>

#include "convtrace/classify.hpp"

namespace convtrace::classify {

inline constexpr const char* kModelFormat = "convtrace-model";
inline constexpr int kModelVersion = 1;

/// JSON document carrying format tag, version, kind, hyperparameters,
/// training seed, standardizer and the kind-specific parameters.
std::string serialize_model(const TrainedModel& model);
/// ParseError on malformed documents or unknown format/version.
TrainedModel deserialize_model(const std::string& text);

void save_model(const TrainedModel& model, const std::filesystem::path& path);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace convtrace::classify
