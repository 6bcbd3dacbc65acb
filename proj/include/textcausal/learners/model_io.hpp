#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "textcausal/learners/gbt.hpp"
#include "textcausal/learners/linear.hpp"
#include "textcausal/learners/text_triple.hpp"

namespace textcausal {

// Versioned JSON documents: {"format": "textcausal.<kind>", "version": 1, ...}.
// Trees are nested {"feature", "threshold", "left", "right"} / {"leaf"}
// objects; linear heads are dense weight arrays.
inline constexpr int kModelFormatVersion = 1;

nlohmann::json to_json(const LinearModel& model);
nlohmann::json to_json(const GbtModel& model);
nlohmann::json to_json(const TextTripleModel& model);

LinearModel linear_model_from_json(const nlohmann::json& j);
GbtModel gbt_model_from_json(const nlohmann::json& j);
TextTripleModel text_triple_model_from_json(const nlohmann::json& j);

void save_json(const nlohmann::json& doc, const std::filesystem::path& path);
nlohmann::json load_json(const std::filesystem::path& path);

}  // namespace textcausal
