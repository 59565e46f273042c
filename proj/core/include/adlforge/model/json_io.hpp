#pragma once

#include <nlohmann/json.hpp>

#include "adlforge/model/feature_matrix.hpp"
#include "adlforge/model/types.hpp"

// nlohmann ADL hooks for the shared data model. Field names match the
// manifest schema exactly.
namespace adlforge {

void to_json(nlohmann::json& j, const ClipRecord& c);
void from_json(const nlohmann::json& j, ClipRecord& c);

void to_json(nlohmann::json& j, const CropBox& b);
void from_json(const nlohmann::json& j, CropBox& b);

void to_json(nlohmann::json& j, const Segment& s);
void from_json(const nlohmann::json& j, Segment& s);

void to_json(nlohmann::json& j, const StitchedVideo& v);
void from_json(const nlohmann::json& j, StitchedVideo& v);

void to_json(nlohmann::json& j, const QaPair& q);
void from_json(const nlohmann::json& j, QaPair& q);

void to_json(nlohmann::json& j, const FeatureMeta& m);
void from_json(const nlohmann::json& j, FeatureMeta& m);

void to_json(nlohmann::json& j, const PoseSequence& p);
void from_json(const nlohmann::json& j, PoseSequence& p);

}  // namespace adlforge
