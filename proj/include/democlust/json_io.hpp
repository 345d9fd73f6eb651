#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "democlust/layout.hpp"
#include "democlust/search.hpp"
#include "democlust/selection.hpp"
#include "democlust/session.hpp"

namespace democlust {

using Json = nlohmann::ordered_json;

Json to_json(const DemonstrationOp& op);
/// Throws Error(kInvalidArgument) on a malformed op.
DemonstrationOp op_from_json(const Json& j);

/// One op per line.
std::string ops_to_jsonl(const std::vector<DemonstrationOp>& ops);
/// Blank lines are skipped. Throws Error(kInvalidArgument) naming the line.
std::vector<DemonstrationOp> ops_from_jsonl(std::string_view text);

Json to_json(const ModelCandidate& candidate);
Json to_json(const FeatureSpec& spec);
Json to_json(const MetricBundle& metrics);
Json to_json(const DescriptionPayload& description);
/// With `assignments`, includes item_ids and labels of the partition.
Json to_json(const ModelResult& result, bool assignments = true);
Json to_json(const RecommendationSet& recs, bool assignments = true);
Json to_json(const WorkingLayout& layout);
Json to_json(const LayoutCoordinates& coords);
Json to_json(const Histogram& histogram);
Json to_json(const SubClusterModel& model);
Json to_json(const SelectionSet& selection);

}  // namespace democlust
