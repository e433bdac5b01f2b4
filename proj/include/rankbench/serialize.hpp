#ifndef RANKBENCH_SERIALIZE_HPP
#define RANKBENCH_SERIALIZE_HPP

#include <json.hpp>

#include <span>
#include <string>
#include <vector>

#include "rankbench/effects.hpp"
#include "rankbench/faithfulness.hpp"
#include "rankbench/metrics.hpp"
#include "rankbench/models.hpp"
#include "rankbench/rankings.hpp"
#include "rankbench/selection.hpp"

namespace rankbench {

using Json = nlohmann::ordered_json;

/// Shortest text that parses back to the same double.
std::string format_double(double v);

/// Two-space indented text with a trailing newline.
std::string dump(const Json& j);

Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

Json to_json(const ModelConfig& cfg);
ModelConfig model_config_from_json(const Json& j);

/// Full fitted parameters; predictor_from_json reproduces predictions exactly.
Json to_json(const Predictor& p);
Predictor predictor_from_json(const Json& j);

Json to_json(const RankingScorecard& card);
RankingScorecard scorecard_from_json(const Json& j);
Json to_json(const AggregatedRanking& agg);
Json to_json(const AleCurve& curve);
Json to_json(const ComplexityReport& report);
Json to_json(const PerformanceDiagram& diagram);
Json to_json(const FitStats& stats);
Json to_json(const Interval& interval);
Json to_json(const MetricTable& table);
Json to_json(const FaithfulnessReport& report);
Json to_json(const std::vector<ParetoPoint>& curve);
Json to_json(const TopBottomResult& result);
Json to_json(const IncrementalCurves& curves);
Json to_json(const SelectionReport& report);

/// One row per (feature, method): feature, method, score, rank, median, iqr.
std::string scorecards_csv(const AggregatedRanking& agg, std::span<const RankingScorecard> cards);

/// subset (pipe-joined), size, performance, one scaled-total column per method.
std::string records_csv(const FaithfulnessReport& report);

std::string ale_csv(const AleCurve& curve);

}  // namespace rankbench

#endif  // RANKBENCH_SERIALIZE_HPP
