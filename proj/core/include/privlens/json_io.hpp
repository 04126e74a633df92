// Copyright 2026 The privlens Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVLENS_JSON_IO_HPP_
#define PRIVLENS_JSON_IO_HPP_

// Serializers shared by the CLI and the HTTP service so both transports emit
// the same documents.

#include <nlohmann/json.hpp>

#include "privlens/corpus.hpp"
#include "privlens/gold.hpp"
#include "privlens/irr.hpp"
#include "privlens/refinement.hpp"
#include "privlens/report.hpp"
#include "privlens/stats.hpp"
#include "privlens/taxonomy.hpp"
#include "privlens/workflow.hpp"

namespace privlens {

nlohmann::json labels_json(const LabelSet& labels);
// Throws ParseError for non-array input or malformed ids.
LabelSet labels_from_json(const nlohmann::json& value);

void to_json(nlohmann::json& j, const GoldEntry& entry);

namespace taxonomy {
void to_json(nlohmann::json& j, const Requirement& requirement);
void to_json(nlohmann::json& j, const Taxonomy& taxonomy);
nlohmann::json trace_json(const TraceBySource& trace);
void to_json(nlohmann::json& j, const TraceReport& report);
}  // namespace taxonomy

namespace refine {
void to_json(nlohmann::json& j, const MergedRequirement& merged);
void to_json(nlohmann::json& j, const PipelineAudit& audit);
void to_json(nlohmann::json& j, const InconsistencyReport& report);
}  // namespace refine

namespace corpus {
void to_json(nlohmann::json& j, const IssueReport& issue);
// Throws ParseError naming the offending key.
IssueReport issue_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const MetricStats& stats);
void to_json(nlohmann::json& j, const DescriptiveStats& stats);
}  // namespace corpus

namespace irr {
void to_json(nlohmann::json& j, const ReliabilityResult& result);
void to_json(nlohmann::json& j, const ConfidenceInterval& interval);
}  // namespace irr

namespace stats {
void to_json(nlohmann::json& j, const TestResult& result);
void to_json(nlohmann::json& j, const CoverageTable& table);
void to_json(nlohmann::json& j, const Ranking& ranking);
}  // namespace stats

namespace workflow {
void to_json(nlohmann::json& j, const Session& session);
Session session_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const LabelRecord& record);
LabelRecord label_record_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const FinalLabel& final_label);
FinalLabel final_label_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const Disagreement& disagreement);
void to_json(nlohmann::json& j, const DisagreementReport& report);
}  // namespace workflow

namespace report {
nlohmann::json bundle_json(const ReportBundle& bundle);
}  // namespace report

}  // namespace privlens

#endif  // PRIVLENS_JSON_IO_HPP_
