#pragma once

// Rule engine for the 16 FAIR metrics. Each metric has a documented decision
// rule producing Yes / Partial / No plus a rationale naming the evidence.

#include <array>
#include <filesystem>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>

#include <json.hpp>

#include "fkp/archive.hpp"
#include "fkp/model.hpp"
#include "fkp/vocabulary.hpp"

namespace fkp {

enum class MetricId { F1, F2, F3, F4, A1, A2, A3, A4, I1, I2, I3, I4, R1, R2, R3, R4 };
inline constexpr std::size_t kMetricCount = 16;

enum class Principle { findable, accessible, interoperable, reusable };

/// Ordered No < Partial < Yes.
enum class Outcome { no = 0, partial = 1, yes = 2 };

std::string_view to_string(MetricId id);
std::string_view to_string(Principle p);
std::string_view to_string(Outcome o);
std::optional<MetricId> parse_metric_id(std::string_view text);
std::optional<Outcome> parse_outcome(std::string_view text);
Principle principle_of(MetricId id);
constexpr std::array<MetricId, kMetricCount> all_metrics() {
  return {MetricId::F1, MetricId::F2, MetricId::F3, MetricId::F4, MetricId::A1, MetricId::A2,
          MetricId::A3, MetricId::A4, MetricId::I1, MetricId::I2, MetricId::I3, MetricId::I4,
          MetricId::R1, MetricId::R2, MetricId::R3, MetricId::R4};
}

/// Rubric constants. Any change to a threshold must come with a new version.
struct Rubric {
  std::string version = "fkp-fair/1";
  double f2_yes = 0.8;
  double f2_partial = 0.4;
  double r1_yes = 0.9;
  double r1_partial = 0.5;
  double i3_partial = 0.5;
  double r4_partial = 0.5;
  std::set<std::string, std::less<>> open_formats = {"csv", "netcdf", "nc", "json", "txt"};

  /// Reads a JSON rubric config; absent keys keep their defaults.
  static Rubric load(const std::filesystem::path& path);
  static Rubric from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

/// How the hosting service guards writes (evidence for A3).
enum class WritePolicy { authenticated, audited_open, open };

/// DOI resolver callback. An empty function means probing is skipped
/// (offline mode). Throwing means the probe failed.
using ArchiveProbe = std::function<ResolveStatus(const std::string& doi)>;

struct AssessmentContext {
  Rubric rubric;
  WritePolicy write_policy = WritePolicy::authenticated;
  ArchiveProbe probe;
  std::string assessed_at;  // ISO-8601 timestamp supplied by the caller
  const Vocabulary* vocabulary = &Vocabulary::defaults();
};

struct MetricResult {
  MetricId id = MetricId::F1;
  Outcome outcome = Outcome::no;
  std::string rationale;

  bool operator==(const MetricResult&) const = default;
};

struct Tally {
  int yes = 0;
  int partial = 0;
  int no = 0;

  int total() const { return yes + partial + no; }
  bool operator==(const Tally&) const = default;
};

struct FairAssessment {
  std::string network_id;
  std::array<MetricResult, kMetricCount> per_metric;
  std::array<Tally, 4> rollup;
  std::string assessed_at;
  std::string rubric_version;

  const MetricResult& operator[](MetricId id) const { return per_metric[static_cast<std::size_t>(id)]; }
  const Tally& tally(Principle p) const { return rollup[static_cast<std::size_t>(p)]; }
  bool operator==(const FairAssessment&) const = default;
};

/// Evaluates all 16 metrics. Throws ValidationError if the record has
/// validation errors. Probe failures never throw; they turn A1 into No.
FairAssessment assess(const NetworkDocument& record, const AssessmentContext& context);

/// Per-principle Yes/Partial/No counts.
std::array<Tally, 4> rollup(const std::array<MetricResult, kMetricCount>& per_metric);

nlohmann::json to_json(const FairAssessment& assessment);
FairAssessment assessment_from_json(const nlohmann::json& j);
/// 16 metric lines followed by 4 rollup lines.
std::string render_text(const FairAssessment& assessment);

}  // namespace fkp
