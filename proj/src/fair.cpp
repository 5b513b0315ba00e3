#include "fkp/fair.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "fkp/validation.hpp"

namespace fkp {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, kMetricCount> kMetricNames = {
    "F1", "F2", "F3", "F4", "A1", "A2", "A3", "A4", "I1", "I2", "I3", "I4", "R1", "R2", "R3", "R4"};

std::string percent(double ratio) {
  std::ostringstream out;
  out.precision(3);
  out << ratio;
  return out.str();
}

bool has_text(const std::optional<std::string>& v) { return v && !v->empty(); }

std::string normalize_format(std::string format) {
  std::transform(format.begin(), format.end(), format.begin(), [](unsigned char c) { return std::tolower(c); });
  if (auto slash = format.rfind('/'); slash != std::string::npos) format = format.substr(slash + 1);
  if (!format.empty() && format.front() == '.') format.erase(0, 1);
  if (format.rfind("x-", 0) == 0) format.erase(0, 2);
  return format;
}

/// Yes when every item passes, Partial when the passing share reaches
/// `partial_at`, No otherwise (including when there is nothing to inspect).
Outcome by_share(std::size_t passing, std::size_t total, double partial_at) {
  if (total == 0) return Outcome::no;
  if (passing == total) return Outcome::yes;
  if (static_cast<double>(passing) / static_cast<double>(total) >= partial_at) return Outcome::partial;
  return Outcome::no;
}

class Evaluator {
 public:
  Evaluator(const NetworkDocument& record, const AssessmentContext& ctx, double completeness,
            const ValidationReport& report)
      : r_(record), ctx_(ctx), completeness_(completeness), report_(report) {}

  MetricResult evaluate(MetricId id) const {
    switch (id) {
      case MetricId::F1: return f1();
      case MetricId::F2: return f2();
      case MetricId::F3: return f3();
      case MetricId::F4: return f4();
      case MetricId::A1: return a1();
      case MetricId::A2: return a2();
      case MetricId::A3: return a3();
      case MetricId::A4: return a4();
      case MetricId::I1: return i1();
      case MetricId::I2: return i2();
      case MetricId::I3: return i3();
      case MetricId::I4: return i4();
      case MetricId::R1: return r1();
      case MetricId::R2: return r2();
      case MetricId::R3: return r3();
      case MetricId::R4: return r4();
    }
    return {id, Outcome::no, "unknown metric"};
  }

 private:
  const std::vector<DatasetLink>& links() const { return r_.dataset_links; }

  std::vector<std::string> dois() const {
    std::vector<std::string> out;
    for (const auto& l : links())
      if (l.doi && is_doi(*l.doi)) out.push_back(*l.doi);
    return out;
  }

  MetricResult f1() const {
    auto ids = dois();
    if (!ids.empty()) return {MetricId::F1, Outcome::yes, "dataset_links.doi assigned (" + ids.front() + ")"};
    bool any_url = std::any_of(links().begin(), links().end(), [](const auto& l) { return !l.archive_url.empty(); });
    if (any_url) return {MetricId::F1, Outcome::partial, "dataset_links.archive_url present but no DOI assigned"};
    return {MetricId::F1, Outcome::no, "no dataset link carries a persistent identifier"};
  }

  MetricResult f2() const {
    const std::string why = "completeness_score " + percent(completeness_) + " (" +
                            std::string(kCompletenessChecklistVersion) + ")";
    if (completeness_ >= ctx_.rubric.f2_yes) return {MetricId::F2, Outcome::yes, why + " >= " + percent(ctx_.rubric.f2_yes)};
    if (completeness_ >= ctx_.rubric.f2_partial)
      return {MetricId::F2, Outcome::partial, why + " >= " + percent(ctx_.rubric.f2_partial)};
    return {MetricId::F2, Outcome::no, why + " < " + percent(ctx_.rubric.f2_partial)};
  }

  MetricResult f3() const {
    if (r_.network.published) return {MetricId::F3, Outcome::yes, "network.published: metadata is in the search index"};
    return {MetricId::F3, Outcome::no, "network.published is false: not searchable"};
  }

  MetricResult f4() const {
    auto ids = dois();
    if (!ids.empty()) return {MetricId::F4, Outcome::yes, "metadata record carries dataset_links.doi " + ids.front()};
    if (auto doi = find_doi_in_text(r_.network.description))
      return {MetricId::F4, Outcome::partial, "DOI " + *doi + " only mentioned in network.description"};
    for (const auto& l : links())
      if (auto doi = find_doi_in_text(l.description))
        return {MetricId::F4, Outcome::partial, "DOI " + *doi + " only mentioned in dataset_links.description"};
    return {MetricId::F4, Outcome::no, "metadata record specifies no persistent identifier"};
  }

  MetricResult a1() const {
    if (links().empty()) return {MetricId::A1, Outcome::no, "no dataset links to follow"};
    auto ids = dois();
    if (ids.empty()) {
      bool any_url = std::any_of(links().begin(), links().end(), [](const auto& l) { return !l.archive_url.empty(); });
      if (any_url) return {MetricId::A1, Outcome::partial, "data reachable via dataset_links.archive_url only; no DOI to follow"};
      return {MetricId::A1, Outcome::no, "dataset links carry neither DOI nor archive_url"};
    }
    if (!ctx_.probe) return {MetricId::A1, Outcome::partial, "probe skipped (offline mode)"};
    for (const auto& doi : ids) {
      ResolveStatus status;
      try {
        status = ctx_.probe(doi);
      } catch (const std::exception& e) {
        return {MetricId::A1, Outcome::no, "probe failed for " + doi + ": " + e.what()};
      }
      if (status != ResolveStatus::reachable)
        return {MetricId::A1, Outcome::no, "DOI " + doi + " resolved " + std::string(to_string(status))};
    }
    return {MetricId::A1, Outcome::yes, std::to_string(ids.size()) + " DOI(s) resolve to reachable landing targets"};
  }

  MetricResult a2() const {
    if (links().empty()) return {MetricId::A2, Outcome::no, "no dataset links: no retrieval protocol"};
    for (const auto& l : links()) {
      const std::string url = !l.archive_url.empty() ? l.archive_url : (l.doi ? "https://doi.org/" + *l.doi : "");
      if (url.rfind("https://", 0) != 0)
        return {MetricId::A2, Outcome::no, "dataset link '" + l.title + "' is not served over https"};
    }
    return {MetricId::A2, Outcome::yes, "all dataset_links.archive_url use https"};
  }

  MetricResult a3() const {
    switch (ctx_.write_policy) {
      case WritePolicy::authenticated:
        return {MetricId::A3, Outcome::yes, "service configuration: writes require an authenticated token"};
      case WritePolicy::audited_open:
        return {MetricId::A3, Outcome::partial, "service configuration: writes are open but audited"};
      case WritePolicy::open: break;
    }
    return {MetricId::A3, Outcome::no, "service configuration: writes are unauthenticated"};
  }

  MetricResult a4() const {
    if (r_.network.published)
      return {MetricId::A4, Outcome::yes, "network.published: metadata is public independent of data access"};
    return {MetricId::A4, Outcome::no, "network.published is false: metadata not publicly visible"};
  }

  MetricResult i1() const {
    std::size_t open = 0;
    for (const auto& l : links())
      if (ctx_.rubric.open_formats.contains(normalize_format(l.file_format))) ++open;
    const auto out = by_share(open, links().size(), 1e-12);
    const std::string why = std::to_string(open) + "/" + std::to_string(links().size()) +
                            " dataset_links.file_format in the open-format allowlist";
    return {MetricId::I1, out, why};
  }

  MetricResult i2() const {
    if (report_.warning_count() == 0)
      return {MetricId::I2, Outcome::yes, "record validates against the station metadata schema with no warnings"};
    return {MetricId::I2, Outcome::partial,
            "record validates with " + std::to_string(report_.warning_count()) + " warning(s)"};
  }

  MetricResult i3() const {
    const auto& vocab = *ctx_.vocabulary;
    std::size_t total = 0, known = 0;
    for (const auto& k : r_.network.keywords) {
      ++total;
      if (vocab.is_keyword(k)) ++known;
    }
    std::set<std::string> variables;
    for (const auto& s : r_.sensors) variables.insert(s.variable);
    for (const auto& v : variables) {
      ++total;
      if (vocab.is_variable(v)) ++known;
    }
    return {MetricId::I3, by_share(known, total, ctx_.rubric.i3_partial),
            std::to_string(known) + "/" + std::to_string(total) +
                " network.keywords and sensor variables from the controlled vocabulary"};
  }

  MetricResult i4() const {
    const auto& rel = r_.network.related_links;
    if (rel.empty()) return {MetricId::I4, Outcome::no, "network.related_links is empty"};
    auto qualified = std::count_if(rel.begin(), rel.end(), [](const auto& u) { return is_http_url(u); });
    const std::string why = std::to_string(qualified) + "/" + std::to_string(rel.size()) +
                            " network.related_links are qualified URLs";
    return {MetricId::I4, static_cast<std::size_t>(qualified) == rel.size() ? Outcome::yes : Outcome::partial, why};
  }

  MetricResult r1() const {
    bool units = std::all_of(r_.sensors.begin(), r_.sensors.end(), [](const auto& s) { return !s.units.empty(); });
    std::string why = "completeness_score " + percent(completeness_) + (units ? ", all sensors have units" : ", sensor units missing");
    if (completeness_ >= ctx_.rubric.r1_yes && units) return {MetricId::R1, Outcome::yes, why};
    if (completeness_ >= ctx_.rubric.r1_partial) return {MetricId::R1, Outcome::partial, why};
    return {MetricId::R1, Outcome::no, why};
  }

  MetricResult r2() const {
    if (links().empty()) return {MetricId::R2, Outcome::no, "no dataset links: no data usage license"};
    std::size_t licensed = has_text(r_.network.license) ? 1 : 0;
    for (const auto& l : links())
      if (has_text(l.license)) ++licensed;
    const std::size_t total = links().size() + 1;
    const std::string why = std::to_string(licensed) + "/" + std::to_string(total) +
                            " of network.license and dataset_links.license present";
    if (licensed == total) return {MetricId::R2, Outcome::yes, why};
    if (licensed > 0) return {MetricId::R2, Outcome::partial, why};
    return {MetricId::R2, Outcome::no, why};
  }

  MetricResult r3() const {
    const bool prov = has_text(r_.network.provenance_note);
    const bool owner = !r_.network.owner_institution.empty();
    const std::string why = std::string("network.provenance_note ") + (prov ? "present" : "absent") +
                            ", network.owner_institution " + (owner ? "present" : "absent");
    if (prov && owner) return {MetricId::R3, Outcome::yes, why};
    if (prov || owner) return {MetricId::R3, Outcome::partial, why};
    return {MetricId::R3, Outcome::no, why};
  }

  MetricResult r4() const {
    std::size_t conforming = 0;
    for (const auto& s : r_.sensors)
      if (is_parseable_unit(s.units) && ctx_.vocabulary->is_variable(s.variable)) ++conforming;
    return {MetricId::R4, by_share(conforming, r_.sensors.size(), ctx_.rubric.r4_partial),
            std::to_string(conforming) + "/" + std::to_string(r_.sensors.size()) +
                " sensors with parseable units and vocabulary variables"};
  }

  const NetworkDocument& r_;
  const AssessmentContext& ctx_;
  double completeness_;
  const ValidationReport& report_;
};

}  // namespace

std::string_view to_string(MetricId id) { return kMetricNames[static_cast<std::size_t>(id)]; }

std::string_view to_string(Principle p) {
  switch (p) {
    case Principle::findable: return "findable";
    case Principle::accessible: return "accessible";
    case Principle::interoperable: return "interoperable";
    case Principle::reusable: return "reusable";
  }
  return "findable";
}

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::yes: return "Yes";
    case Outcome::partial: return "Partial";
    case Outcome::no: return "No";
  }
  return "No";
}

std::optional<MetricId> parse_metric_id(std::string_view text) {
  for (std::size_t i = 0; i < kMetricNames.size(); ++i)
    if (kMetricNames[i] == text) return static_cast<MetricId>(i);
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(std::string_view text) {
  if (text == "Yes") return Outcome::yes;
  if (text == "Partial") return Outcome::partial;
  if (text == "No") return Outcome::no;
  return std::nullopt;
}

Principle principle_of(MetricId id) { return static_cast<Principle>(static_cast<int>(id) / 4); }

Rubric Rubric::from_json(const json& j) {
  Rubric r;
  r.version = j.value("version", r.version);
  r.f2_yes = j.value("f2_yes", r.f2_yes);
  r.f2_partial = j.value("f2_partial", r.f2_partial);
  r.r1_yes = j.value("r1_yes", r.r1_yes);
  r.r1_partial = j.value("r1_partial", r.r1_partial);
  r.i3_partial = j.value("i3_partial", r.i3_partial);
  r.r4_partial = j.value("r4_partial", r.r4_partial);
  if (j.contains("open_formats")) {
    r.open_formats.clear();
    for (const auto& f : j.at("open_formats")) r.open_formats.insert(f.get<std::string>());
  }
  return r;
}

Rubric Rubric::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read rubric file " + path.string());
  try {
    return from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, "rubric file " + path.string() + ": " + e.what());
  }
}

json Rubric::to_json() const {
  return {{"version", version},       {"f2_yes", f2_yes},         {"f2_partial", f2_partial},
          {"r1_yes", r1_yes},         {"r1_partial", r1_partial}, {"i3_partial", i3_partial},
          {"r4_partial", r4_partial}, {"open_formats", open_formats}};
}

FairAssessment assess(const NetworkDocument& record, const AssessmentContext& context) {
  auto report = validate_document(record, *context.vocabulary);
  if (!report.admissible()) throw ValidationError("assessment requires a valid record", std::move(report));
  const auto items = completeness_checklist(record.network, record.dataset_links);
  const double completeness =
      static_cast<double>(std::count_if(items.begin(), items.end(), [](const auto& i) { return i.filled; })) /
      static_cast<double>(items.size());

  Evaluator eval(record, context, completeness, report);
  FairAssessment out;
  out.network_id = record.network.id;
  for (auto id : all_metrics()) out.per_metric[static_cast<std::size_t>(id)] = eval.evaluate(id);
  out.rollup = rollup(out.per_metric);
  out.assessed_at = context.assessed_at;
  out.rubric_version = context.rubric.version;
  return out;
}

std::array<Tally, 4> rollup(const std::array<MetricResult, kMetricCount>& per_metric) {
  std::array<Tally, 4> tallies{};
  for (const auto& m : per_metric) {
    auto& t = tallies[static_cast<std::size_t>(principle_of(m.id))];
    switch (m.outcome) {
      case Outcome::yes: ++t.yes; break;
      case Outcome::partial: ++t.partial; break;
      case Outcome::no: ++t.no; break;
    }
  }
  return tallies;
}

json to_json(const FairAssessment& a) {
  json metrics = json::array();
  for (const auto& m : a.per_metric)
    metrics.push_back({{"id", to_string(m.id)}, {"outcome", to_string(m.outcome)}, {"rationale", m.rationale}});
  json tallies = json::object();
  for (std::size_t p = 0; p < 4; ++p) {
    const auto& t = a.rollup[p];
    tallies[std::string(to_string(static_cast<Principle>(p)))] = {{"yes", t.yes}, {"partial", t.partial}, {"no", t.no}};
  }
  return {{"network_id", a.network_id},
          {"assessed_at", a.assessed_at},
          {"rubric_version", a.rubric_version},
          {"metrics", std::move(metrics)},
          {"rollup", std::move(tallies)}};
}

FairAssessment assessment_from_json(const json& j) {
  try {
    FairAssessment a;
    a.network_id = j.at("network_id").get<std::string>();
    a.assessed_at = j.at("assessed_at").get<std::string>();
    a.rubric_version = j.at("rubric_version").get<std::string>();
    const auto& metrics = j.at("metrics");
    if (!metrics.is_array() || metrics.size() != kMetricCount)
      throw Error(ErrorCode::parse_error, "assessment must list exactly 16 metrics");
    std::array<bool, kMetricCount> seen{};
    for (const auto& m : metrics) {
      auto id = parse_metric_id(m.at("id").get<std::string>());
      auto outcome = parse_outcome(m.at("outcome").get<std::string>());
      if (!id || !outcome) throw Error(ErrorCode::parse_error, "unknown metric id or outcome in assessment");
      auto idx = static_cast<std::size_t>(*id);
      if (seen[idx]) throw Error(ErrorCode::parse_error, "duplicate metric in assessment");
      seen[idx] = true;
      a.per_metric[idx] = {*id, *outcome, m.at("rationale").get<std::string>()};
    }
    a.rollup = rollup(a.per_metric);
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::parse_error, std::string("malformed assessment: ") + e.what());
  }
}

std::string render_text(const FairAssessment& a) {
  std::ostringstream out;
  for (const auto& m : a.per_metric) {
    std::string outcome(to_string(m.outcome));
    outcome.resize(8, ' ');
    out << to_string(m.id) << "  " << outcome << m.rationale << '\n';
  }
  for (std::size_t p = 0; p < 4; ++p) {
    const auto& t = a.rollup[p];
    out << to_string(static_cast<Principle>(p)) << ": " << t.yes << " Yes, " << t.partial << " Partial, " << t.no
        << " No\n";
  }
  return out.str();
}

}  // namespace fkp
