#include "fkp/portal.hpp"

#include <algorithm>
#include <ctime>
#include <sstream>

namespace fkp {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Portal::Portal(PortalConfig config, std::unique_ptr<ArchiveClient> archive)
    : config_(std::move(config)),
      rubric_(config_.rubric_file ? Rubric::load(*config_.rubric_file) : Rubric{}),
      catalog_(std::make_unique<CatalogStore>(
          config_.data_dir, config_.vocabulary_file ? Vocabulary::load(*config_.vocabulary_file) : Vocabulary{})),
      search_(std::make_unique<SearchService>(*catalog_)),
      archive_(archive ? std::move(archive) : make_archive_from_env(config_.data_dir)) {}

FairAssessment Portal::assess(const std::string& network_id, bool offline) {
  auto snap = catalog_->snapshot();
  const auto* entry = snap->find(network_id);
  if (!entry || entry->deleted) throw Error(ErrorCode::not_found, "network '" + network_id + "' not found");

  AssessmentContext ctx;
  ctx.rubric = rubric_;
  ctx.write_policy = config_.write_policy;
  ctx.assessed_at = utc_timestamp();
  ctx.vocabulary = &catalog_->vocabulary();
  if (!offline) ctx.probe = [this](const std::string& doi) { return archive_->resolve(doi); };

  auto result = fkp::assess(entry->document, ctx);
  catalog_->store_assessment(network_id, result);
  return result;
}

DepositOutcome Portal::deposit(const std::string& network_id, const DepositRequest& request) {
  const auto network = catalog_->get_network(network_id);
  if (request.files.empty()) throw Error(ErrorCode::invalid_argument, "a deposit needs at least one file");

  auto draft = archive_->create_deposit(request.metadata);
  // A retry carrying the idempotency token of a finished deposit gets its DOI back.
  if (draft.state != DepositState::published) {
    for (const auto& f : request.files) {
      std::istringstream content(f.content);
      archive_->upload_file(draft.deposit_id, f.name, content);
    }
  }
  const auto doi = archive_->publish_deposit(draft.deposit_id);
  const auto published = archive_->get_deposit(draft.deposit_id);

  DatasetLink link;
  link.doi = doi;
  link.archive_url = published.landing_url.empty() ? "https://doi.org/" + doi : published.landing_url;
  link.title = request.metadata.title;
  link.license = request.metadata.license;
  if (request.file_format) {
    link.file_format = *request.file_format;
  } else if (auto dot = request.files.front().name.rfind('.'); dot != std::string::npos) {
    link.file_format = request.files.front().name.substr(dot + 1);
  }
  link.temporal_coverage = request.temporal_coverage.value_or(network.operational_coverage);
  link.sampling_interval = request.sampling_interval;
  link.declared_record_count = request.declared_record_count;
  link.description = request.metadata.description;

  // A retried deposit returns the same DOI; do not record it twice.
  const auto snap = catalog_->snapshot();
  const auto* entry = snap->find(network_id);
  if (!entry || entry->deleted) throw Error(ErrorCode::not_found, "network '" + network_id + "' not found");
  const auto& links = entry->document.dataset_links;
  const bool recorded = std::any_of(links.begin(), links.end(), [&](const DatasetLink& l) { return l.doi == doi; });
  if (!recorded) catalog_->attach_dataset_link(network_id, link);
  return {draft.deposit_id, doi, link};
}

CubeResult Portal::cube(const CubeQuery& query) const {
  // Pair the snapshot with an index of the same revision.
  auto snap = catalog_->snapshot();
  auto index = search_->current();
  if (index->stats().revision != snap->revision) {
    auto fresh = SearchIndex::build(*snap);
    return fkp::cube(*snap, fresh, query);
  }
  return fkp::cube(*snap, *index, query);
}

SummaryMetrics Portal::summary() const { return summary_metrics(*catalog_->snapshot()); }

}  // namespace fkp
