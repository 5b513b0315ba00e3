#pragma once

// Wires catalog, search index, archive client, assessor and analytics into
// one object shared by the HTTP service and the command line.

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fkp/analytics.hpp"
#include "fkp/archive.hpp"
#include "fkp/catalog.hpp"
#include "fkp/fair.hpp"
#include "fkp/search.hpp"

namespace fkp {

struct PortalConfig {
  std::optional<std::filesystem::path> data_dir;  // empty: in-memory
  std::optional<std::filesystem::path> vocabulary_file;
  std::optional<std::filesystem::path> rubric_file;
  /// Evidence for FAIR A3; the HTTP service always gates writes by token.
  WritePolicy write_policy = WritePolicy::authenticated;
};

struct DepositFile {
  std::string name;
  std::string content;
};

/// Metadata for a deposit plus the DatasetLink fields recorded on success.
struct DepositRequest {
  DepositMetadata metadata;
  std::vector<DepositFile> files;
  std::optional<std::string> file_format;  // default: extension of the first file
  std::optional<DateRange> temporal_coverage;  // default: network coverage
  std::optional<Seconds> sampling_interval;
  std::optional<std::int64_t> declared_record_count;
};

struct DepositOutcome {
  std::string deposit_id;
  std::string doi;
  DatasetLink link;
};

class Portal {
 public:
  /// `archive` defaults to make_archive_from_env(config.data_dir).
  explicit Portal(PortalConfig config = {}, std::unique_ptr<ArchiveClient> archive = nullptr);

  CatalogStore& catalog() { return *catalog_; }
  const CatalogStore& catalog() const { return *catalog_; }
  SearchService& search() { return *search_; }
  const SearchService& search() const { return *search_; }
  ArchiveClient& archive() { return *archive_; }
  const Rubric& rubric() const { return rubric_; }
  const PortalConfig& config() const { return config_; }

  /// Assesses the stored record, probing DOIs through the archive unless
  /// `offline`, and stores the result on the network.
  FairAssessment assess(const std::string& network_id, bool offline = false);

  /// create -> upload -> publish on the archive, then records the minted DOI
  /// as a DatasetLink on the network.
  DepositOutcome deposit(const std::string& network_id, const DepositRequest& request);

  CubeResult cube(const CubeQuery& query) const;
  SummaryMetrics summary() const;

 private:
  PortalConfig config_;
  Rubric rubric_;
  std::unique_ptr<CatalogStore> catalog_;
  std::unique_ptr<SearchService> search_;
  std::unique_ptr<ArchiveClient> archive_;
};

/// Current UTC time as `YYYY-MM-DDTHH:MM:SSZ`.
std::string utc_timestamp();

}  // namespace fkp
