#pragma once

// Durable catalog of network records.
//
// Readers take an immutable Snapshot and never observe a partial write.
// Writers are serialized through a single committer: each commit builds a new
// snapshot, persists it (single-file JSON database, atomic rename), then
// publishes it. A failed write leaves the current snapshot untouched.
//
// On-disk layout of the data directory:
//   catalog.json        every entry plus revision counters
//   archive_stub.json   stub archive state (see StubArchive)

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkp/fair.hpp"
#include "fkp/model.hpp"
#include "fkp/validation.hpp"
#include "fkp/vocabulary.hpp"

namespace fkp {

struct CatalogEntry {
  /// Normalized: network.id set, every site.network_id set, version unset.
  NetworkDocument document;
  std::string owner;
  bool deleted = false;  // tombstone; hidden from search and public reads
  std::int64_t version = 1;
  std::optional<FairAssessment> assessment;

  const Network& network() const { return document.network; }
  bool visible() const { return document.network.published && !deleted; }

  bool operator==(const CatalogEntry&) const = default;
};

struct Snapshot {
  std::int64_t revision = 0;
  std::int64_t next_network_seq = 1;
  std::map<std::string, std::shared_ptr<const CatalogEntry>> networks;
  std::map<std::string, std::string> site_owner;    // site id -> network id
  std::map<std::string, std::string> sensor_owner;  // sensor id -> site id

  const CatalogEntry* find(const std::string& network_id) const;
  const Site* find_site(const std::string& site_id) const;

  /// Referential-integrity audit over the whole snapshot; empty when sound.
  std::vector<std::string> audit() const;
};

using SnapshotPtr = std::shared_ptr<const Snapshot>;

enum class UpsertStatus { created, updated, unchanged };

struct UpsertResult {
  std::string id;
  UpsertStatus status;
  std::int64_t revision;
};

struct ImportReport {
  struct Item {
    std::size_t index;
    std::optional<std::string> id;
    std::optional<std::string> error;
  };
  std::vector<Item> items;

  std::size_t succeeded() const;
  std::size_t failed() const;
};

enum class RemoveStatus { hard_deleted, tombstoned };

/// Invoked after each commit with the new snapshot and the touched network ids.
using CommitListener = std::function<void(const SnapshotPtr&, const std::vector<std::string>& changed)>;

class CatalogStore {
 public:
  /// In-memory catalog when `data_dir` is empty; otherwise loads (or creates)
  /// `catalog.json` in that directory.
  explicit CatalogStore(std::optional<std::filesystem::path> data_dir = std::nullopt,
                        Vocabulary vocabulary = Vocabulary::defaults());

  SnapshotPtr snapshot() const;
  const Vocabulary& vocabulary() const { return vocabulary_; }

  void add_listener(CommitListener listener);

  /// Stores the document and everything nested in it atomically. New networks
  /// are unpublished. Throws ValidationError, Error{version_conflict}.
  UpsertResult upsert_network(NetworkDocument document, const std::string& owner = {});

  /// Throws Error{not_found}; ValidationError when the publication gate fails.
  Network publish(const std::string& network_id);
  RemoveStatus remove(const std::string& network_id);
  /// Appends a dataset link (e.g. a freshly minted DOI). Returns the new revision.
  std::int64_t attach_dataset_link(const std::string& network_id, DatasetLink link);
  void store_assessment(const std::string& network_id, FairAssessment assessment);

  // Drilldown reads against the current snapshot; not-found for unknown or
  // deleted ids.
  Network get_network(const std::string& id) const;
  std::vector<Site> list_sites(const std::string& network_id) const;
  Site get_site(const std::string& id) const;
  std::vector<Sensor> list_sensors(const std::string& site_id) const;

  /// One JSON document per entry (tombstones included), ordered by id.
  std::vector<nlohmann::json> export_catalog() const;
  /// Canonical text of export_catalog() as a JSON array.
  std::string export_text() const;
  /// Imports each document independently; malformed ones are reported and
  /// skipped. Author-supplied ids are kept.
  ImportReport import_catalog(const std::vector<nlohmann::json>& documents);
  ImportReport import_text(const std::string& text);

 private:
  using Mutation = std::function<std::vector<std::string>(Snapshot&)>;

  /// Runs `mutate` on a copy of the current snapshot and commits it.
  std::int64_t commit(const Mutation& mutate);
  void persist(const Snapshot& next) const;
  void load();

  std::optional<std::filesystem::path> data_dir_;
  Vocabulary vocabulary_;

  mutable std::mutex snapshot_mutex_;
  SnapshotPtr current_;
  std::mutex commit_mutex_;
  std::vector<CommitListener> listeners_;
};

nlohmann::json entry_to_json(const CatalogEntry& entry);
CatalogEntry entry_from_json(const nlohmann::json& j);

}  // namespace fkp
