#pragma once

// Deposit workflow against an external data archive: create a draft deposit,
// upload files, publish to mint a DOI, resolve DOIs. Portal code depends only
// on ArchiveClient; StubArchive is an in-process implementation and
// RestArchive speaks the public archive's REST deposit API.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fkp/error.hpp"

namespace fkp {

enum class ResolveStatus { reachable, unreachable, unknown };
std::string_view to_string(ResolveStatus status);

enum class DepositState { draft, published };
std::string_view to_string(DepositState state);

struct DepositMetadata {
  std::string title;
  std::string description;
  std::vector<std::string> creators;
  std::optional<std::string> license;
  /// Retries carrying the same token return the same draft.
  std::optional<std::string> idempotency_token;
};

struct UploadedFile {
  std::string name;
  std::uint64_t size = 0;
  std::string checksum;  // "md5:<hex>"

  bool operator==(const UploadedFile&) const = default;
};

struct DepositDraft {
  std::string deposit_id;
  std::string title;
  std::string description;
  std::vector<std::string> creators;
  std::optional<std::string> license;
  std::vector<UploadedFile> uploaded_files;
  DepositState state = DepositState::draft;
  std::optional<std::string> doi;
  std::string landing_url;
};

/// MD5 digest of `content` formatted as "md5:<lowercase hex>".
std::string md5_checksum(std::string_view content);

class ArchiveClient {
 public:
  virtual ~ArchiveClient() = default;

  virtual DepositDraft create_deposit(const DepositMetadata& metadata) = 0;
  virtual UploadedFile upload_file(const std::string& deposit_id, const std::string& name, std::istream& content) = 0;
  /// Idempotent per deposit: publishing again returns the same DOI.
  virtual std::string publish_deposit(const std::string& deposit_id) = 0;
  virtual DepositDraft get_deposit(const std::string& deposit_id) = 0;
  /// Throws Error{invalid_argument} for a malformed DOI and Error{transport}
  /// when the archive cannot be reached.
  virtual ResolveStatus resolve(const std::string& doi) = 0;
};

/// In-process archive. DOIs are minted as `10.5072/fkp.<n>` with n increasing.
/// When constructed with a state file, every mutation is persisted there so
/// separate processes sharing a data directory see the same deposits.
class StubArchive final : public ArchiveClient {
 public:
  StubArchive();
  explicit StubArchive(std::filesystem::path state_file);

  DepositDraft create_deposit(const DepositMetadata& metadata) override;
  UploadedFile upload_file(const std::string& deposit_id, const std::string& name, std::istream& content) override;
  std::string publish_deposit(const std::string& deposit_id) override;
  DepositDraft get_deposit(const std::string& deposit_id) override;
  ResolveStatus resolve(const std::string& doi) override;

  /// Marks a minted DOI as unreachable (for probe-failure tests).
  void take_offline(const std::string& doi);

 private:
  void load();
  void save() const;
  DepositDraft& find(const std::string& deposit_id);

  mutable std::mutex mutex_;
  std::optional<std::filesystem::path> state_file_;
  std::map<std::string, DepositDraft> deposits_;
  std::map<std::string, std::string> tokens_;
  std::map<std::string, ResolveStatus> resolution_;
  std::uint64_t next_deposit_ = 1;
  std::uint64_t next_doi_ = 1;
};

/// Client for a REST deposit API (create deposition, upload to bucket, publish,
/// read DOI). `base_url` is e.g. `https://zenodo.org`; the token is sent as a
/// bearer credential and never stored elsewhere.
class RestArchive final : public ArchiveClient {
 public:
  RestArchive(std::string base_url, std::string token);
  ~RestArchive() override;

  DepositDraft create_deposit(const DepositMetadata& metadata) override;
  UploadedFile upload_file(const std::string& deposit_id, const std::string& name, std::istream& content) override;
  std::string publish_deposit(const std::string& deposit_id) override;
  DepositDraft get_deposit(const std::string& deposit_id) override;
  ResolveStatus resolve(const std::string& doi) override;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Archive selected from ARCHIVE_BASE_URL / ARCHIVE_TOKEN; the stub (persisted
/// under `data_dir`) when ARCHIVE_BASE_URL is unset.
std::unique_ptr<ArchiveClient> make_archive_from_env(const std::optional<std::filesystem::path>& data_dir);

}  // namespace fkp
