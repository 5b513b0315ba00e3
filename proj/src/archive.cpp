#include "fkp/archive.hpp"

#include <openssl/evp.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "fkp/model.hpp"

namespace fkp {

using nlohmann::json;

namespace {

constexpr std::string_view kStubPrefix = "10.5072/fkp.";
constexpr std::string_view kStubLanding = "https://archive.stub.invalid/records/";

std::string read_all(std::istream& in) {
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json draft_to_json(const DepositDraft& d) {
  json files = json::array();
  for (const auto& f : d.uploaded_files) files.push_back({{"name", f.name}, {"size", f.size}, {"checksum", f.checksum}});
  json j = {{"deposit_id", d.deposit_id},   {"title", d.title}, {"description", d.description},
            {"creators", d.creators},       {"files", files},   {"state", to_string(d.state)},
            {"landing_url", d.landing_url}};
  if (d.license) j["license"] = *d.license;
  if (d.doi) j["doi"] = *d.doi;
  return j;
}

DepositDraft draft_from_json(const json& j) {
  DepositDraft d;
  d.deposit_id = j.at("deposit_id").get<std::string>();
  d.title = j.at("title").get<std::string>();
  d.description = j.value("description", "");
  d.creators = j.value("creators", std::vector<std::string>{});
  if (j.contains("license")) d.license = j.at("license").get<std::string>();
  for (const auto& f : j.at("files"))
    d.uploaded_files.push_back({f.at("name").get<std::string>(), f.at("size").get<std::uint64_t>(),
                                f.at("checksum").get<std::string>()});
  d.state = j.at("state").get<std::string>() == "published" ? DepositState::published : DepositState::draft;
  if (j.contains("doi")) d.doi = j.at("doi").get<std::string>();
  d.landing_url = j.value("landing_url", "");
  return d;
}

}  // namespace

std::string_view to_string(ResolveStatus status) {
  switch (status) {
    case ResolveStatus::reachable: return "reachable";
    case ResolveStatus::unreachable: return "unreachable";
    case ResolveStatus::unknown: return "unknown";
  }
  return "unknown";
}

std::string_view to_string(DepositState state) { return state == DepositState::published ? "published" : "draft"; }

std::string md5_checksum(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &length, EVP_md5(), nullptr) != 1)
    throw Error(ErrorCode::permanent, "md5 digest failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out = "md5:";
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xF];
  }
  return out;
}

// ---------------------------------------------------------------------------
// StubArchive

StubArchive::StubArchive() = default;

StubArchive::StubArchive(std::filesystem::path state_file) : state_file_(std::move(state_file)) { load(); }

void StubArchive::load() {
  if (!state_file_ || !std::filesystem::exists(*state_file_)) return;
  std::ifstream in(*state_file_);
  try {
    auto j = json::parse(in);
    next_deposit_ = j.at("next_deposit").get<std::uint64_t>();
    next_doi_ = j.at("next_doi").get<std::uint64_t>();
    for (const auto& d : j.at("deposits")) {
      auto draft = draft_from_json(d);
      deposits_[draft.deposit_id] = std::move(draft);
    }
    tokens_ = j.at("tokens").get<std::map<std::string, std::string>>();
    for (const auto& [doi, status] : j.at("resolution").items())
      resolution_[doi] = status.get<std::string>() == "reachable" ? ResolveStatus::reachable : ResolveStatus::unreachable;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, "archive stub state " + state_file_->string() + " is corrupt: " + e.what());
  }
}

void StubArchive::save() const {
  if (!state_file_) return;
  json deposits = json::array();
  for (const auto& [_, d] : deposits_) deposits.push_back(draft_to_json(d));
  json resolution = json::object();
  for (const auto& [doi, status] : resolution_) resolution[doi] = to_string(status);
  const json root = {{"next_deposit", next_deposit_}, {"next_doi", next_doi_}, {"deposits", deposits},
                     {"tokens", tokens_},             {"resolution", resolution}};
  const auto temp = state_file_->string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::trunc);
    out << root.dump(1) << '\n';
    if (!out) throw Error(ErrorCode::io, "cannot write " + temp);
  }
  std::filesystem::rename(temp, *state_file_);
}

DepositDraft& StubArchive::find(const std::string& deposit_id) {
  auto it = deposits_.find(deposit_id);
  if (it == deposits_.end()) throw Error(ErrorCode::not_found, "unknown deposit '" + deposit_id + "'");
  return it->second;
}

DepositDraft StubArchive::create_deposit(const DepositMetadata& metadata) {
  if (metadata.title.empty()) throw Error(ErrorCode::permanent, "deposit title must not be empty");
  std::lock_guard lock(mutex_);
  if (metadata.idempotency_token) {
    if (auto it = tokens_.find(*metadata.idempotency_token); it != tokens_.end()) return find(it->second);
  }
  DepositDraft d;
  d.deposit_id = "dep-" + std::to_string(next_deposit_++);
  d.title = metadata.title;
  d.description = metadata.description;
  d.creators = metadata.creators;
  d.license = metadata.license;
  if (metadata.idempotency_token) tokens_[*metadata.idempotency_token] = d.deposit_id;
  deposits_[d.deposit_id] = d;
  save();
  return d;
}

UploadedFile StubArchive::upload_file(const std::string& deposit_id, const std::string& name, std::istream& content) {
  if (name.empty()) throw Error(ErrorCode::permanent, "file name must not be empty");
  const auto bytes = read_all(content);
  std::lock_guard lock(mutex_);
  auto& d = find(deposit_id);
  if (d.state == DepositState::published)
    throw Error(ErrorCode::state, "deposit '" + deposit_id + "' is published; files are frozen");
  UploadedFile file{name, bytes.size(), md5_checksum(bytes)};
  auto it = std::find_if(d.uploaded_files.begin(), d.uploaded_files.end(), [&](const auto& f) { return f.name == name; });
  if (it != d.uploaded_files.end()) *it = file;
  else d.uploaded_files.push_back(file);
  save();
  return file;
}

std::string StubArchive::publish_deposit(const std::string& deposit_id) {
  std::lock_guard lock(mutex_);
  auto& d = find(deposit_id);
  if (d.state == DepositState::published) return *d.doi;
  if (d.uploaded_files.empty()) throw Error(ErrorCode::state, "deposit '" + deposit_id + "' has no files");
  if (d.title.empty()) throw Error(ErrorCode::state, "deposit '" + deposit_id + "' has no title");
  const auto n = next_doi_++;
  d.doi = std::string(kStubPrefix) + std::to_string(n);
  d.landing_url = std::string(kStubLanding) + std::to_string(n);
  d.state = DepositState::published;
  resolution_[*d.doi] = ResolveStatus::reachable;
  save();
  return *d.doi;
}

DepositDraft StubArchive::get_deposit(const std::string& deposit_id) {
  std::lock_guard lock(mutex_);
  return find(deposit_id);
}

ResolveStatus StubArchive::resolve(const std::string& doi) {
  if (!is_doi(doi)) throw Error(ErrorCode::invalid_argument, "malformed DOI '" + doi + "'");
  std::lock_guard lock(mutex_);
  auto it = resolution_.find(doi);
  return it == resolution_.end() ? ResolveStatus::unknown : it->second;
}

void StubArchive::take_offline(const std::string& doi) {
  std::lock_guard lock(mutex_);
  resolution_[doi] = ResolveStatus::unreachable;
  save();
}

// ---------------------------------------------------------------------------
// RestArchive

struct RestArchive::Impl {
  std::string base_url;
  std::string token;
  std::mutex mutex;
  std::map<std::string, std::string> tokens;  // idempotency token -> deposit id
  std::map<std::string, std::shared_ptr<std::mutex>> deposit_locks;

  httplib::Client client() const {
    httplib::Client cli(base_url);
    cli.set_connection_timeout(10);
    cli.set_read_timeout(60);
    cli.set_write_timeout(60);
    if (!token.empty()) cli.set_bearer_token_auth(token);
    return cli;
  }

  std::shared_ptr<std::mutex> lock_for(const std::string& deposit_id) {
    std::lock_guard lock(mutex);
    auto& m = deposit_locks[deposit_id];
    if (!m) m = std::make_shared<std::mutex>();
    return m;
  }

  static json check(const httplib::Result& res, const std::string& what) {
    if (!res) throw Error(ErrorCode::transport, what + ": " + httplib::to_string(res.error()));
    const int status = res->status;
    std::string detail = res->body.substr(0, 200);
    if (status >= 500) throw Error(ErrorCode::transport, what + ": archive returned " + std::to_string(status));
    if (status == 404) throw Error(ErrorCode::not_found, what + ": not found");
    if (status == 409) throw Error(ErrorCode::state, what + ": " + detail);
    if (status == 401 || status == 403) throw Error(ErrorCode::permanent, what + ": archive refused credentials");
    if (status >= 400) throw Error(ErrorCode::permanent, what + ": archive returned " + std::to_string(status) + " " + detail);
    if (res->body.empty()) return json::object();
    try {
      return json::parse(res->body);
    } catch (const json::exception&) {
      throw Error(ErrorCode::permanent, what + ": archive sent a non-JSON body");
    }
  }

  std::string path_of(const std::string& url) const {
    if (url.rfind(base_url, 0) != 0) throw Error(ErrorCode::permanent, "archive link '" + url + "' is outside " + base_url);
    return url.substr(base_url.size());
  }

  static DepositDraft to_draft(const json& j) {
    DepositDraft d;
    d.deposit_id = j.at("id").is_string() ? j.at("id").get<std::string>() : std::to_string(j.at("id").get<std::int64_t>());
    const auto meta = j.value("metadata", json::object());
    d.title = meta.value("title", "");
    d.description = meta.value("description", "");
    for (const auto& c : meta.value("creators", json::array())) d.creators.push_back(c.value("name", ""));
    if (meta.contains("license")) {
      const auto& lic = meta.at("license");
      d.license = lic.is_string() ? lic.get<std::string>() : lic.value("id", "");
    }
    for (const auto& f : j.value("files", json::array())) {
      std::string checksum = f.value("checksum", "");
      if (!checksum.empty() && checksum.rfind("md5:", 0) != 0) checksum = "md5:" + checksum;
      d.uploaded_files.push_back({f.value("filename", f.value("key", "")), f.value("filesize", std::uint64_t{0}), checksum});
    }
    d.state = j.value("submitted", false) ? DepositState::published : DepositState::draft;
    if (j.contains("doi") && j.at("doi").is_string() && !j.at("doi").get<std::string>().empty())
      d.doi = j.at("doi").get<std::string>();
    const auto links = j.value("links", json::object());
    d.landing_url = links.value("html", links.value("record_html", ""));
    return d;
  }

  json fetch(const std::string& deposit_id) {
    auto cli = client();
    return check(cli.Get("/api/deposit/depositions/" + deposit_id), "get deposition " + deposit_id);
  }
};

RestArchive::RestArchive(std::string base_url, std::string token) : impl_(std::make_unique<Impl>()) {
  while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
  impl_->base_url = std::move(base_url);
  impl_->token = std::move(token);
}

RestArchive::~RestArchive() = default;

DepositDraft RestArchive::create_deposit(const DepositMetadata& metadata) {
  if (metadata.title.empty()) throw Error(ErrorCode::permanent, "deposit title must not be empty");
  if (metadata.idempotency_token) {
    std::lock_guard lock(impl_->mutex);
    if (auto it = impl_->tokens.find(*metadata.idempotency_token); it != impl_->tokens.end()) {
      auto id = it->second;
      return get_deposit(id);
    }
  }
  json creators = json::array();
  for (const auto& c : metadata.creators) creators.push_back({{"name", c}});
  json meta = {{"title", metadata.title},
               {"description", metadata.description.empty() ? metadata.title : metadata.description},
               {"upload_type", "dataset"},
               {"creators", creators}};
  if (metadata.license) meta["license"] = *metadata.license;
  auto cli = impl_->client();
  auto body = json{{"metadata", meta}}.dump();
  auto draft = Impl::to_draft(Impl::check(cli.Post("/api/deposit/depositions", body, "application/json"), "create deposition"));
  if (metadata.idempotency_token) {
    std::lock_guard lock(impl_->mutex);
    impl_->tokens[*metadata.idempotency_token] = draft.deposit_id;
  }
  return draft;
}

UploadedFile RestArchive::upload_file(const std::string& deposit_id, const std::string& name, std::istream& content) {
  if (name.empty()) throw Error(ErrorCode::permanent, "file name must not be empty");
  const auto bytes = read_all(content);
  auto guard = impl_->lock_for(deposit_id);
  std::lock_guard lock(*guard);
  const auto deposition = impl_->fetch(deposit_id);
  if (deposition.value("submitted", false))
    throw Error(ErrorCode::state, "deposit '" + deposit_id + "' is published; files are frozen");
  const auto bucket = deposition.value("links", json::object()).value("bucket", "");
  if (bucket.empty()) throw Error(ErrorCode::permanent, "deposition " + deposit_id + " exposes no file bucket");
  auto cli = impl_->client();
  auto res = Impl::check(cli.Put(impl_->path_of(bucket) + "/" + httplib::detail::encode_url(name), bytes,
                                 "application/octet-stream"),
                         "upload " + name);
  UploadedFile file{name, res.value("size", std::uint64_t{bytes.size()}), res.value("checksum", "")};
  if (file.checksum.rfind("md5:", 0) != 0) file.checksum = "md5:" + file.checksum;
  return file;
}

std::string RestArchive::publish_deposit(const std::string& deposit_id) {
  auto guard = impl_->lock_for(deposit_id);
  std::lock_guard lock(*guard);
  auto current = Impl::to_draft(impl_->fetch(deposit_id));
  if (current.state == DepositState::published && current.doi) return *current.doi;
  auto cli = impl_->client();
  auto res = Impl::check(cli.Post("/api/deposit/depositions/" + deposit_id + "/actions/publish", "", "application/json"),
                         "publish deposition " + deposit_id);
  auto doi = res.value("doi", "");
  if (doi.empty()) throw Error(ErrorCode::transport, "publish of " + deposit_id + " returned no DOI");
  return doi;
}

DepositDraft RestArchive::get_deposit(const std::string& deposit_id) { return Impl::to_draft(impl_->fetch(deposit_id)); }

ResolveStatus RestArchive::resolve(const std::string& doi) {
  if (!is_doi(doi)) throw Error(ErrorCode::invalid_argument, "malformed DOI '" + doi + "'");
  auto cli = impl_->client();
  httplib::Params params{{"q", "doi:\"" + doi + "\""}};
  auto res = cli.Get("/api/records", params, httplib::Headers{});
  if (!res) throw Error(ErrorCode::transport, "resolve " + doi + ": " + httplib::to_string(res.error()));
  if (res->status >= 500) return ResolveStatus::unreachable;
  auto body = Impl::check(res, "resolve " + doi);
  const auto hits = body.value("hits", json::object());
  const auto& total = hits.contains("total") ? hits.at("total") : json(0);
  const auto count = total.is_object() ? total.value("value", 0) : total.get<int>();
  return count > 0 ? ResolveStatus::reachable : ResolveStatus::unknown;
}

std::unique_ptr<ArchiveClient> make_archive_from_env(const std::optional<std::filesystem::path>& data_dir) {
  const char* base = std::getenv("ARCHIVE_BASE_URL");
  if (base && *base) {
    const char* token = std::getenv("ARCHIVE_TOKEN");
    return std::make_unique<RestArchive>(base, token ? token : "");
  }
  if (data_dir) return std::make_unique<StubArchive>(*data_dir / "archive_stub.json");
  return std::make_unique<StubArchive>();
}

}  // namespace fkp
