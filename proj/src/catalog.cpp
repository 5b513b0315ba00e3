#include "fkp/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "fkp/interchange.hpp"

namespace fkp {

using nlohmann::json;

namespace {

constexpr const char* kCatalogFile = "catalog.json";

void normalize(NetworkDocument& doc, const std::string& id) {
  doc.network.id = id;
  for (auto& s : doc.sites) s.network_id = id;
  doc.version.reset();
}

bool has_ref_error(const ValidationReport& report) {
  return std::any_of(report.issues.begin(), report.issues.end(), [](const Issue& i) {
    return i.severity == Severity::error && i.code.size() > 4 && i.code.ends_with("_ref");
  });
}

void require_admissible(const ValidationReport& report, const std::string& what) {
  if (report.admissible()) return;
  const auto code = has_ref_error(report) ? ErrorCode::integrity : ErrorCode::validation_failed;
  throw ValidationError(what + ": " + report.summary(), report, code);
}

void index_entry(Snapshot& snap, const CatalogEntry& entry) {
  for (const auto& s : entry.document.sites) snap.site_owner[s.id] = entry.network().id;
  for (const auto& s : entry.document.sensors) snap.sensor_owner[s.id] = s.site_id;
}

void unindex_entry(Snapshot& snap, const CatalogEntry& entry) {
  for (const auto& s : entry.document.sites) snap.site_owner.erase(s.id);
  for (const auto& s : entry.document.sensors) snap.sensor_owner.erase(s.id);
}

/// Site and sensor ids are catalog-wide; reject ids owned by another network.
void check_id_collisions(const Snapshot& snap, const NetworkDocument& doc) {
  const auto& id = doc.network.id;
  for (const auto& s : doc.sites) {
    auto it = snap.site_owner.find(s.id);
    if (it != snap.site_owner.end() && it->second != id)
      throw Error(ErrorCode::version_conflict, "site id '" + s.id + "' already belongs to network '" + it->second + "'");
  }
  for (const auto& s : doc.sensors) {
    auto it = snap.sensor_owner.find(s.id);
    if (it == snap.sensor_owner.end()) continue;
    auto owner = snap.site_owner.find(it->second);
    if (owner != snap.site_owner.end() && owner->second != id)
      throw Error(ErrorCode::version_conflict,
                  "sensor id '" + s.id + "' already belongs to network '" + owner->second + "'");
  }
}

std::int64_t sequence_of(const std::string& id) {
  if (id.rfind("net-", 0) != 0) return 0;
  try {
    std::size_t used = 0;
    auto n = std::stoll(id.substr(4), &used);
    return used == id.size() - 4 ? n : 0;
  } catch (const std::exception&) {
    return 0;
  }
}

const CatalogEntry& live_entry(const Snapshot& snap, const std::string& id) {
  const auto* entry = snap.find(id);
  if (!entry || entry->deleted) throw Error(ErrorCode::not_found, "network '" + id + "' not found");
  return *entry;
}

}  // namespace

const CatalogEntry* Snapshot::find(const std::string& network_id) const {
  auto it = networks.find(network_id);
  return it == networks.end() ? nullptr : it->second.get();
}

const Site* Snapshot::find_site(const std::string& site_id) const {
  auto owner = site_owner.find(site_id);
  if (owner == site_owner.end()) return nullptr;
  const auto* entry = find(owner->second);
  if (!entry) return nullptr;
  for (const auto& s : entry->document.sites)
    if (s.id == site_id) return &s;
  return nullptr;
}

std::vector<std::string> Snapshot::audit() const {
  std::vector<std::string> problems;
  std::set<std::string> sites_seen, sensors_seen;
  for (const auto& [id, entry] : networks) {
    const auto& doc = entry->document;
    if (doc.network.id != id) problems.push_back("entry key '" + id + "' != network id '" + doc.network.id + "'");
    std::set<std::string> local_sites;
    for (const auto& s : doc.sites) {
      local_sites.insert(s.id);
      if (s.network_id != id) problems.push_back("site '" + s.id + "' -> network '" + s.network_id + "' does not resolve");
      if (!sites_seen.insert(s.id).second) problems.push_back("site id '" + s.id + "' used twice");
      auto idx = site_owner.find(s.id);
      if (idx == site_owner.end() || idx->second != id) problems.push_back("site index stale for '" + s.id + "'");
    }
    for (const auto& s : doc.sensors) {
      if (!local_sites.contains(s.site_id)) problems.push_back("sensor '" + s.id + "' -> site '" + s.site_id + "' does not resolve");
      if (!sensors_seen.insert(s.id).second) problems.push_back("sensor id '" + s.id + "' used twice");
      auto idx = sensor_owner.find(s.id);
      if (idx == sensor_owner.end() || idx->second != s.site_id) problems.push_back("sensor index stale for '" + s.id + "'");
    }
    if (entry->assessment && entry->assessment->network_id != id)
      problems.push_back("assessment on '" + id + "' references network '" + entry->assessment->network_id + "'");
  }
  for (const auto& [site, net] : site_owner)
    if (!sites_seen.contains(site)) problems.push_back("site index holds dangling '" + site + "' -> '" + net + "'");
  for (const auto& [sensor, site] : sensor_owner)
    if (!sensors_seen.contains(sensor)) problems.push_back("sensor index holds dangling '" + sensor + "'");
  return problems;
}

std::size_t ImportReport::succeeded() const {
  return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const Item& i) { return !i.error; }));
}

std::size_t ImportReport::failed() const { return items.size() - succeeded(); }

json entry_to_json(const CatalogEntry& entry) {
  auto doc = entry.document;
  doc.version = entry.version;
  json j = to_json(doc);
  json meta = {{"owner", entry.owner}, {"deleted", entry.deleted}};
  if (entry.assessment) meta["assessment"] = to_json(*entry.assessment);
  j["catalog"] = std::move(meta);
  return j;
}

CatalogEntry entry_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::parse_error, "catalog document must be an object");
  json body = j;
  CatalogEntry entry;
  if (body.contains("catalog")) {
    const auto meta = body.at("catalog");
    body.erase("catalog");
    try {
      entry.owner = meta.value("owner", std::string{});
      entry.deleted = meta.value("deleted", false);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::parse_error, std::string("catalog metadata: ") + e.what());
    }
    if (meta.contains("assessment")) entry.assessment = assessment_from_json(meta.at("assessment"));
  }
  entry.document = document_from_json(body);
  entry.version = entry.document.version.value_or(1);
  entry.document.version.reset();
  return entry;
}

CatalogStore::CatalogStore(std::optional<std::filesystem::path> data_dir, Vocabulary vocabulary)
    : data_dir_(std::move(data_dir)), vocabulary_(std::move(vocabulary)), current_(std::make_shared<Snapshot>()) {
  if (data_dir_) {
    std::error_code ec;
    std::filesystem::create_directories(*data_dir_, ec);
    if (ec || !std::filesystem::is_directory(*data_dir_))
      throw Error(ErrorCode::io, "data directory " + data_dir_->string() + " is not usable");
    load();
  }
}

SnapshotPtr CatalogStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return current_;
}

void CatalogStore::add_listener(CommitListener listener) {
  std::lock_guard lock(commit_mutex_);
  listeners_.push_back(std::move(listener));
}

std::int64_t CatalogStore::commit(const Mutation& mutate) {
  std::lock_guard lock(commit_mutex_);
  auto next = std::make_shared<Snapshot>(*snapshot());
  auto changed = mutate(*next);
  if (changed.empty()) return next->revision;
  next->revision += 1;
  persist(*next);
  SnapshotPtr published = next;
  {
    std::lock_guard snap_lock(snapshot_mutex_);
    current_ = published;
  }
  for (const auto& listener : listeners_) listener(published, changed);
  return published->revision;
}

void CatalogStore::persist(const Snapshot& next) const {
  if (!data_dir_) return;
  json entries = json::array();
  for (const auto& [_, entry] : next.networks) entries.push_back(entry_to_json(*entry));
  const json root = {{"revision", next.revision}, {"next_network_seq", next.next_network_seq}, {"entries", entries}};
  const auto target = *data_dir_ / kCatalogFile;
  const auto temp = *data_dir_ / (std::string(kCatalogFile) + ".tmp");
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    out << root.dump(1) << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::io, "cannot write " + temp.string());
  }
  std::error_code ec;
  std::filesystem::rename(temp, target, ec);
  if (ec) throw Error(ErrorCode::io, "cannot replace " + target.string() + ": " + ec.message());
}

void CatalogStore::load() {
  const auto path = *data_dir_ / kCatalogFile;
  if (!std::filesystem::exists(path)) return;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot read " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::io, path.string() + " is corrupt: " + e.what());
  }
  auto snap = std::make_shared<Snapshot>();
  snap->revision = root.value("revision", std::int64_t{0});
  snap->next_network_seq = root.value("next_network_seq", std::int64_t{1});
  for (const auto& e : root.value("entries", json::array())) {
    auto entry = std::make_shared<CatalogEntry>(entry_from_json(e));
    index_entry(*snap, *entry);
    snap->networks[entry->network().id] = std::move(entry);
  }
  current_ = std::move(snap);
}

UpsertResult CatalogStore::upsert_network(NetworkDocument document, const std::string& owner) {
  require_admissible(validate_document(document, vocabulary_), "network rejected");
  UpsertResult result{};
  const auto revision = commit([&](Snapshot& snap) -> std::vector<std::string> {
    std::string id = document.network.id;
    if (id.empty()) {
      for (const auto& [key, entry] : snap.networks) {
        if (!entry->deleted && entry->network().name == document.network.name &&
            entry->network().country == document.network.country) {
          id = key;
          break;
        }
      }
    }
    const auto* existing = id.empty() ? nullptr : snap.find(id);
    if (id.empty()) {
      do id = "net-" + std::to_string(snap.next_network_seq++);
      while (snap.networks.contains(id));
    }
    snap.next_network_seq = std::max(snap.next_network_seq, sequence_of(id) + 1);
    const auto author_version = document.version;
    normalize(document, id);
    result.id = id;

    if (!existing) {
      check_id_collisions(snap, document);
      document.network.published = false;
      auto entry = std::make_shared<CatalogEntry>();
      entry->document = std::move(document);
      entry->owner = owner;
      index_entry(snap, *entry);
      snap.networks[id] = std::move(entry);
      result.status = UpsertStatus::created;
      return {id};
    }

    if (existing->deleted) throw Error(ErrorCode::version_conflict, "network '" + id + "' has been deleted");
    document.network.published = existing->network().published;
    if (document == existing->document) {
      result.status = UpsertStatus::unchanged;
      return {};
    }
    if (!author_version || *author_version != existing->version) {
      throw Error(ErrorCode::version_conflict,
                  "network '" + id + "' already exists with different content (stored version " +
                      std::to_string(existing->version) + ")");
    }
    // Edits keep previously minted DOI links unless the author re-lists them.
    for (const auto& link : existing->document.dataset_links) {
      if (!link.doi) continue;
      bool listed = std::any_of(document.dataset_links.begin(), document.dataset_links.end(),
                                [&](const DatasetLink& l) { return l.doi == link.doi; });
      if (!listed) document.dataset_links.push_back(link);
    }
    if (document.network.published) require_admissible(validate_for_publication(document, vocabulary_), "edit refused");
    check_id_collisions(snap, document);
    auto entry = std::make_shared<CatalogEntry>(*existing);
    unindex_entry(snap, *existing);
    entry->document = std::move(document);
    entry->version += 1;
    index_entry(snap, *entry);
    snap.networks[id] = std::move(entry);
    result.status = UpsertStatus::updated;
    return {id};
  });
  result.revision = revision;
  return result;
}

Network CatalogStore::publish(const std::string& network_id) {
  Network out;
  commit([&](Snapshot& snap) -> std::vector<std::string> {
    const auto& existing = live_entry(snap, network_id);
    if (existing.network().published) {
      out = existing.network();
      return {};
    }
    require_admissible(validate_for_publication(existing.document, vocabulary_), "publication refused");
    auto entry = std::make_shared<CatalogEntry>(existing);
    entry->document.network.published = true;
    out = entry->network();
    snap.networks[network_id] = std::move(entry);
    return {network_id};
  });
  return out;
}

RemoveStatus CatalogStore::remove(const std::string& network_id) {
  RemoveStatus status{};
  commit([&](Snapshot& snap) -> std::vector<std::string> {
    const auto& existing = live_entry(snap, network_id);
    if (existing.network().published) {
      auto entry = std::make_shared<CatalogEntry>(existing);
      entry->deleted = true;
      snap.networks[network_id] = std::move(entry);
      status = RemoveStatus::tombstoned;
    } else {
      unindex_entry(snap, existing);
      snap.networks.erase(network_id);
      status = RemoveStatus::hard_deleted;
    }
    return {network_id};
  });
  return status;
}

std::int64_t CatalogStore::attach_dataset_link(const std::string& network_id, DatasetLink link) {
  return commit([&](Snapshot& snap) -> std::vector<std::string> {
    const auto& existing = live_entry(snap, network_id);
    auto entry = std::make_shared<CatalogEntry>(existing);
    entry->document.dataset_links.push_back(std::move(link));
    require_admissible(validate_document(entry->document, vocabulary_), "dataset link rejected");
    entry->version += 1;
    snap.networks[network_id] = std::move(entry);
    return {network_id};
  });
}

void CatalogStore::store_assessment(const std::string& network_id, FairAssessment assessment) {
  commit([&](Snapshot& snap) -> std::vector<std::string> {
    const auto& existing = live_entry(snap, network_id);
    if (assessment.network_id != network_id)
      throw Error(ErrorCode::integrity, "assessment belongs to network '" + assessment.network_id + "'");
    auto entry = std::make_shared<CatalogEntry>(existing);
    entry->assessment = std::move(assessment);
    snap.networks[network_id] = std::move(entry);
    return {network_id};
  });
}

Network CatalogStore::get_network(const std::string& id) const { return live_entry(*snapshot(), id).network(); }

std::vector<Site> CatalogStore::list_sites(const std::string& network_id) const {
  return live_entry(*snapshot(), network_id).document.sites;
}

Site CatalogStore::get_site(const std::string& id) const {
  auto snap = snapshot();
  const auto* site = snap->find_site(id);
  if (!site || live_entry(*snap, site->network_id).deleted) throw Error(ErrorCode::not_found, "site '" + id + "' not found");
  return *site;
}

std::vector<Sensor> CatalogStore::list_sensors(const std::string& site_id) const {
  auto snap = snapshot();
  const auto* site = snap->find_site(site_id);
  if (!site) throw Error(ErrorCode::not_found, "site '" + site_id + "' not found");
  std::vector<Sensor> out;
  for (const auto& s : live_entry(*snap, site->network_id).document.sensors)
    if (s.site_id == site_id) out.push_back(s);
  return out;
}

std::vector<json> CatalogStore::export_catalog() const {
  std::vector<json> out;
  for (const auto& [_, entry] : snapshot()->networks) out.push_back(entry_to_json(*entry));
  return out;
}

std::string CatalogStore::export_text() const {
  json array = json::array();
  for (auto& doc : export_catalog()) array.push_back(std::move(doc));
  return dump_canonical(array);
}

ImportReport CatalogStore::import_catalog(const std::vector<json>& documents) {
  ImportReport report;
  for (std::size_t i = 0; i < documents.size(); ++i) {
    ImportReport::Item item{i, std::nullopt, std::nullopt};
    try {
      auto entry = entry_from_json(documents[i]);
      require_admissible(validate_document(entry.document, vocabulary_), "document rejected");
      if (entry.network().published)
        require_admissible(validate_for_publication(entry.document, vocabulary_), "document rejected");
      commit([&](Snapshot& snap) -> std::vector<std::string> {
        std::string id = entry.network().id;
        if (id.empty()) {
          do id = "net-" + std::to_string(snap.next_network_seq++);
          while (snap.networks.contains(id));
        }
        normalize(entry.document, id);
        if (entry.assessment && entry.assessment->network_id != id)
          throw Error(ErrorCode::integrity, "assessment references network '" + entry.assessment->network_id + "'");
        item.id = id;
        if (const auto* existing = snap.find(id)) {
          if (*existing == entry) return {};
          throw Error(ErrorCode::version_conflict, "network '" + id + "' already exists with different content");
        }
        check_id_collisions(snap, entry.document);
        snap.next_network_seq = std::max(snap.next_network_seq, sequence_of(id) + 1);
        auto stored = std::make_shared<CatalogEntry>(std::move(entry));
        index_entry(snap, *stored);
        snap.networks[id] = std::move(stored);
        return {id};
      });
    } catch (const Error& e) {
      item.error = e.what();
    }
    report.items.push_back(std::move(item));
  }
  return report;
}

ImportReport CatalogStore::import_text(const std::string& text) {
  json parsed;
  try {
    parsed = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("import is not valid JSON: ") + e.what());
  }
  std::vector<json> documents;
  if (parsed.is_array()) {
    for (auto& d : parsed) documents.push_back(std::move(d));
  } else {
    documents.push_back(std::move(parsed));
  }
  return import_catalog(documents);
}

}  // namespace fkp
