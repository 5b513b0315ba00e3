#include "fkp/search.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace fkp {

using nlohmann::json;

namespace {

const Date kOpenStart{std::chrono::year{1}, std::chrono::January, std::chrono::day{1}};
const Date kOpenEnd{std::chrono::year{9999}, std::chrono::December, std::chrono::day{31}};

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::toupper(c); });
  return out;
}

bool is_token_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

std::set<std::string> intersect(const std::set<std::string>& a, const std::set<std::string>& b) {
  std::set<std::string> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find(sep, pos);
    if (next == std::string_view::npos) next = text.size();
    if (next > pos) out.emplace_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return out;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (unsigned char c : text) {
    if (is_token_byte(c)) {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

void check_query(const SearchQuery& query) {
  if (query.country && !is_iso3166_alpha2(*query.country))
    throw Error(ErrorCode::invalid_argument, "unknown country code '" + *query.country + "'");
  if (query.date_range && !query.date_range->valid())
    throw Error(ErrorCode::invalid_argument, "date range start is after its end");
}

SearchQuery query_from_params(const std::map<std::string, std::string>& params) {
  SearchQuery q;
  auto get = [&](const char* key) -> std::optional<std::string> {
    auto it = params.find(key);
    if (it == params.end() || it->second.empty()) return std::nullopt;
    return it->second;
  };
  if (auto v = get("country")) q.country = upper(*v);
  if (auto v = get("region")) q.region = *v;
  if (auto v = get("env")) {
    q.local_environment = parse_local_environment(lower(*v));
    if (!q.local_environment) throw Error(ErrorCode::invalid_argument, "unknown local environment '" + *v + "'");
  }
  if (auto v = get("season")) {
    for (const auto& part : split(*v, ',')) {
      auto season = parse_season(lower(part));
      if (!season) throw Error(ErrorCode::invalid_argument, "unknown season '" + part + "'");
      q.seasonality.insert(*season);
    }
  }
  auto from = get("date_from");
  auto to = get("date_to");
  try {
    if (from || to) q.date_range = DateRange{from ? parse_date(*from) : kOpenStart, to ? parse_date(*to) : kOpenEnd};
  } catch (const Error& e) {
    throw Error(ErrorCode::invalid_argument, e.what());
  }
  if (auto v = get("q")) {
    std::istringstream in(*v);
    for (std::string term; in >> term;) q.keywords.push_back(term);
  }
  check_query(q);
  return q;
}

std::map<std::string, std::string> query_to_params(const SearchQuery& query) {
  std::map<std::string, std::string> p;
  if (query.country) p["country"] = *query.country;
  if (query.region) p["region"] = *query.region;
  if (query.local_environment) p["env"] = std::string(to_string(*query.local_environment));
  if (!query.seasonality.empty()) {
    std::string seasons;
    for (auto s : query.seasonality) seasons += (seasons.empty() ? "" : ",") + std::string(to_string(s));
    p["season"] = seasons;
  }
  if (query.date_range) {
    p["date_from"] = format_date(query.date_range->start);
    p["date_to"] = format_date(query.date_range->end);
  }
  if (!query.keywords.empty()) {
    std::string q;
    for (const auto& k : query.keywords) q += (q.empty() ? "" : " ") + k;
    p["q"] = q;
  }
  return p;
}

json to_json(const SearchResult& r) {
  json links = json::array();
  for (const auto& l : r.doi_links) {
    json lj = {{"archive_url", l.archive_url}, {"title", l.title}, {"file_format", l.file_format}};
    if (l.doi) lj["doi"] = *l.doi;
    if (l.license) lj["license"] = *l.license;
    links.push_back(std::move(lj));
  }
  return {{"network_id", r.network_id},
          {"name", r.name},
          {"country", r.country},
          {"local_environment", to_string(r.local_environment)},
          {"coverage", {{"start", format_date(r.coverage.start)}, {"end", format_date(r.coverage.end)}}},
          {"site_count", r.site_count},
          {"doi_links", std::move(links)},
          {"score", r.score}};
}

SearchIndex SearchIndex::build(const Snapshot& snapshot) {
  SearchIndex index;
  index.revision_ = snapshot.revision;
  for (const auto& [_, entry] : snapshot.networks)
    if (entry->visible()) index.add(*entry);
  return index;
}

SearchIndex SearchIndex::updated(const Snapshot& snapshot, const std::vector<std::string>& changed) const {
  SearchIndex next = *this;
  next.revision_ = snapshot.revision;
  for (const auto& id : changed) {
    next.erase(id);
    if (const auto* entry = snapshot.find(id); entry && entry->visible()) next.add(*entry);
  }
  return next;
}

void SearchIndex::add(const CatalogEntry& entry) {
  const auto& doc = entry.document;
  const auto& n = doc.network;
  Doc d;
  d.summary.network_id = n.id;
  d.summary.name = n.name;
  d.summary.country = n.country;
  d.summary.local_environment = n.local_environment;
  d.summary.coverage = n.operational_coverage;
  d.summary.site_count = doc.sites.size();
  for (const auto& l : doc.dataset_links)
    d.summary.doi_links.push_back({l.doi, l.archive_url, l.title, l.license, l.file_format});
  d.region_lower = lower(n.region);
  d.seasons = derive_seasonality(n.operational_coverage);

  auto count = [&](std::string_view text) {
    for (auto& t : tokenize(text)) ++d.term_frequency[t];
  };
  count(n.name);
  count(n.description);
  for (const auto& k : n.keywords) count(k);
  for (const auto& s : doc.sites) count(s.name);
  for (const auto& s : doc.sensors) count(s.variable);

  by_country_[n.country].insert(n.id);
  by_environment_[n.local_environment].insert(n.id);
  for (auto s : d.seasons) by_season_[s].insert(n.id);
  for (const auto& [token, tf] : d.term_frequency) postings_[token][n.id] = tf;
  docs_[n.id] = std::move(d);
}

void SearchIndex::erase(const std::string& id) {
  auto it = docs_.find(id);
  if (it == docs_.end()) return;
  const auto& d = it->second;
  auto drop = [&](auto& map, const auto& key) {
    auto pos = map.find(key);
    if (pos == map.end()) return;
    pos->second.erase(id);
    if (pos->second.empty()) map.erase(pos);
  };
  drop(by_country_, d.summary.country);
  drop(by_environment_, d.summary.local_environment);
  for (auto s : d.seasons) drop(by_season_, s);
  for (const auto& [token, _] : d.term_frequency) drop(postings_, token);
  docs_.erase(it);
}

std::vector<SearchResult> SearchIndex::search(const SearchQuery& query) const {
  check_query(query);
  std::optional<std::set<std::string>> candidates;
  auto narrow = [&](const std::set<std::string>& ids) {
    candidates = candidates ? intersect(*candidates, ids) : ids;
  };
  static const std::set<std::string> none;
  if (query.country) {
    auto it = by_country_.find(*query.country);
    narrow(it == by_country_.end() ? none : it->second);
  }
  if (query.local_environment) {
    auto it = by_environment_.find(*query.local_environment);
    narrow(it == by_environment_.end() ? none : it->second);
  }
  if (!query.seasonality.empty()) {
    std::set<std::string> any_season;
    for (auto s : query.seasonality)
      if (auto it = by_season_.find(s); it != by_season_.end()) any_season.insert(it->second.begin(), it->second.end());
    narrow(any_season);
  }

  std::set<std::string> terms;
  for (const auto& k : query.keywords)
    for (auto& t : tokenize(k)) terms.insert(std::move(t));
  std::map<std::string, int> scores;
  if (!terms.empty()) {
    std::set<std::string> matched;
    for (const auto& t : terms) {
      auto it = postings_.find(t);
      if (it == postings_.end()) continue;
      for (const auto& [doc, tf] : it->second) {
        scores[doc] += tf;
        matched.insert(doc);
      }
    }
    narrow(matched);
  }
  if (!candidates) {
    candidates.emplace();
    for (const auto& [id, _] : docs_) candidates->insert(id);
  }

  const std::string region = query.region ? lower(*query.region) : std::string{};
  std::vector<SearchResult> results;
  for (const auto& id : *candidates) {
    const auto& d = docs_.at(id);
    if (query.region && d.region_lower.find(region) == std::string::npos) continue;
    if (query.date_range && !query.date_range->overlaps(d.summary.coverage)) continue;
    SearchResult r = d.summary;
    r.score = terms.empty() ? 0.0 : static_cast<double>(scores[id]);
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(), [](const SearchResult& a, const SearchResult& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.name != b.name) return a.name < b.name;
    return a.network_id < b.network_id;
  });
  return results;
}

IndexStats SearchIndex::stats() const { return {revision_, docs_.size(), postings_.size()}; }

SearchService::SearchService(const Snapshot& snapshot)
    : index_(std::make_shared<const SearchIndex>(SearchIndex::build(snapshot))) {}

SearchService::SearchService(CatalogStore& store) : SearchService(*store.snapshot()) {
  store.add_listener([this](const SnapshotPtr& snap, const std::vector<std::string>& changed) { apply(*snap, changed); });
}

std::vector<SearchResult> SearchService::search(const SearchQuery& query) const { return current()->search(query); }

IndexStats SearchService::rebuild_index(const Snapshot& snapshot) {
  auto next = std::make_shared<const SearchIndex>(SearchIndex::build(snapshot));
  std::lock_guard lock(mutex_);
  index_ = next;
  return index_->stats();
}

void SearchService::apply(const Snapshot& snapshot, const std::vector<std::string>& changed) {
  auto base = current();
  auto next = std::make_shared<const SearchIndex>(base->updated(snapshot, changed));
  std::lock_guard lock(mutex_);
  index_ = next;
}

std::shared_ptr<const SearchIndex> SearchService::current() const {
  std::lock_guard lock(mutex_);
  return index_;
}

}  // namespace fkp
