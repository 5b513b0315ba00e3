#pragma once

// Test-side oracles, fixtures and random generators. The oracles are written
// independently of the library (linear scans, day-by-day walks) and are the
// reference the indexed implementations are checked against.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fkp/analytics.hpp"
#include "fkp/catalog.hpp"
#include "fkp/fair.hpp"
#include "fkp/model.hpp"
#include "fkp/search.hpp"

namespace fkp::testing {

using namespace std::chrono;

inline Date ymd(int y, unsigned m, unsigned d) { return Date{year{y}, month{m}, day{d}}; }

// ---------------------------------------------------------------------------
// Derivation oracles

/// Counts sampling instants by stepping through every instant of the span.
inline std::int64_t brute_force_record_count(const DateRange& range, Seconds interval) {
  const auto begin = sys_seconds{sys_days{range.start}};
  const auto end = sys_seconds{sys_days{range.end} + days{1}};
  std::int64_t n = 0;
  for (auto t = begin; t < end; t += interval) ++n;
  return n;
}

inline Season month_season(unsigned m) {
  static const Season table[12] = {Season::winter, Season::winter, Season::spring, Season::spring,
                                   Season::spring, Season::summer, Season::summer, Season::summer,
                                   Season::autumn, Season::autumn, Season::autumn, Season::winter};
  return table[m - 1];
}

/// Seasons touched by walking every day of the range.
inline std::set<Season> walk_seasons(const DateRange& range) {
  std::set<Season> out;
  for (sys_days d = sys_days{range.start}; d <= sys_days{range.end} && out.size() < 4; d += days{1})
    out.insert(month_season(static_cast<unsigned>(Date{d}.month())));
  return out;
}

// ---------------------------------------------------------------------------
// Search oracle

inline std::map<std::string, int> oracle_terms(const std::string& text) {
  std::map<std::string, int> tf;
  std::string word;
  auto flush = [&] {
    if (!word.empty()) ++tf[word];
    word.clear();
  };
  for (char ch : text) {
    const unsigned char c = static_cast<unsigned char>(ch);
    const bool letter = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c >= 0x80;
    if (c >= 'A' && c <= 'Z') word += static_cast<char>(c - 'A' + 'a');
    else if (letter) word += static_cast<char>(c);
    else flush();
  }
  flush();
  return tf;
}

inline std::string oracle_lower(std::string s) {
  for (auto& c : s)
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  return s;
}

inline bool oracle_overlap(const DateRange& a, const DateRange& b) {
  return !(sys_days{a.end} < sys_days{b.start} || sys_days{b.end} < sys_days{a.start});
}

struct OracleHit {
  std::string id;
  std::string name;
  int score = 0;
};

/// Linear scan over every visible entry; ordered by score desc, name, id.
inline std::vector<OracleHit> oracle_search(const Snapshot& snap, const SearchQuery& q) {
  std::set<std::string> wanted;
  for (const auto& k : q.keywords)
    for (const auto& [t, _] : oracle_terms(k)) wanted.insert(t);

  std::vector<OracleHit> hits;
  for (const auto& [id, entry] : snap.networks) {
    const auto& n = entry->document.network;
    if (!n.published || entry->deleted) continue;
    if (q.country && n.country != *q.country) continue;
    if (q.local_environment && n.local_environment != *q.local_environment) continue;
    if (q.region && oracle_lower(n.region).find(oracle_lower(*q.region)) == std::string::npos) continue;
    if (q.date_range && !oracle_overlap(*q.date_range, n.operational_coverage)) continue;
    if (!q.seasonality.empty()) {
      auto seasons = walk_seasons(n.operational_coverage);
      bool any = false;
      for (auto s : q.seasonality) any = any || seasons.count(s);
      if (!any) continue;
    }
    int score = 0;
    if (!wanted.empty()) {
      std::string text = n.name + " " + n.description;
      for (const auto& k : n.keywords) text += " " + k;
      for (const auto& s : entry->document.sites) text += " " + s.name;
      for (const auto& s : entry->document.sensors) text += " " + s.variable;
      auto tf = oracle_terms(text);
      bool matched = false;
      for (const auto& w : wanted)
        if (auto it = tf.find(w); it != tf.end()) {
          matched = true;
          score += it->second;
        }
      if (!matched) continue;
    }
    hits.push_back({id, n.name, score});
  }
  std::sort(hits.begin(), hits.end(), [](const OracleHit& a, const OracleHit& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.name != b.name) return a.name < b.name;
    return a.id < b.id;
  });
  return hits;
}

// ---------------------------------------------------------------------------
// Cube oracle

inline std::vector<std::string> oracle_dimension_values(const CatalogEntry& e, Dimension d, const SearchQuery& f) {
  const auto& n = e.document.network;
  switch (d) {
    case Dimension::country: return {n.country};
    case Dimension::local_environment: return {std::string(to_string(n.local_environment))};
    case Dimension::network: return {n.id};
    case Dimension::year: break;
  }
  std::vector<std::string> years;
  const int y0 = static_cast<int>(n.operational_coverage.start.year()) - 1;
  const int y1 = static_cast<int>(n.operational_coverage.end.year()) + 1;
  for (int y = y0; y <= y1; ++y) {
    const DateRange year_span{ymd(y, 1, 1), ymd(y, 12, 31)};
    if (!oracle_overlap(year_span, n.operational_coverage)) continue;
    if (f.date_range && !oracle_overlap(year_span, *f.date_range)) continue;
    char label[8];
    std::snprintf(label, sizeof label, "%04d", y);
    years.push_back(label);
  }
  return years;
}

inline MeasureValues oracle_measure(const std::vector<const CatalogEntry*>& members) {
  MeasureValues v;
  v.network_count = static_cast<std::int64_t>(members.size());
  for (const auto* e : members) {
    v.site_count += static_cast<std::int64_t>(e->document.sites.size());
    for (const auto& s : e->document.sensors) {
      ++v.sensor_count;
      v.sensor_type_histogram[s.variable] += 1;
    }
    for (const auto& l : e->document.dataset_links)
      if (l.declared_record_count) v.dataset_record_sum += *l.declared_record_count;
  }
  v.empty = members.empty();
  v.mean_sites_per_network = members.empty() ? 0.0 : double(v.site_count) / double(v.network_count);
  return v;
}

/// Naive group-by: enumerate every combination of observed dimension values
/// and scan the population for members of each cell.
inline CubeResult oracle_cube(const Snapshot& snap, const CubeQuery& q) {
  std::vector<const CatalogEntry*> population;
  for (const auto& hit : oracle_search(snap, q.filter)) population.push_back(snap.find(hit.id));

  const auto dims = q.dimensions.size();
  std::vector<std::set<std::string>> universe(dims);
  for (const auto* e : population)
    for (std::size_t i = 0; i < dims; ++i)
      for (const auto& v : oracle_dimension_values(*e, q.dimensions[i], q.filter)) universe[i].insert(v);

  std::map<const CatalogEntry*, std::vector<std::set<std::string>>> cell_values;
  for (const auto* e : population)
    for (std::size_t i = 0; i < dims; ++i) {
      auto vals = oracle_dimension_values(*e, q.dimensions[i], q.filter);
      cell_values[e].emplace_back(vals.begin(), vals.end());
    }

  CubeResult out{q.dimensions, q.measures, {}, oracle_measure(population)};
  std::vector<std::vector<std::string>> keys{{}};
  for (std::size_t i = 0; i < dims; ++i) {
    std::vector<std::vector<std::string>> next;
    for (const auto& k : keys)
      for (const auto& v : universe[i]) {
        auto extended = k;
        extended.push_back(v);
        next.push_back(extended);
      }
    keys = next;
  }
  for (const auto& key : keys) {
    std::vector<const CatalogEntry*> members;
    for (const auto* e : population) {
      const auto& vals = cell_values[e];
      bool in = true;
      for (std::size_t i = 0; i < dims && in; ++i) in = vals[i].count(key[i]) > 0;
      if (in) members.push_back(e);
    }
    if (!members.empty()) out.rows.push_back({key, oracle_measure(members)});
  }
  std::sort(out.rows.begin(), out.rows.end(), [](const CubeRow& a, const CubeRow& b) { return a.key < b.key; });
  return out;
}

// ---------------------------------------------------------------------------
// Fixtures

/// Record shaped like a plant-protection station network with partial FAIR
/// evidence: archive URLs without DOIs, one unlicensed link, a non-URL related
/// link and a keyword list only partly drawn from the vocabulary. Assessed
/// with WritePolicy::audited_open it rolls up to F(2,2,0) A(2,2,0) I(1,3,0)
/// R(2,2,0).
inline NetworkDocument pis_like_fixture() {
  NetworkDocument doc;
  auto& n = doc.network;
  n.id = "pis-agro";
  n.name = "Regional Agrometeorological Station Network";
  n.country = "RS";
  n.region = "Vojvodina";
  n.description = "Automated stations supporting crop disease forecasting. Data set reference: 10.5281/zenodo.1000001";
  n.owner_institution = "Regional Plant Protection Service";
  n.local_environment = LocalEnvironment::rural;
  n.operational_coverage = {ymd(2010, 1, 1), ymd(2020, 12, 31)};
  n.keywords = {"agrometeorology", "plant_protection", "crop_disease", "pest_forecasting"};
  n.contacts = {{"Station desk", "operator", "stations@example.org"}};
  n.license = "CC-BY-4.0";
  n.provenance_note = "Stations maintained by field technicians; readings checked daily.";
  n.related_links = {"https://example.org/stations", "annual station report"};
  n.published = true;

  for (int i = 1; i <= 3; ++i) {
    Site s;
    s.id = "pis-site-" + std::to_string(i);
    s.network_id = n.id;
    s.name = "Field station " + std::to_string(i);
    s.location = {45.0 + 0.1 * i, 19.5 + 0.1 * i, 80.0};
    s.local_environment = LocalEnvironment::rural;
    s.installation_coverage = n.operational_coverage;
    doc.sites.push_back(s);
    doc.sensors.push_back({s.id + "-ta", s.id, "air_temperature", "Cel", Seconds{600}, 2.0, std::nullopt});
    doc.sensors.push_back({s.id + "-rh", s.id, "relative_humidity", "%", Seconds{600}, 2.0, std::nullopt});
  }

  DatasetLink readings;
  readings.archive_url = "https://archive.example.org/records/pis-readings";
  readings.title = "Ten-minute station readings";
  readings.license = "CC-BY-4.0";
  readings.file_format = "csv";
  readings.temporal_coverage = n.operational_coverage;
  doc.dataset_links.push_back(readings);

  DatasetLink summary;
  summary.archive_url = "https://archive.example.org/records/pis-summary";
  summary.title = "Monthly summaries";
  summary.file_format = "xlsx";
  summary.temporal_coverage = n.operational_coverage;
  doc.dataset_links.push_back(summary);
  return doc;
}

/// Every FAIR evidence item present; `doi` must resolve through the probe used.
inline NetworkDocument all_evidence_fixture(const std::string& doi) {
  NetworkDocument doc = pis_like_fixture();
  auto& n = doc.network;
  n.id = "full-evidence";
  n.keywords = {"agrometeorology", "plant_protection", "micrometeorology"};
  n.related_links = {"https://example.org/stations", "https://example.org/methods"};
  for (auto& s : doc.sites) s.network_id = n.id;
  doc.dataset_links.clear();
  DatasetLink link;
  link.doi = doi;
  link.archive_url = "https://doi.org/" + doi;
  link.title = "Ten-minute station readings";
  link.license = "CC-BY-4.0";
  link.file_format = "netcdf";
  link.temporal_coverage = n.operational_coverage;
  link.sampling_interval = Seconds{600};
  link.declared_record_count = expected_record_count(n.operational_coverage, Seconds{600});
  doc.dataset_links.push_back(link);
  return doc;
}

inline NetworkDocument empty_links_fixture() {
  NetworkDocument doc = pis_like_fixture();
  doc.network.id = "no-links";
  for (auto& s : doc.sites) s.network_id = doc.network.id;
  doc.dataset_links.clear();
  return doc;
}

// ---------------------------------------------------------------------------
// Random generators

inline const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {"urban",  "canopy", "station", "river", "valley",  "forest",
                                                 "heat",   "island", "orchard", "field", "coastal", "alpine",
                                                 "Danube", "north",  "south",   "grid",  "tower",   "park"};
  return words;
}

inline const std::vector<std::string>& country_pool() {
  static const std::vector<std::string> c = {"RS", "HU", "AT", "DE", "FR", "IT"};
  return c;
}

inline const std::vector<std::string>& region_pool() {
  static const std::vector<std::string> r = {"Vojvodina", "Bavaria", "Styria", "Provence", "Lombardy", "Upper Pannonia"};
  return r;
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

inline bool coin(std::mt19937_64& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

inline int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Date random_date(std::mt19937_64& rng, int y0, int y1) {
  const auto first = sys_days{ymd(y0, 1, 1)};
  const auto last = sys_days{ymd(y1, 12, 31)};
  return Date{first + days{uniform(rng, 0, static_cast<int>((last - first).count()))}};
}

/// A valid network document with ids prefixed by `id` (site/sensor ids stay
/// unique catalog-wide).
inline NetworkDocument random_document(std::mt19937_64& rng, const std::string& id) {
  static const std::vector<std::string> variables = {"air_temperature", "relative_humidity", "wind_speed",
                                                     "precipitation", "global_radiation", "leaf_wetness"};
  static const std::vector<std::string> keywords = {"micrometeorology", "urban_climate", "agrometeorology",
                                                    "air_quality", "heat", "orchard"};
  static const std::vector<Seconds> intervals = {Seconds{600}, Seconds{1800}, Seconds{3600}, Seconds{86400}};

  NetworkDocument doc;
  auto& n = doc.network;
  n.id = id;
  n.name = pick(rng, word_pool()) + " " + pick(rng, word_pool()) + " network";
  n.country = pick(rng, country_pool());
  n.region = pick(rng, region_pool());
  n.description = "Stations along the " + pick(rng, word_pool()) + " " + pick(rng, word_pool());
  n.owner_institution = coin(rng) ? "Institute " + pick(rng, word_pool()) : "";
  n.local_environment = static_cast<LocalEnvironment>(uniform(rng, 0, 2));
  const Date start = random_date(rng, 2005, 2022);
  n.operational_coverage = {start, Date{sys_days{start} + days{uniform(rng, 0, 1500)}}};
  for (int k = uniform(rng, 0, 3); k > 0; --k) n.keywords.insert(pick(rng, keywords));

  const int sites = uniform(rng, 0, 5);
  for (int s = 0; s < sites; ++s) {
    Site site;
    site.id = id + "-s" + std::to_string(s);
    site.network_id = id;
    site.name = pick(rng, word_pool()) + " site " + std::to_string(s);
    site.location = {std::uniform_real_distribution<double>(-60, 70)(rng),
                     std::uniform_real_distribution<double>(-170, 170)(rng), std::nullopt};
    site.local_environment = n.local_environment;
    site.installation_coverage = n.operational_coverage;
    doc.sites.push_back(site);
    for (int k = uniform(rng, 0, 3); k > 0; --k) {
      Sensor sensor;
      sensor.id = site.id + "-x" + std::to_string(k);
      sensor.site_id = site.id;
      sensor.variable = pick(rng, variables);
      sensor.units = "1";
      sensor.sampling_interval = pick(rng, intervals);
      doc.sensors.push_back(sensor);
    }
  }
  for (int k = uniform(rng, 0, 2); k > 0; --k) {
    DatasetLink l;
    if (coin(rng)) l.doi = "10.5072/rand." + id + "." + std::to_string(k);
    l.archive_url = "https://archive.example.org/" + id + "/" + std::to_string(k);
    l.title = "Data set " + std::to_string(k);
    l.file_format = coin(rng) ? "csv" : "netcdf";
    l.temporal_coverage = n.operational_coverage;
    if (coin(rng)) {
      l.sampling_interval = pick(rng, intervals);
      l.declared_record_count = expected_record_count(l.temporal_coverage, *l.sampling_interval);
    } else if (coin(rng)) {
      l.declared_record_count = uniform(rng, 0, 100000);
    }
    doc.dataset_links.push_back(l);
  }
  return doc;
}

/// Fills `store` with `count` random networks, publishing most and
/// tombstoning a few.
inline void populate(CatalogStore& store, std::mt19937_64& rng, int count, const std::string& prefix = "n") {
  for (int i = 0; i < count; ++i) {
    auto doc = random_document(rng, prefix + std::to_string(i));
    store.upsert_network(doc, "owner-" + std::to_string(i % 3));
    if (coin(rng, 0.75)) {
      store.publish(doc.network.id);
      if (coin(rng, 0.1)) store.remove(doc.network.id);
    }
  }
}

inline SearchQuery random_query(std::mt19937_64& rng) {
  SearchQuery q;
  if (coin(rng, 0.4)) q.country = coin(rng, 0.9) ? pick(rng, country_pool()) : std::string("JP");
  if (coin(rng, 0.2)) {
    const auto& r = pick(rng, region_pool());
    q.region = coin(rng) ? r : oracle_lower(r.substr(0, 4));
  }
  if (coin(rng, 0.4)) q.local_environment = static_cast<LocalEnvironment>(uniform(rng, 0, 2));
  if (coin(rng, 0.3))
    for (int k = uniform(rng, 1, 2); k > 0; --k) q.seasonality.insert(static_cast<Season>(uniform(rng, 0, 3)));
  if (coin(rng, 0.4)) {
    const Date a = random_date(rng, 2003, 2026);
    q.date_range = DateRange{a, Date{sys_days{a} + days{uniform(rng, 0, 400)}}};
  }
  if (coin(rng, 0.35))
    for (int k = uniform(rng, 1, 2); k > 0; --k)
      q.keywords.push_back(coin(rng, 0.85) ? pick(rng, word_pool()) : std::string("nonexistent"));
  return q;
}

inline std::vector<std::string> ids_of(const std::vector<SearchResult>& results) {
  std::vector<std::string> ids;
  for (const auto& r : results) ids.push_back(r.network_id);
  return ids;
}

inline std::vector<std::string> ids_of(const std::vector<OracleHit>& hits) {
  std::vector<std::string> ids;
  for (const auto& h : hits) ids.push_back(h.id);
  return ids;
}

/// Every non-empty subset of the four dimensions with at most three members.
inline std::vector<std::vector<Dimension>> dimension_subsets() {
  const std::vector<Dimension> all = {Dimension::country, Dimension::local_environment, Dimension::year,
                                      Dimension::network};
  std::vector<std::vector<Dimension>> out;
  for (unsigned mask = 1; mask < 16; ++mask) {
    std::vector<Dimension> dims;
    for (unsigned i = 0; i < 4; ++i)
      if (mask & (1u << i)) dims.push_back(all[i]);
    if (dims.size() <= 3) out.push_back(dims);
  }
  return out;
}

inline std::set<Measure> all_measures() {
  return {Measure::network_count, Measure::site_count,            Measure::mean_sites_per_network,
          Measure::sensor_count,  Measure::sensor_type_histogram, Measure::dataset_record_sum};
}

}  // namespace fkp::testing
