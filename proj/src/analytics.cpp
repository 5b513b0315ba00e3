#include "fkp/analytics.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <sstream>

namespace fkp {

using nlohmann::json;

namespace {

std::string year_label(int year) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "%04d", year);
  return buf;
}

std::vector<std::string> dimension_values(const CatalogEntry& entry, Dimension dim, const SearchQuery& filter) {
  const auto& n = entry.network();
  switch (dim) {
    case Dimension::country: return {n.country};
    case Dimension::local_environment: return {std::string(to_string(n.local_environment))};
    case Dimension::network: return {n.id};
    case Dimension::year: {
      int first = static_cast<int>(n.operational_coverage.start.year());
      int last = static_cast<int>(n.operational_coverage.end.year());
      if (filter.date_range) {
        first = std::max(first, static_cast<int>(filter.date_range->start.year()));
        last = std::min(last, static_cast<int>(filter.date_range->end.year()));
      }
      std::vector<std::string> years;
      for (int y = first; y <= last; ++y) years.push_back(year_label(y));
      return years;
    }
  }
  return {};
}

void cartesian(const std::vector<std::vector<std::string>>& axes, std::size_t depth, std::vector<std::string>& key,
               const std::function<void(const std::vector<std::string>&)>& emit) {
  if (depth == axes.size()) {
    emit(key);
    return;
  }
  for (const auto& v : axes[depth]) {
    key.push_back(v);
    cartesian(axes, depth + 1, key, emit);
    key.pop_back();
  }
}

json measures_json(const MeasureValues& v, const std::set<Measure>& measures) {
  json j = json::object();
  for (auto m : measures) {
    const std::string name(to_string(m));
    switch (m) {
      case Measure::network_count: j[name] = v.network_count; break;
      case Measure::site_count: j[name] = v.site_count; break;
      case Measure::mean_sites_per_network:
        j[name] = v.mean_sites_per_network;
        j["empty"] = v.empty;
        break;
      case Measure::sensor_count: j[name] = v.sensor_count; break;
      case Measure::sensor_type_histogram: j[name] = v.sensor_type_histogram; break;
      case Measure::dataset_record_sum: j[name] = v.dataset_record_sum; break;
    }
  }
  return j;
}

std::string csv_cell(const MeasureValues& v, Measure m) {
  std::ostringstream out;
  switch (m) {
    case Measure::network_count: out << v.network_count; break;
    case Measure::site_count: out << v.site_count; break;
    case Measure::mean_sites_per_network: out << v.mean_sites_per_network; break;
    case Measure::sensor_count: out << v.sensor_count; break;
    case Measure::sensor_type_histogram: {
      bool first = true;
      for (const auto& [var, count] : v.sensor_type_histogram) {
        out << (first ? "" : ";") << var << ':' << count;
        first = false;
      }
      break;
    }
    case Measure::dataset_record_sum: out << v.dataset_record_sum; break;
  }
  return out.str();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string_view to_string(Dimension d) {
  switch (d) {
    case Dimension::country: return "country";
    case Dimension::local_environment: return "local_environment";
    case Dimension::year: return "year";
    case Dimension::network: return "network";
  }
  return "country";
}

std::string_view to_string(Measure m) {
  switch (m) {
    case Measure::network_count: return "network_count";
    case Measure::site_count: return "site_count";
    case Measure::mean_sites_per_network: return "mean_sites_per_network";
    case Measure::sensor_count: return "sensor_count";
    case Measure::sensor_type_histogram: return "sensor_type_histogram";
    case Measure::dataset_record_sum: return "dataset_record_sum";
  }
  return "network_count";
}

std::optional<Dimension> parse_dimension(std::string_view text) {
  for (auto d : {Dimension::country, Dimension::local_environment, Dimension::year, Dimension::network})
    if (to_string(d) == text) return d;
  return std::nullopt;
}

std::optional<Measure> parse_measure(std::string_view text) {
  for (auto m : {Measure::network_count, Measure::site_count, Measure::mean_sites_per_network, Measure::sensor_count,
                 Measure::sensor_type_histogram, Measure::dataset_record_sum})
    if (to_string(m) == text) return m;
  return std::nullopt;
}

void check_cube_query(const CubeQuery& query) {
  if (query.dimensions.empty() || query.dimensions.size() > 3)
    throw Error(ErrorCode::invalid_argument, "a cube needs between 1 and 3 dimensions");
  std::set<Dimension> distinct(query.dimensions.begin(), query.dimensions.end());
  if (distinct.size() != query.dimensions.size()) throw Error(ErrorCode::invalid_argument, "dimensions must be distinct");
  if (query.measures.empty()) throw Error(ErrorCode::invalid_argument, "a cube needs at least one measure");
  check_query(query.filter);
}

MeasureValues measure(const std::vector<const CatalogEntry*>& entries) {
  MeasureValues v;
  for (const auto* e : entries) {
    const auto& doc = e->document;
    ++v.network_count;
    v.site_count += static_cast<std::int64_t>(doc.sites.size());
    v.sensor_count += static_cast<std::int64_t>(doc.sensors.size());
    for (const auto& s : doc.sensors) ++v.sensor_type_histogram[s.variable];
    for (const auto& l : doc.dataset_links) v.dataset_record_sum += l.declared_record_count.value_or(0);
  }
  v.empty = v.network_count == 0;
  v.mean_sites_per_network = v.empty ? 0.0 : static_cast<double>(v.site_count) / static_cast<double>(v.network_count);
  return v;
}

CubeResult cube(const Snapshot& snapshot, const SearchIndex& index, const CubeQuery& query) {
  check_cube_query(query);
  std::vector<const CatalogEntry*> population;
  for (const auto& r : index.search(query.filter))
    if (const auto* entry = snapshot.find(r.network_id)) population.push_back(entry);

  std::map<std::vector<std::string>, std::vector<const CatalogEntry*>> groups;
  for (const auto* entry : population) {
    std::vector<std::vector<std::string>> axes;
    for (auto d : query.dimensions) axes.push_back(dimension_values(*entry, d, query.filter));
    std::vector<std::string> key;
    cartesian(axes, 0, key, [&](const std::vector<std::string>& k) { groups[k].push_back(entry); });
  }

  CubeResult result{query.dimensions, query.measures, {}, measure(population)};
  for (const auto& [key, members] : groups) result.rows.push_back({key, measure(members)});
  return result;
}

json to_json(const CubeResult& r) {
  json dims = json::array();
  for (auto d : r.dimensions) dims.push_back(to_string(d));
  json measures = json::array();
  for (auto m : r.measures) measures.push_back(to_string(m));
  json rows = json::array();
  for (const auto& row : r.rows) {
    json key = json::object();
    for (std::size_t i = 0; i < r.dimensions.size(); ++i) key[std::string(to_string(r.dimensions[i]))] = row.key[i];
    rows.push_back({{"key", std::move(key)}, {"measures", measures_json(row.values, r.measures)}});
  }
  return {{"dimensions", dims}, {"measures", measures}, {"rows", rows}, {"totals", measures_json(r.totals, r.measures)}};
}

std::string to_csv(const CubeResult& r) {
  std::ostringstream out;
  bool first = true;
  auto cell = [&](const std::string& text) {
    out << (first ? "" : ",") << csv_escape(text);
    first = false;
  };
  for (auto d : r.dimensions) cell(std::string(to_string(d)));
  for (auto m : r.measures) cell(std::string(to_string(m)));
  out << '\n';
  for (const auto& row : r.rows) {
    first = true;
    for (const auto& k : row.key) cell(k);
    for (auto m : r.measures) cell(csv_cell(row.values, m));
    out << '\n';
  }
  first = true;
  for (std::size_t i = 0; i < r.dimensions.size(); ++i) cell(i == 0 ? "TOTAL" : "");
  for (auto m : r.measures) cell(csv_cell(r.totals, m));
  out << '\n';
  return out.str();
}

CubeQuery cube_query_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::invalid_argument, "cube query must be an object");
  CubeQuery q;
  try {
    for (const auto& d : j.value("dimensions", json::array())) {
      auto dim = parse_dimension(d.get<std::string>());
      if (!dim) throw Error(ErrorCode::invalid_argument, "unknown dimension '" + d.get<std::string>() + "'");
      q.dimensions.push_back(*dim);
    }
    for (const auto& m : j.value("measures", json::array())) {
      auto measure = parse_measure(m.get<std::string>());
      if (!measure) throw Error(ErrorCode::invalid_argument, "unknown measure '" + m.get<std::string>() + "'");
      q.measures.insert(*measure);
    }
    std::map<std::string, std::string> params;
    const auto filter = j.value("filter", json::object());
    for (const auto& [key, value] : filter.items()) params[key] = value.get<std::string>();
    q.filter = query_from_params(params);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed cube query: ") + e.what());
  }
  check_cube_query(q);
  return q;
}

SummaryMetrics summary_metrics(const Snapshot& snapshot) {
  SummaryMetrics s;
  s.revision = snapshot.revision;
  std::int64_t sites = 0;
  for (const auto& [id, entry] : snapshot.networks) {
    if (!entry->visible()) continue;
    const auto& doc = entry->document;
    ++s.network_count;
    sites += static_cast<std::int64_t>(doc.sites.size());
    NetworkSummary ns{id, doc.network.name, doc.sites.size(), {}, 0};
    for (const auto& l : doc.dataset_links) {
      ns.datasets.push_back({l.title, l.temporal_coverage, l.declared_record_count});
      ns.dataset_record_sum += l.declared_record_count.value_or(0);
    }
    s.networks.push_back(std::move(ns));
    for (const auto& site : doc.sites) {
      SiteSummary ss{site.id, id, site.name, 0, {}};
      for (const auto& sensor : doc.sensors) {
        if (sensor.site_id != site.id) continue;
        ++ss.sensor_count;
        ++ss.sensor_types[sensor.variable];
      }
      s.sites.push_back(std::move(ss));
    }
  }
  s.empty = s.network_count == 0;
  s.mean_sites_per_network = s.empty ? 0.0 : static_cast<double>(sites) / static_cast<double>(s.network_count);
  return s;
}

json to_json(const SummaryMetrics& s) {
  json networks = json::array();
  for (const auto& n : s.networks) {
    json datasets = json::array();
    for (const auto& d : n.datasets) {
      json dj = {{"title", d.title},
                 {"start", format_date(d.coverage.start)},
                 {"end", format_date(d.coverage.end)},
                 {"days", d.coverage.day_count()}};
      if (d.declared_record_count) dj["declared_record_count"] = *d.declared_record_count;
      datasets.push_back(std::move(dj));
    }
    networks.push_back({{"network_id", n.network_id},
                        {"name", n.name},
                        {"site_count", n.site_count},
                        {"datasets", std::move(datasets)},
                        {"dataset_record_sum", n.dataset_record_sum}});
  }
  json sites = json::array();
  for (const auto& site : s.sites)
    sites.push_back({{"site_id", site.site_id},
                     {"network_id", site.network_id},
                     {"name", site.name},
                     {"sensor_count", site.sensor_count},
                     {"sensor_types", site.sensor_types}});
  return {{"revision", s.revision},
          {"network_count", s.network_count},
          {"mean_sites_per_network", s.mean_sites_per_network},
          {"empty", s.empty},
          {"networks", std::move(networks)},
          {"sites", std::move(sites)}};
}

}  // namespace fkp
