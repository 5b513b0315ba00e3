#pragma once

// Dimensional (cube-style) aggregation over catalog metadata.
//
// The population is the set of networks returned by search(filter). The year
// dimension places a network under every calendar year its coverage overlaps
// (clipped to the filter's date range), so rows of a year drilldown may
// overlap; totals always count each network once.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fkp/catalog.hpp"
#include "fkp/search.hpp"

namespace fkp {

enum class Dimension { country, local_environment, year, network };
enum class Measure {
  network_count,
  site_count,
  mean_sites_per_network,
  sensor_count,
  sensor_type_histogram,
  dataset_record_sum,
};

std::string_view to_string(Dimension d);
std::string_view to_string(Measure m);
std::optional<Dimension> parse_dimension(std::string_view text);
std::optional<Measure> parse_measure(std::string_view text);

struct CubeQuery {
  std::vector<Dimension> dimensions;
  std::set<Measure> measures;
  SearchQuery filter;
};

/// Throws Error{invalid_argument} unless 1..3 distinct dimensions and >= 1 measure.
void check_cube_query(const CubeQuery& query);

struct MeasureValues {
  std::int64_t network_count = 0;
  std::int64_t site_count = 0;
  double mean_sites_per_network = 0.0;
  bool empty = true;  // mean undefined; reported as 0
  std::int64_t sensor_count = 0;
  std::map<std::string, std::int64_t> sensor_type_histogram;
  std::int64_t dataset_record_sum = 0;

  bool operator==(const MeasureValues&) const = default;
};

struct CubeRow {
  std::vector<std::string> key;  // one value per dimension, in query order
  MeasureValues values;

  bool operator==(const CubeRow&) const = default;
};

struct CubeResult {
  std::vector<Dimension> dimensions;
  std::set<Measure> measures;
  std::vector<CubeRow> rows;  // sorted by key
  MeasureValues totals;

  bool operator==(const CubeResult&) const = default;
};

CubeResult cube(const Snapshot& snapshot, const SearchIndex& index, const CubeQuery& query);

/// Measures over an arbitrary set of entries (shared by cube rows and totals).
MeasureValues measure(const std::vector<const CatalogEntry*>& entries);

nlohmann::json to_json(const CubeResult& result);
/// Header row of dimensions then requested measures; histogram cells are
/// `variable:count` pairs joined by ';'.
std::string to_csv(const CubeResult& result);
CubeQuery cube_query_from_json(const nlohmann::json& j);

struct DatasetSpan {
  std::string title;
  DateRange coverage;
  std::optional<std::int64_t> declared_record_count;
};

struct NetworkSummary {
  std::string network_id;
  std::string name;
  std::size_t site_count = 0;
  std::vector<DatasetSpan> datasets;
  std::int64_t dataset_record_sum = 0;
};

struct SiteSummary {
  std::string site_id;
  std::string network_id;
  std::string name;
  std::size_t sensor_count = 0;
  std::map<std::string, std::int64_t> sensor_types;
};

struct SummaryMetrics {
  std::int64_t revision = 0;
  std::int64_t network_count = 0;
  double mean_sites_per_network = 0.0;
  bool empty = true;
  std::vector<NetworkSummary> networks;
  std::vector<SiteSummary> sites;
};

/// Portal-wide metrics over the visible (published, not deleted) networks.
SummaryMetrics summary_metrics(const Snapshot& snapshot);
nlohmann::json to_json(const SummaryMetrics& summary);

}  // namespace fkp
