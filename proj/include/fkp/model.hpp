#pragma once

// Domain types for the Network -> Site -> Sensor metadata hierarchy and the
// dataset links that point at archived data. Types are plain values; an
// instance may hold inadmissible data until validate_network() says otherwise.

#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fkp/error.hpp"

namespace fkp {

using Date = std::chrono::year_month_day;
using Seconds = std::chrono::seconds;

/// Parses `YYYY-MM-DD`. Throws Error{parse_error} on anything else.
Date parse_date(std::string_view text);
std::string format_date(const Date& date);

struct DateRange {
  Date start;
  Date end;

  bool valid() const;
  /// Inclusive number of calendar days; 0 when the range is invalid.
  std::int64_t day_count() const;
  bool overlaps(const DateRange& other) const;
  bool contains(const DateRange& other) const;
  bool contains(const Date& day) const;

  bool operator==(const DateRange&) const = default;
};

struct GeoPoint {
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  std::optional<double> elevation_m;

  bool operator==(const GeoPoint&) const = default;
};

enum class LocalEnvironment { urban, suburban, rural };

std::string_view to_string(LocalEnvironment env);
std::optional<LocalEnvironment> parse_local_environment(std::string_view text);

enum class Season { winter, spring, summer, autumn };

std::string_view to_string(Season season);
std::optional<Season> parse_season(std::string_view text);
/// Meteorological season (Northern hemisphere) of a calendar month.
Season season_of(std::chrono::month m);

struct Contact {
  std::string name;
  std::string role;
  std::string email;

  bool operator==(const Contact&) const = default;
};

struct Network {
  std::string id;
  std::string name;
  std::string country;
  std::string region;
  std::string description;
  std::string owner_institution;
  LocalEnvironment local_environment = LocalEnvironment::urban;
  DateRange operational_coverage;
  std::set<std::string> keywords;
  std::vector<Contact> contacts;
  std::optional<std::string> license;
  std::optional<std::string> provenance_note;
  std::vector<std::string> related_links;
  bool published = false;

  bool operator==(const Network&) const = default;
};

struct Site {
  std::string id;
  std::string network_id;
  std::string name;
  GeoPoint location;
  LocalEnvironment local_environment = LocalEnvironment::urban;
  std::optional<std::string> surface_description;
  DateRange installation_coverage;
  std::optional<std::string> height_datum_note;

  bool operator==(const Site&) const = default;
};

struct Sensor {
  std::string id;
  std::string site_id;
  std::string variable;
  std::string units;
  Seconds sampling_interval{0};
  std::optional<double> height_above_ground_m;
  std::optional<std::string> manufacturer_model;

  bool operator==(const Sensor&) const = default;
};

struct DatasetLink {
  std::optional<std::string> doi;
  std::string archive_url;
  std::string title;
  std::optional<std::string> license;
  std::string file_format;
  DateRange temporal_coverage;
  std::optional<Seconds> sampling_interval;
  std::optional<std::int64_t> declared_record_count;
  std::string description;

  bool operator==(const DatasetLink&) const = default;
};

/// One network with everything nested under it; the unit of interchange.
struct NetworkDocument {
  Network network;
  std::vector<Site> sites;
  std::vector<Sensor> sensors;
  std::vector<DatasetLink> dataset_links;
  /// Catalog version the author edited against; absent for new records.
  std::optional<std::int64_t> version;

  bool operator==(const NetworkDocument&) const = default;
};

/// True for the `10.<registrant>/<suffix>` shape.
bool is_doi(std::string_view text);
/// Finds a DOI-shaped token inside free text.
std::optional<std::string> find_doi_in_text(std::string_view text);
bool is_iso3166_alpha2(std::string_view code);
/// Absolute http(s) URL with a host.
bool is_http_url(std::string_view text);

// ---------------------------------------------------------------------------
// Derivations

/// Sampling instants in the inclusive day span of `coverage`. The interval must
/// divide a day exactly; otherwise Error{invalid_argument}.
std::int64_t expected_record_count(const DateRange& coverage, Seconds interval);

std::set<Season> derive_seasonality(const DateRange& coverage);

/// Version tag of the optional-field checklist used by completeness_score.
inline constexpr std::string_view kCompletenessChecklistVersion = "completeness/1";

struct ChecklistItem {
  std::string_view name;
  bool filled;
};

/// The fixed optional-field checklist evaluated over a record.
std::vector<ChecklistItem> completeness_checklist(const Network& network,
                                                  const std::vector<DatasetLink>& links);

/// Filled fraction of the checklist. Throws ValidationError when the record
/// has validation errors.
double completeness_score(const NetworkDocument& document);

}  // namespace fkp
