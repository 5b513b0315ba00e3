#include "fkp/interchange.hpp"

#include <initializer_list>
#include <set>

namespace fkp {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::parse_error, where + ": " + what);
}

/// Strict object reader: every key must be consumed or declared.
class Fields {
 public:
  Fields(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) fail(where_, "expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) {
    for (const auto& [key, _] : j_.items()) {
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known) fail(where_, "unknown field '" + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& at(const char* key) const {
    if (!has(key)) fail(where_, "missing field '" + std::string(key) + "'");
    return j_.at(key);
  }

  std::string text(const char* key) const {
    const auto& v = at(key);
    if (!v.is_string()) fail(where_, "field '" + std::string(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::string text_or_empty(const char* key) const { return has(key) ? text(key) : std::string{}; }

  std::optional<std::string> optional_text(const char* key) const {
    if (!has(key)) return std::nullopt;
    return text(key);
  }

  double real(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number()) fail(where_, "field '" + std::string(key) + "' must be a number");
    return v.get<double>();
  }

  std::optional<double> optional_real(const char* key) const {
    if (!has(key)) return std::nullopt;
    return real(key);
  }

  std::int64_t integer(const char* key) const {
    const auto& v = at(key);
    if (!v.is_number_integer()) fail(where_, "field '" + std::string(key) + "' must be an integer");
    return v.get<std::int64_t>();
  }

  std::optional<std::int64_t> optional_integer(const char* key) const {
    if (!has(key)) return std::nullopt;
    return integer(key);
  }

  bool boolean(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const auto& v = at(key);
    if (!v.is_boolean()) fail(where_, "field '" + std::string(key) + "' must be a boolean");
    return v.get<bool>();
  }

  std::vector<std::string> strings(const char* key) const {
    std::vector<std::string> out;
    if (!has(key)) return out;
    const auto& v = at(key);
    if (!v.is_array()) fail(where_, "field '" + std::string(key) + "' must be an array");
    for (const auto& e : v) {
      if (!e.is_string()) fail(where_, "field '" + std::string(key) + "' must hold strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  const json& array(const char* key) const {
    static const json empty = json::array();
    if (!has(key)) return empty;
    const auto& v = at(key);
    if (!v.is_array()) fail(where_, "field '" + std::string(key) + "' must be an array");
    return v;
  }

  LocalEnvironment environment(const char* key) const {
    auto value = text(key);
    auto env = parse_local_environment(value);
    if (!env) fail(where_, "'" + value + "' is not one of urban, suburban, rural");
    return *env;
  }

  DateRange range(const char* key) const {
    try {
      return date_range_from_json(at(key));
    } catch (const Error& e) {
      fail(where_ + "." + key, e.what());
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& j_;
  std::string where_;
};

void put(json& j, const char* key, const std::optional<std::string>& value) {
  if (value) j[key] = *value;
}

void put(json& j, const char* key, const std::optional<double>& value) {
  if (value) j[key] = *value;
}

Network network_from_json(const json& j) {
  Fields f(j, "network");
  f.allow({"id", "name", "country", "region", "description", "owner_institution", "local_environment",
           "operational_coverage", "keywords", "contacts", "license", "provenance_note", "related_links",
           "published"});
  Network n;
  n.id = f.text_or_empty("id");
  n.name = f.text("name");
  n.country = f.text("country");
  n.region = f.text_or_empty("region");
  n.description = f.text_or_empty("description");
  n.owner_institution = f.text_or_empty("owner_institution");
  n.local_environment = f.environment("local_environment");
  n.operational_coverage = f.range("operational_coverage");
  for (auto& k : f.strings("keywords")) n.keywords.insert(std::move(k));
  for (const auto& c : f.array("contacts")) {
    Fields cf(c, "network.contacts[]");
    cf.allow({"name", "role", "email"});
    n.contacts.push_back({cf.text("name"), cf.text_or_empty("role"), cf.text_or_empty("email")});
  }
  n.license = f.optional_text("license");
  n.provenance_note = f.optional_text("provenance_note");
  n.related_links = f.strings("related_links");
  n.published = f.boolean("published", false);
  return n;
}

Site site_from_json(const json& j) {
  Fields f(j, "site");
  f.allow({"id", "network_id", "name", "location", "local_environment", "surface_description",
           "installation_coverage", "height_datum_note"});
  Site s;
  s.id = f.text("id");
  s.network_id = f.text_or_empty("network_id");
  s.name = f.text("name");
  Fields loc(f.at("location"), "site '" + s.id + "'.location");
  loc.allow({"latitude_deg", "longitude_deg", "elevation_m"});
  s.location.latitude_deg = loc.real("latitude_deg");
  s.location.longitude_deg = loc.real("longitude_deg");
  s.location.elevation_m = loc.optional_real("elevation_m");
  s.local_environment = f.environment("local_environment");
  s.surface_description = f.optional_text("surface_description");
  s.installation_coverage = f.range("installation_coverage");
  s.height_datum_note = f.optional_text("height_datum_note");
  return s;
}

Sensor sensor_from_json(const json& j) {
  Fields f(j, "sensor");
  f.allow({"id", "site_id", "variable", "units", "sampling_interval_s", "height_above_ground_m",
           "manufacturer_model"});
  Sensor s;
  s.id = f.text("id");
  s.site_id = f.text("site_id");
  s.variable = f.text("variable");
  s.units = f.text_or_empty("units");
  s.sampling_interval = Seconds{f.integer("sampling_interval_s")};
  s.height_above_ground_m = f.optional_real("height_above_ground_m");
  s.manufacturer_model = f.optional_text("manufacturer_model");
  return s;
}

}  // namespace

json to_json(const DateRange& range) {
  return {{"start", format_date(range.start)}, {"end", format_date(range.end)}};
}

DateRange date_range_from_json(const json& j) {
  Fields f(j, "date range");
  f.allow({"start", "end"});
  return {parse_date(f.text("start")), parse_date(f.text("end"))};
}

json to_json(const Network& n) {
  json j = {
      {"name", n.name},
      {"country", n.country},
      {"local_environment", std::string(to_string(n.local_environment))},
      {"operational_coverage", to_json(n.operational_coverage)},
      {"published", n.published},
  };
  if (!n.id.empty()) j["id"] = n.id;
  if (!n.region.empty()) j["region"] = n.region;
  if (!n.description.empty()) j["description"] = n.description;
  if (!n.owner_institution.empty()) j["owner_institution"] = n.owner_institution;
  if (!n.keywords.empty()) j["keywords"] = n.keywords;
  if (!n.contacts.empty()) {
    json contacts = json::array();
    for (const auto& c : n.contacts) {
      json cj = {{"name", c.name}};
      if (!c.role.empty()) cj["role"] = c.role;
      if (!c.email.empty()) cj["email"] = c.email;
      contacts.push_back(std::move(cj));
    }
    j["contacts"] = std::move(contacts);
  }
  put(j, "license", n.license);
  put(j, "provenance_note", n.provenance_note);
  if (!n.related_links.empty()) j["related_links"] = n.related_links;
  return j;
}

json to_json(const Site& s) {
  json location = {{"latitude_deg", s.location.latitude_deg}, {"longitude_deg", s.location.longitude_deg}};
  put(location, "elevation_m", s.location.elevation_m);
  json j = {
      {"id", s.id},
      {"name", s.name},
      {"location", std::move(location)},
      {"local_environment", std::string(to_string(s.local_environment))},
      {"installation_coverage", to_json(s.installation_coverage)},
  };
  if (!s.network_id.empty()) j["network_id"] = s.network_id;
  put(j, "surface_description", s.surface_description);
  put(j, "height_datum_note", s.height_datum_note);
  return j;
}

json to_json(const Sensor& s) {
  json j = {
      {"id", s.id},
      {"site_id", s.site_id},
      {"variable", s.variable},
      {"sampling_interval_s", s.sampling_interval.count()},
  };
  if (!s.units.empty()) j["units"] = s.units;
  put(j, "height_above_ground_m", s.height_above_ground_m);
  put(j, "manufacturer_model", s.manufacturer_model);
  return j;
}

json to_json(const DatasetLink& l) {
  json j = {
      {"archive_url", l.archive_url},
      {"title", l.title},
      {"file_format", l.file_format},
      {"temporal_coverage", to_json(l.temporal_coverage)},
  };
  put(j, "doi", l.doi);
  put(j, "license", l.license);
  if (l.sampling_interval) j["sampling_interval_s"] = l.sampling_interval->count();
  if (l.declared_record_count) j["declared_record_count"] = *l.declared_record_count;
  if (!l.description.empty()) j["description"] = l.description;
  return j;
}

DatasetLink dataset_link_from_json(const json& j) {
  Fields f(j, "dataset_link");
  f.allow({"doi", "archive_url", "title", "license", "file_format", "temporal_coverage", "sampling_interval_s",
           "declared_record_count", "description"});
  DatasetLink l;
  l.doi = f.optional_text("doi");
  l.archive_url = f.text_or_empty("archive_url");
  l.title = f.text("title");
  l.license = f.optional_text("license");
  l.file_format = f.text_or_empty("file_format");
  l.temporal_coverage = f.range("temporal_coverage");
  if (auto s = f.optional_integer("sampling_interval_s")) l.sampling_interval = Seconds{*s};
  l.declared_record_count = f.optional_integer("declared_record_count");
  l.description = f.text_or_empty("description");
  return l;
}

json to_json(const NetworkDocument& d) {
  json j = {
      {"format", kDocumentFormat},
      {"format_version", kDocumentVersion},
      {"network", to_json(d.network)},
      {"sites", json::array()},
      {"sensors", json::array()},
      {"dataset_links", json::array()},
  };
  for (const auto& s : d.sites) j["sites"].push_back(to_json(s));
  for (const auto& s : d.sensors) j["sensors"].push_back(to_json(s));
  for (const auto& l : d.dataset_links) j["dataset_links"].push_back(to_json(l));
  if (d.version) j["version"] = *d.version;
  return j;
}

NetworkDocument document_from_json(const json& j) {
  Fields f(j, "document");
  f.allow({"format", "format_version", "network", "sites", "sensors", "dataset_links", "version"});
  if (f.has("format") && f.text("format") != kDocumentFormat) fail("document", "format must be 'fkp-network'");
  if (f.has("format_version") && f.integer("format_version") != kDocumentVersion)
    fail("document", "unsupported format_version");
  NetworkDocument d;
  d.network = network_from_json(f.at("network"));
  for (const auto& s : f.array("sites")) d.sites.push_back(site_from_json(s));
  for (const auto& s : f.array("sensors")) d.sensors.push_back(sensor_from_json(s));
  for (const auto& l : f.array("dataset_links")) d.dataset_links.push_back(dataset_link_from_json(l));
  d.version = f.optional_integer("version");
  return d;
}

NetworkDocument parse_document(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::parse_error, std::string("document is not valid JSON: ") + e.what());
  }
  return document_from_json(j);
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

std::string serialize_document(const NetworkDocument& document) { return dump_canonical(to_json(document)); }

}  // namespace fkp
