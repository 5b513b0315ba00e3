#include "fkp/validation.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace fkp {

namespace {

class ReportBuilder {
 public:
  void error(std::string code, std::string message) {
    report_.issues.push_back({Severity::error, std::move(code), std::move(message)});
  }
  void warning(std::string code, std::string message) {
    report_.issues.push_back({Severity::warning, std::move(code), std::move(message)});
  }
  ValidationReport take() { return std::move(report_); }

 private:
  ValidationReport report_;
};

std::string range_text(const DateRange& r) {
  return (r.start.ok() ? format_date(r.start) : "?") + ".." + (r.end.ok() ? format_date(r.end) : "?");
}

void check_network(const Network& n, ReportBuilder& out) {
  if (n.name.empty()) out.error("network.name", "network name is empty");
  if (!is_iso3166_alpha2(n.country))
    out.error("network.country", "'" + n.country + "' is not an ISO-3166 alpha-2 country code");
  if (!n.operational_coverage.valid())
    out.error("network.coverage", "operational coverage " + range_text(n.operational_coverage) + " is not a valid range");
}

void check_sites(const Network& n, const std::vector<Site>& sites, ReportBuilder& out) {
  std::set<std::string> seen;
  for (const auto& s : sites) {
    const std::string label = "site '" + s.id + "'";
    if (s.id.empty()) out.error("site.id", "site '" + s.name + "' has an empty id");
    else if (!seen.insert(s.id).second) out.error("site.id", label + " is duplicated");
    if (!s.network_id.empty() && s.network_id != n.id)
      out.error("site.network_ref", label + " references unknown network '" + s.network_id + "'");
    if (s.name.empty()) out.error("site.name", label + " has an empty name");
    const auto& p = s.location;
    if (!(p.latitude_deg >= -90.0 && p.latitude_deg <= 90.0) ||
        !(p.longitude_deg >= -180.0 && p.longitude_deg <= 180.0)) {
      std::ostringstream msg;
      msg << label << " location (" << p.latitude_deg << ", " << p.longitude_deg << ") is out of bounds";
      out.error("site.location", msg.str());
    }
    if (!s.installation_coverage.valid()) {
      out.error("site.coverage", label + " installation coverage " + range_text(s.installation_coverage) +
                                     " is not a valid range");
    } else if (n.operational_coverage.valid()) {
      if (!s.installation_coverage.overlaps(n.operational_coverage)) {
        out.error("site.coverage", label + " installation coverage lies outside the network coverage");
      } else if (!n.operational_coverage.contains(s.installation_coverage)) {
        out.warning("site.coverage", label + " installation coverage only partially overlaps the network coverage");
      }
    }
  }
}

void check_sensors(const std::vector<Site>& sites, const std::vector<Sensor>& sensors, const Vocabulary& vocab,
                   ReportBuilder& out) {
  std::set<std::string> site_ids;
  for (const auto& s : sites) site_ids.insert(s.id);
  std::set<std::string> seen;
  for (const auto& s : sensors) {
    const std::string label = "sensor '" + s.id + "'";
    if (s.id.empty()) out.error("sensor.id", "sensor on site '" + s.site_id + "' has an empty id");
    else if (!seen.insert(s.id).second) out.error("sensor.id", label + " is duplicated");
    if (!site_ids.contains(s.site_id))
      out.error("sensor.site_ref", label + " references unknown site '" + s.site_id + "'");
    if (s.sampling_interval.count() <= 0) out.error("sensor.sampling_interval", label + " sampling interval must be > 0");
    if (!vocab.is_variable(s.variable))
      out.error("sensor.variable", label + " variable '" + s.variable + "' is not in the controlled vocabulary");
  }
}

void check_links(const std::vector<DatasetLink>& links, ReportBuilder& out) {
  for (std::size_t i = 0; i < links.size(); ++i) {
    const auto& l = links[i];
    const std::string label = "dataset link #" + std::to_string(i) + (l.doi ? " (" + *l.doi + ")" : "");
    if (l.doi && !is_doi(*l.doi)) out.error("link.doi", label + " DOI does not match 10.<registrant>/<suffix>");
    if (l.title.empty()) out.error("link.title", label + " has an empty title");
    if (!l.temporal_coverage.valid()) {
      out.error("link.coverage", label + " temporal coverage " + range_text(l.temporal_coverage) + " is not a valid range");
      continue;
    }
    if (l.sampling_interval && l.sampling_interval->count() <= 0) {
      out.error("link.sampling_interval", label + " sampling interval must be > 0");
      continue;
    }
    if (l.declared_record_count && *l.declared_record_count < 0)
      out.error("link.record_count", label + " declared record count is negative");
    if (l.declared_record_count && l.sampling_interval) {
      try {
        auto expected = expected_record_count(l.temporal_coverage, *l.sampling_interval);
        if (expected != *l.declared_record_count) {
          out.warning("link.record_count", label + " declares " + std::to_string(*l.declared_record_count) +
                                               " records but coverage and interval imply " + std::to_string(expected));
        }
      } catch (const Error& e) {
        out.warning("link.record_count", label + ": " + e.what());
      }
    }
  }
}

}  // namespace

std::size_t ValidationReport::error_count() const {
  return static_cast<std::size_t>(
      std::count_if(issues.begin(), issues.end(), [](const Issue& i) { return i.severity == Severity::error; }));
}

std::size_t ValidationReport::warning_count() const { return issues.size() - error_count(); }

std::string ValidationReport::summary() const {
  std::string text;
  for (const auto& i : issues) {
    if (!text.empty()) text += "; ";
    text += (i.severity == Severity::error ? "error " : "warning ") + i.code + ": " + i.message;
  }
  return text;
}

ValidationReport validate_network(const Network& network, const std::vector<Site>& sites,
                                  const std::vector<Sensor>& sensors, const std::vector<DatasetLink>& links,
                                  const Vocabulary& vocabulary) {
  ReportBuilder out;
  check_network(network, out);
  check_sites(network, sites, out);
  check_sensors(sites, sensors, vocabulary, out);
  check_links(links, out);
  return out.take();
}

ValidationReport validate_document(const NetworkDocument& document, const Vocabulary& vocabulary) {
  return validate_network(document.network, document.sites, document.sensors, document.dataset_links, vocabulary);
}

ValidationReport validate_for_publication(const NetworkDocument& document, const Vocabulary& vocabulary) {
  auto report = validate_document(document, vocabulary);
  const auto& n = document.network;
  if (n.description.empty())
    report.issues.push_back({Severity::error, "publish.description", "published networks need a description"});
  if (n.country.empty())
    report.issues.push_back({Severity::error, "publish.country", "published networks need a country"});
  if (!n.operational_coverage.valid())
    report.issues.push_back({Severity::error, "publish.coverage", "published networks need an operational coverage"});
  return report;
}

}  // namespace fkp
