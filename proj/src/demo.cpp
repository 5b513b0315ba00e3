#include "fkp/demo.hpp"

#include <array>
#include <cstdio>

namespace fkp::demo {

NetworkDocument novi_sad_network() {
  using namespace std::chrono;
  const DateRange coverage{2016y / January / 1, 2017y / December / 31};

  NetworkDocument doc;
  auto& n = doc.network;
  n.id = "novi-sad-urban";
  n.name = "Novi Sad Urban Network";
  n.country = "RS";
  n.region = "Vojvodina";
  n.description =
      "Urban automated weather station network in Novi Sad. The archived subset holds hourly air "
      "temperature from 12 urban sites for 2016 and 2017, cleaned and gap-filled to 24 measures per site per day.";
  n.owner_institution = "University of Novi Sad";
  n.local_environment = LocalEnvironment::urban;
  n.operational_coverage = coverage;
  n.keywords = {"air_temperature", "micrometeorology", "urban_climate"};

  // Grid of placeholder locations across the city centre.
  constexpr std::array<std::pair<double, double>, 12> kOffsets = {{
      {0.000, 0.000}, {0.010, 0.012}, {-0.008, 0.020}, {0.015, -0.010}, {-0.012, -0.015}, {0.022, 0.004},
      {-0.020, 0.006}, {0.006, 0.030}, {0.004, -0.028}, {-0.016, 0.026}, {0.026, -0.022}, {-0.025, -0.030},
  }};
  for (std::size_t i = 0; i < kOffsets.size(); ++i) {
    char suffix[8];
    std::snprintf(suffix, sizeof suffix, "%02zu", i + 1);
    Site site;
    site.id = std::string("nsunet-") + suffix;
    site.network_id = n.id;
    site.name = std::string("Novi Sad urban site ") + suffix;
    site.location = {45.2517 + kOffsets[i].first, 19.8369 + kOffsets[i].second, std::nullopt};
    site.local_environment = LocalEnvironment::urban;
    site.installation_coverage = coverage;
    doc.sites.push_back(site);

    Sensor sensor;
    sensor.id = site.id + "-ta";
    sensor.site_id = site.id;
    sensor.variable = "air_temperature";
    sensor.units = "Cel";
    sensor.sampling_interval = hours{1};
    doc.sensors.push_back(sensor);
  }

  DatasetLink sites;
  sites.doi = "10.5072/fkp.novi-sad.sites";
  sites.archive_url = "https://archive.stub.invalid/records/novi-sad-sites";
  sites.title = "Novi Sad Urban Network: site descriptions";
  sites.file_format = "csv";
  sites.temporal_coverage = coverage;
  sites.description = "Details of the 12 sites at which the temperature sensors are placed.";
  doc.dataset_links.push_back(sites);

  DatasetLink temperature;
  temperature.doi = "10.5072/fkp.novi-sad.air-temperature";
  temperature.archive_url = "https://archive.stub.invalid/records/novi-sad-air-temperature";
  temperature.title = "Novi Sad Urban Network: hourly air temperature 2016-2017";
  temperature.file_format = "csv";
  temperature.temporal_coverage = coverage;
  temperature.sampling_interval = hours{1};
  temperature.declared_record_count = 17544;
  temperature.description = "Hourly air temperature at the 12 sites.";
  doc.dataset_links.push_back(temperature);
  return doc;
}

}  // namespace fkp::demo
