#include "fkp/vocabulary.hpp"

#include <array>
#include <fstream>
#include <json.hpp>

#include "fkp/error.hpp"

namespace fkp {

namespace {

constexpr std::array<std::string_view, 8> kSeedVariables = {
    "air_temperature", "relative_humidity", "wind_speed",       "wind_direction",
    "precipitation",   "global_radiation",  "soil_temperature", "leaf_wetness",
};

constexpr std::array<std::string_view, 10> kSeedKeywords = {
    "micrometeorology",   "urban_climate", "urban_heat_island", "agrometeorology",
    "plant_protection",   "forest_meteorology", "automated_weather_station",
    "air_quality",        "climate_monitoring", "early_warning",
};

// UCUM base atoms accepted after an optional metric prefix.
constexpr std::array<std::string_view, 17> kMetricAtoms = {
    "m", "s", "g", "K", "Pa", "W", "J", "L", "l", "mol", "lx", "bar", "h", "min", "d", "Cel", "rad",
};
// Atoms that never take a prefix.
constexpr std::array<std::string_view, 6> kPlainAtoms = {"%", "deg", "1", "ppm", "ppb", "[degF]"};
constexpr std::array<std::string_view, 10> kPrefixes = {"da", "k", "h", "d", "c", "m", "u", "n", "M", "G"};

bool is_atom(std::string_view token) {
  for (auto atom : kPlainAtoms)
    if (token == atom) return true;
  for (auto atom : kMetricAtoms)
    if (token == atom) return true;
  for (auto prefix : kPrefixes) {
    if (token.size() > prefix.size() && token.substr(0, prefix.size()) == prefix) {
      auto rest = token.substr(prefix.size());
      for (auto atom : kMetricAtoms)
        if (rest == atom) return true;
    }
  }
  return false;
}

// term := atom [-]digits?
bool is_term(std::string_view term) {
  std::size_t end = term.size();
  while (end > 0 && term[end - 1] >= '0' && term[end - 1] <= '9') --end;
  if (end < term.size() && end > 0 && term[end - 1] == '-') --end;
  auto atom = term.substr(0, end);
  if (atom.empty()) return term == "1";
  if (end < term.size() && (atom == "%" || atom == "1")) return false;
  return is_atom(atom);
}

}  // namespace

Vocabulary::Vocabulary() {
  for (auto v : kSeedVariables) variables_.emplace(v);
  for (auto k : kSeedKeywords) keywords_.emplace(k);
}

const Vocabulary& Vocabulary::defaults() {
  static const Vocabulary instance;
  return instance;
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot read vocabulary file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error, "vocabulary file " + path.string() + ": " + e.what());
  }
  Vocabulary vocab;
  for (const auto& v : doc.value("variables", nlohmann::json::array())) vocab.add_variable(v.get<std::string>());
  for (const auto& k : doc.value("keywords", nlohmann::json::array())) vocab.add_keyword(k.get<std::string>());
  return vocab;
}

void Vocabulary::add_variable(std::string term) { variables_.insert(std::move(term)); }
void Vocabulary::add_keyword(std::string term) { keywords_.insert(std::move(term)); }

bool Vocabulary::is_variable(std::string_view term) const { return variables_.find(term) != variables_.end(); }

bool Vocabulary::is_keyword(std::string_view term) const {
  return keywords_.find(term) != keywords_.end() || is_variable(term);
}

bool is_parseable_unit(std::string_view units) {
  if (units.empty()) return false;
  std::size_t pos = 0;
  while (true) {
    auto next = units.find_first_of("./", pos);
    auto term = units.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
    if (!is_term(term)) return false;
    if (next == std::string_view::npos) return true;
    pos = next + 1;
  }
}

}  // namespace fkp
