#include "fkp/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <regex>

#include "fkp/validation.hpp"

namespace fkp {

namespace {

using std::chrono::sys_days;

constexpr std::int64_t kSecondsPerDay = 86400;

// ISO 3166-1 alpha-2 officially assigned codes.
constexpr std::array<std::string_view, 249> kCountryCodes = {
    "AD", "AE", "AF", "AG", "AI", "AL", "AM", "AO", "AQ", "AR", "AS", "AT", "AU", "AW", "AX",
    "AZ", "BA", "BB", "BD", "BE", "BF", "BG", "BH", "BI", "BJ", "BL", "BM", "BN", "BO", "BQ",
    "BR", "BS", "BT", "BV", "BW", "BY", "BZ", "CA", "CC", "CD", "CF", "CG", "CH", "CI", "CK",
    "CL", "CM", "CN", "CO", "CR", "CU", "CV", "CW", "CX", "CY", "CZ", "DE", "DJ", "DK", "DM",
    "DO", "DZ", "EC", "EE", "EG", "EH", "ER", "ES", "ET", "FI", "FJ", "FK", "FM", "FO", "FR",
    "GA", "GB", "GD", "GE", "GF", "GG", "GH", "GI", "GL", "GM", "GN", "GP", "GQ", "GR", "GS",
    "GT", "GU", "GW", "GY", "HK", "HM", "HN", "HR", "HT", "HU", "ID", "IE", "IL", "IM", "IN",
    "IO", "IQ", "IR", "IS", "IT", "JE", "JM", "JO", "JP", "KE", "KG", "KH", "KI", "KM", "KN",
    "KP", "KR", "KW", "KY", "KZ", "LA", "LB", "LC", "LI", "LK", "LR", "LS", "LT", "LU", "LV",
    "LY", "MA", "MC", "MD", "ME", "MF", "MG", "MH", "MK", "ML", "MM", "MN", "MO", "MP", "MQ",
    "MR", "MS", "MT", "MU", "MV", "MW", "MX", "MY", "MZ", "NA", "NC", "NE", "NF", "NG", "NI",
    "NL", "NO", "NP", "NR", "NU", "NZ", "OM", "PA", "PE", "PF", "PG", "PH", "PK", "PL", "PM",
    "PN", "PR", "PS", "PT", "PW", "PY", "QA", "RE", "RO", "RS", "RU", "RW", "SA", "SB", "SC",
    "SD", "SE", "SG", "SH", "SI", "SJ", "SK", "SL", "SM", "SN", "SO", "SR", "SS", "ST", "SV",
    "SX", "SY", "SZ", "TC", "TD", "TF", "TG", "TH", "TJ", "TK", "TL", "TM", "TN", "TO", "TR",
    "TT", "TV", "TW", "TZ", "UA", "UG", "UM", "US", "UY", "UZ", "VA", "VC", "VE", "VG", "VI",
    "VN", "VU", "WF", "WS", "YE", "YT", "ZA", "ZM", "ZW",
};

bool has_text(const std::optional<std::string>& value) { return value && !value->empty(); }

}  // namespace

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::not_found: return "not_found";
    case ErrorCode::validation_failed: return "validation_failed";
    case ErrorCode::integrity: return "integrity";
    case ErrorCode::version_conflict: return "version_conflict";
    case ErrorCode::unauthorized: return "unauthorized";
    case ErrorCode::forbidden: return "forbidden";
    case ErrorCode::state: return "state";
    case ErrorCode::transport: return "transport";
    case ErrorCode::permanent: return "permanent";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

Date parse_date(std::string_view text) {
  auto fail = [&] {
    return Error(ErrorCode::parse_error, "invalid date '" + std::string(text) + "', expected YYYY-MM-DD");
  };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw fail();
  auto number = [&](std::size_t pos, std::size_t len) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, value);
    if (ec != std::errc{} || ptr != text.data() + pos + len) throw fail();
    return value;
  };
  Date date{std::chrono::year{number(0, 4)}, std::chrono::month{static_cast<unsigned>(number(5, 2))},
            std::chrono::day{static_cast<unsigned>(number(8, 2))}};
  if (!date.ok()) throw fail();
  return date;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
  return buf;
}

bool DateRange::valid() const { return start.ok() && end.ok() && sys_days{start} <= sys_days{end}; }

std::int64_t DateRange::day_count() const {
  if (!valid()) return 0;
  return (sys_days{end} - sys_days{start}).count() + 1;
}

bool DateRange::overlaps(const DateRange& other) const {
  return sys_days{start} <= sys_days{other.end} && sys_days{other.start} <= sys_days{end};
}

bool DateRange::contains(const DateRange& other) const {
  return sys_days{start} <= sys_days{other.start} && sys_days{other.end} <= sys_days{end};
}

bool DateRange::contains(const Date& day) const {
  return sys_days{start} <= sys_days{day} && sys_days{day} <= sys_days{end};
}

std::string_view to_string(LocalEnvironment env) {
  switch (env) {
    case LocalEnvironment::urban: return "urban";
    case LocalEnvironment::suburban: return "suburban";
    case LocalEnvironment::rural: return "rural";
  }
  return "urban";
}

std::optional<LocalEnvironment> parse_local_environment(std::string_view text) {
  if (text == "urban") return LocalEnvironment::urban;
  if (text == "suburban") return LocalEnvironment::suburban;
  if (text == "rural") return LocalEnvironment::rural;
  return std::nullopt;
}

std::string_view to_string(Season season) {
  switch (season) {
    case Season::winter: return "winter";
    case Season::spring: return "spring";
    case Season::summer: return "summer";
    case Season::autumn: return "autumn";
  }
  return "winter";
}

std::optional<Season> parse_season(std::string_view text) {
  if (text == "winter") return Season::winter;
  if (text == "spring") return Season::spring;
  if (text == "summer") return Season::summer;
  if (text == "autumn") return Season::autumn;
  return std::nullopt;
}

Season season_of(std::chrono::month m) {
  switch (static_cast<unsigned>(m)) {
    case 12: case 1: case 2: return Season::winter;
    case 3: case 4: case 5: return Season::spring;
    case 6: case 7: case 8: return Season::summer;
    default: return Season::autumn;
  }
}

bool is_doi(std::string_view text) {
  static const std::regex pattern(R"(10\.[0-9]{4,9}(\.[0-9]+)*/\S+)");
  return std::regex_match(text.begin(), text.end(), pattern);
}

std::optional<std::string> find_doi_in_text(std::string_view text) {
  static const std::regex pattern(R"(10\.[0-9]{4,9}(\.[0-9]+)*/[^\s"<>]+)");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(text.begin(), text.end(), m, pattern)) return m.str();
  return std::nullopt;
}

bool is_iso3166_alpha2(std::string_view code) {
  return std::binary_search(kCountryCodes.begin(), kCountryCodes.end(), code);
}

bool is_http_url(std::string_view text) {
  static const std::regex pattern(R"(https?://[A-Za-z0-9.-]+(:[0-9]+)?(/\S*)?)");
  return std::regex_match(text.begin(), text.end(), pattern);
}

std::int64_t expected_record_count(const DateRange& coverage, Seconds interval) {
  if (interval.count() <= 0) throw Error(ErrorCode::invalid_argument, "sampling interval must be positive");
  if (!coverage.valid()) throw Error(ErrorCode::invalid_argument, "coverage start is after its end");
  if (kSecondsPerDay % interval.count() != 0) {
    throw Error(ErrorCode::invalid_argument,
                "sampling interval of " + std::to_string(interval.count()) +
                    " s does not divide a day (86400 s) exactly");
  }
  return coverage.day_count() * (kSecondsPerDay / interval.count());
}

std::set<Season> derive_seasonality(const DateRange& coverage) {
  std::set<Season> seasons;
  if (!coverage.valid()) return seasons;
  // Month granularity suffices: every month belongs to exactly one season.
  auto month = std::chrono::year_month{coverage.start.year(), coverage.start.month()};
  const auto last = std::chrono::year_month{coverage.end.year(), coverage.end.month()};
  while (month <= last && seasons.size() < 4) {
    seasons.insert(season_of(month.month()));
    month += std::chrono::months{1};
  }
  return seasons;
}

std::vector<ChecklistItem> completeness_checklist(const Network& network,
                                                  const std::vector<DatasetLink>& links) {
  const bool any_links = !links.empty();
  return {
      {"network.region", !network.region.empty()},
      {"network.keywords", !network.keywords.empty()},
      {"network.contacts", !network.contacts.empty()},
      {"network.license", has_text(network.license)},
      {"network.provenance_note", has_text(network.provenance_note)},
      {"network.related_links", !network.related_links.empty()},
      {"network.owner_institution", !network.owner_institution.empty()},
      {"dataset_links", any_links},
      {"dataset_links.license",
       any_links && std::all_of(links.begin(), links.end(), [](const auto& l) { return has_text(l.license); })},
      {"dataset_links.declared_record_count",
       any_links && std::all_of(links.begin(), links.end(),
                                [](const auto& l) { return l.declared_record_count.has_value(); })},
  };
}

double completeness_score(const NetworkDocument& document) {
  auto report = validate_document(document);
  if (!report.admissible()) throw ValidationError("completeness requires a valid record", std::move(report));
  const auto items = completeness_checklist(document.network, document.dataset_links);
  const auto filled = std::count_if(items.begin(), items.end(), [](const auto& i) { return i.filled; });
  return static_cast<double>(filled) / static_cast<double>(items.size());
}

}  // namespace fkp
