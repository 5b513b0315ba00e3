#include <gtest/gtest.h>

#include "fkp/demo.hpp"
#include "fkp/interchange.hpp"
#include "fkp/validation.hpp"
#include "support.hpp"

using namespace fkp;
using namespace fkp::testing;

namespace {

const std::vector<Seconds> kDayDivisors = {Seconds{60},   Seconds{300},   Seconds{600},   Seconds{900},
                                           Seconds{1800}, Seconds{3600},  Seconds{7200},  Seconds{10800},
                                           Seconds{21600}, Seconds{43200}, Seconds{86400}};

}  // namespace

TEST(Dates, ParseAndFormat) {
  EXPECT_EQ(parse_date("2016-02-29"), ymd(2016, 2, 29));
  EXPECT_EQ(format_date(ymd(2017, 12, 31)), "2017-12-31");
  EXPECT_THROW(parse_date("2017-02-29"), Error);
  EXPECT_THROW(parse_date("2016-2-1"), Error);
  EXPECT_THROW(parse_date("yesterday"), Error);
}

TEST(Dates, RangeRelations) {
  const DateRange y2016{ymd(2016, 1, 1), ymd(2016, 12, 31)};
  EXPECT_EQ(y2016.day_count(), 366);
  EXPECT_TRUE(y2016.overlaps({ymd(2016, 12, 31), ymd(2018, 1, 1)}));
  EXPECT_FALSE(y2016.overlaps({ymd(2017, 1, 1), ymd(2018, 1, 1)}));
  EXPECT_TRUE(y2016.contains(DateRange{ymd(2016, 3, 1), ymd(2016, 3, 2)}));
  EXPECT_FALSE((DateRange{ymd(2016, 3, 2), ymd(2016, 3, 1)}).valid());
}

TEST(RecordCount, TwoYearsHourly) {
  const DateRange span{ymd(2016, 1, 1), ymd(2017, 12, 31)};
  EXPECT_EQ(brute_force_record_count(span, std::chrono::hours{1}), 17544);
  EXPECT_EQ(expected_record_count(span, std::chrono::hours{1}), 17544);
}

TEST(RecordCount, LeapYearAndSingleDay) {
  EXPECT_EQ(expected_record_count({ymd(2016, 1, 1), ymd(2016, 12, 31)}, std::chrono::hours{1}), 8784);
  EXPECT_EQ(expected_record_count({ymd(2016, 5, 5), ymd(2016, 5, 5)}, std::chrono::hours{24}), 1);
}

TEST(RecordCount, IntervalMustDivideDay) {
  EXPECT_THROW(expected_record_count({ymd(2016, 1, 1), ymd(2016, 1, 2)}, std::chrono::hours{7}), Error);
  EXPECT_THROW(expected_record_count({ymd(2016, 1, 1), ymd(2016, 1, 2)}, Seconds{0}), Error);
}

TEST(RecordCount, MatchesInstantEnumeration) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 300; ++i) {
    const Date a = random_date(rng, 1999, 2030);
    const DateRange r{a, Date{sys_days{a} + days{uniform(rng, 0, 400)}}};
    const auto interval = pick(rng, kDayDivisors);
    ASSERT_EQ(expected_record_count(r, interval), brute_force_record_count(r, interval))
        << format_date(r.start) << ".." << format_date(r.end) << " every " << interval.count() << "s";
  }
}

TEST(Seasonality, LateWinterIntoSpring) {
  EXPECT_EQ(derive_seasonality({ymd(2016, 2, 20), ymd(2016, 3, 10)}),
            (std::set<Season>{Season::winter, Season::spring}));
  EXPECT_EQ(derive_seasonality({ymd(2016, 1, 1), ymd(2017, 12, 31)}).size(), 4u);
}

TEST(Seasonality, MatchesDayWalkAndIsMonotone) {
  std::mt19937_64 rng(12);
  for (int i = 0; i < 500; ++i) {
    const Date a = random_date(rng, 2000, 2025);
    const DateRange outer{a, Date{sys_days{a} + days{uniform(rng, 0, 500)}}};
    const auto seasons = derive_seasonality(outer);
    ASSERT_EQ(seasons, walk_seasons(outer)) << format_date(outer.start) << ".." << format_date(outer.end);

    const auto len = (sys_days{outer.end} - sys_days{outer.start}).count();
    const auto lo = uniform(rng, 0, static_cast<int>(len));
    const DateRange inner{Date{sys_days{outer.start} + days{lo}},
                          Date{sys_days{outer.start} + days{uniform(rng, lo, static_cast<int>(len))}}};
    for (auto s : derive_seasonality(inner)) ASSERT_TRUE(seasons.count(s));
  }
}

TEST(Completeness, BareHalfAndFull) {
  auto doc = pis_like_fixture();
  auto& n = doc.network;

  auto bare = doc;
  bare.network.region.clear();
  bare.network.keywords.clear();
  bare.network.contacts.clear();
  bare.network.license.reset();
  bare.network.provenance_note.reset();
  bare.network.related_links.clear();
  bare.network.owner_institution.clear();
  bare.dataset_links.clear();
  EXPECT_DOUBLE_EQ(completeness_score(bare), 0.0);

  auto half = bare;
  half.network.region = n.region;
  half.network.keywords = n.keywords;
  half.network.contacts = n.contacts;
  half.network.license = n.license;
  half.network.provenance_note = n.provenance_note;
  EXPECT_DOUBLE_EQ(completeness_score(half), 0.5);

  auto full = doc;
  for (auto& l : full.dataset_links) {
    l.license = "CC-BY-4.0";
    l.declared_record_count = 1;
  }
  EXPECT_DOUBLE_EQ(completeness_score(full), 1.0);
  EXPECT_EQ(completeness_checklist(full.network, full.dataset_links).size(), 10u);
}

TEST(Completeness, FillingAFieldNeverLowersTheScore) {
  auto doc = empty_links_fixture();
  doc.network.region.clear();
  doc.network.keywords.clear();
  doc.network.contacts.clear();
  doc.network.license.reset();
  doc.network.related_links.clear();

  std::vector<std::function<void(NetworkDocument&)>> fills = {
      [](auto& d) { d.network.region = "Somewhere"; },
      [](auto& d) { d.network.keywords = {"micrometeorology"}; },
      [](auto& d) { d.network.contacts = {{"A", "B", "c@d.org"}}; },
      [](auto& d) { d.network.license = "CC0-1.0"; },
      [](auto& d) { d.network.related_links = {"https://example.org"}; },
      [](auto& d) {
        DatasetLink l;
        l.title = "x";
        l.archive_url = "https://example.org/x";
        l.temporal_coverage = d.network.operational_coverage;
        l.license = "CC0-1.0";
        l.declared_record_count = 3;
        d.dataset_links.push_back(l);
      },
  };
  std::mt19937_64 rng(13);
  for (int round = 0; round < 20; ++round) {
    std::shuffle(fills.begin(), fills.end(), rng);
    auto d = doc;
    double previous = completeness_score(d);
    for (const auto& f : fills) {
      f(d);
      const double now = completeness_score(d);
      ASSERT_GE(now, previous);
      previous = now;
    }
    ASSERT_DOUBLE_EQ(previous, 1.0);
  }
}

TEST(Completeness, InvalidRecordThrows) {
  auto doc = pis_like_fixture();
  doc.network.country = "XX";
  EXPECT_THROW(completeness_score(doc), ValidationError);
}

TEST(Identifiers, DoiCountryUrl) {
  EXPECT_TRUE(is_doi("10.5281/zenodo.1234567"));
  EXPECT_TRUE(is_doi("10.5072/fkp.1"));
  EXPECT_FALSE(is_doi("10.12/abc"));
  EXPECT_FALSE(is_doi("doi:10.5281/x"));
  EXPECT_FALSE(is_doi("10.5281/"));
  EXPECT_EQ(find_doi_in_text("see 10.5281/zenodo.99 for data"), "10.5281/zenodo.99");
  EXPECT_FALSE(find_doi_in_text("no identifier here"));

  for (auto c : {"RS", "DE", "US", "JP", "AQ", "ZW"}) EXPECT_TRUE(is_iso3166_alpha2(c)) << c;
  for (auto c : {"XX", "rs", "", "SRB", "UK"}) EXPECT_FALSE(is_iso3166_alpha2(c)) << c;

  EXPECT_TRUE(is_http_url("https://example.org/a?b"));
  EXPECT_FALSE(is_http_url("ftp://example.org"));
  EXPECT_FALSE(is_http_url("https://"));
}

TEST(Units, ParseableUnits) {
  for (auto u : {"Cel", "m/s", "W/m2", "hPa", "umol/m2/s", "%", "mm", "m.s-1", "K"}) EXPECT_TRUE(is_parseable_unit(u)) << u;
  for (auto u : {"", "degrees C", "m//s", "furlong"}) EXPECT_FALSE(is_parseable_unit(u)) << u;
}

TEST(Validation, DemoFixtureIsClean) {
  const auto report = validate_document(demo::novi_sad_network());
  EXPECT_TRUE(report.empty()) << report.summary();
  EXPECT_TRUE(validate_for_publication(demo::novi_sad_network()).empty());
}

TEST(Validation, LatitudeOutOfBoundsIsOneError) {
  auto doc = demo::novi_sad_network();
  doc.sites[3].location.latitude_deg = 91.0;
  const auto report = validate_document(doc);
  ASSERT_EQ(report.error_count(), 1u) << report.summary();
  EXPECT_EQ(report.issues[0].code, "site.location");
}

TEST(Validation, RecordCountMismatchWarns) {
  auto doc = demo::novi_sad_network();
  doc.dataset_links[1].declared_record_count = 17000;
  const auto report = validate_document(doc);
  EXPECT_EQ(report.error_count(), 0u);
  ASSERT_EQ(report.warning_count(), 1u);
  EXPECT_EQ(report.issues[0].code, "link.record_count");
}

TEST(Validation, ReferenceAndShapeErrors) {
  auto doc = demo::novi_sad_network();
  doc.sensors[0].site_id = "nowhere";
  doc.dataset_links[0].doi = "not-a-doi";
  doc.network.country = "Serbia";
  doc.sensors[1].variable = "mood";
  const auto report = validate_document(doc);
  std::set<std::string> codes;
  for (const auto& i : report.issues) codes.insert(i.code);
  EXPECT_EQ(codes, (std::set<std::string>{"sensor.site_ref", "link.doi", "network.country", "sensor.variable"}));
}

TEST(Validation, SiteCoverage) {
  auto doc = demo::novi_sad_network();
  doc.sites[0].installation_coverage = {ymd(2015, 6, 1), ymd(2016, 6, 1)};
  auto report = validate_document(doc);
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].severity, Severity::warning);

  doc.sites[0].installation_coverage = {ymd(2010, 1, 1), ymd(2011, 1, 1)};
  report = validate_document(doc);
  ASSERT_EQ(report.issues.size(), 1u);
  EXPECT_EQ(report.issues[0].severity, Severity::error);
}

TEST(Validation, PublicationGateNeedsDescription) {
  auto doc = demo::novi_sad_network();
  doc.network.description.clear();
  EXPECT_TRUE(validate_document(doc).admissible());
  EXPECT_FALSE(validate_for_publication(doc).admissible());
}

TEST(Interchange, RoundTripIsLossless) {
  std::mt19937_64 rng(14);
  std::vector<NetworkDocument> docs = {demo::novi_sad_network(), pis_like_fixture(), all_evidence_fixture("10.5072/x.1")};
  for (int i = 0; i < 200; ++i) docs.push_back(random_document(rng, "rt" + std::to_string(i)));
  docs.back().version = 7;
  for (const auto& d : docs) {
    const auto text = serialize_document(d);
    const auto parsed = parse_document(text);
    ASSERT_EQ(parsed, d) << text;
    ASSERT_EQ(serialize_document(parsed), text);
  }
}

TEST(Interchange, StrictParsing) {
  auto j = to_json(demo::novi_sad_network());
  auto unknown = j;
  unknown["network"]["colour"] = "blue";
  EXPECT_THROW(document_from_json(unknown), Error);

  auto wrong_format = j;
  wrong_format["format"] = "something-else";
  EXPECT_THROW(document_from_json(wrong_format), Error);

  auto bad_date = j;
  bad_date["network"]["operational_coverage"]["start"] = "2016-13-01";
  EXPECT_THROW(document_from_json(bad_date), Error);

  EXPECT_THROW(parse_document("{not json"), Error);
}
