// Acceptance run: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <unistd.h>

#include "fkp/api.hpp"
#include "fkp/demo.hpp"
#include "fkp/interchange.hpp"
#include "fkp/validation.hpp"
#include "support.hpp"

using namespace fkp;
using namespace fkp::testing;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail.str("");
      detail << what;
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("fkp_acceptance_" + std::to_string(::getpid())) / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void record_count(Verdict& out) {
  const DateRange span{ymd(2016, 1, 1), ymd(2017, 12, 31)};
  const auto count = expected_record_count(span, std::chrono::hours{1});
  out.require(count == 17544, "expected_record_count gave " + std::to_string(count));
  out.require(brute_force_record_count(span, std::chrono::hours{1}) == 17544, "enumeration oracle disagrees");

  CatalogStore store;
  store.upsert_network(demo::novi_sad_network(), "demo");
  store.publish("novi-sad-urban");
  const auto report = validate_document(store.snapshot()->find("novi-sad-urban")->document);
  out.require(report.error_count() == 0, "seeded fixture has errors: " + report.summary());
  if (out.pass) out.detail << "17544 hourly records for 2016-2017; seeded fixture validates with 0 errors";
}

void search_walkthrough(Verdict& out) {
  CatalogStore demo_store;
  SearchService demo_search(demo_store);
  demo_store.upsert_network(demo::novi_sad_network(), "demo");
  demo_store.publish("novi-sad-urban");
  SearchQuery walk;
  walk.country = "RS";
  walk.local_environment = LocalEnvironment::urban;
  walk.date_range = DateRange{ymd(2016, 1, 1), ymd(2016, 12, 31)};
  const auto hits = demo_search.search(walk);
  out.require(hits.size() == 1 && hits[0].name == "Novi Sad Urban Network", "walkthrough did not return Novi Sad");
  bool doi = false;
  for (const auto& h : hits)
    for (const auto& l : h.doi_links) doi = doi || (l.doi && is_doi(*l.doi));
  out.require(doi, "walkthrough result carries no DOI link");

  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1001);
  std::size_t mismatches = 0, queries = 0;
  for (int catalog = 0; catalog < 500; ++catalog) {
    CatalogStore store;
    SearchService search(store);
    populate(store, rng, uniform(rng, 0, 40));
    const auto snap = store.snapshot();
    for (int i = 0; i < 200; ++i) {
      auto q = random_query(rng);
      if (q.country && !is_iso3166_alpha2(*q.country)) q.country = "JP";
      auto got = ids_of(search.search(q));
      auto want = ids_of(oracle_search(*snap, q));
      std::sort(got.begin(), got.end());
      std::sort(want.begin(), want.end());
      if (got != want) ++mismatches;
      ++queries;
    }
  }
  const double elapsed = seconds_since(t0);
  out.require(mismatches == 0, std::to_string(mismatches) + " oracle mismatches");
  out.require(elapsed < 60.0, "oracle comparison took " + std::to_string(elapsed) + " s");
  if (out.pass)
    out.detail << "Novi Sad found with DOI; " << queries << " random queries over 500 catalogs, 0 mismatches, "
               << static_cast<int>(elapsed * 1000) << " ms";
}

std::string tally_text(const FairAssessment& a) {
  std::string s;
  for (auto p : {Principle::findable, Principle::accessible, Principle::interoperable, Principle::reusable}) {
    const auto& t = a.tally(p);
    s += std::string(to_string(p)).substr(0, 1) + "(" + std::to_string(t.yes) + "," + std::to_string(t.partial) + "," +
         std::to_string(t.no) + ")";
  }
  return s;
}

void fair_rubric(Verdict& out) {
  AssessmentContext ctx;
  ctx.write_policy = WritePolicy::audited_open;
  const auto pis = assess(pis_like_fixture(), ctx);
  const auto pis_tallies = tally_text(pis);
  out.require(pis_tallies == "f(2,2,0)a(2,2,0)i(1,3,0)r(2,2,0)", "PIS-like rollup " + pis_tallies);
  out.require(pis[MetricId::I2].outcome == fkp::Outcome::yes, "the interoperable Yes is not I2");

  StubArchive archive;
  const auto draft = archive.create_deposit({"Readings", "", {}, "CC-BY-4.0", {}});
  std::istringstream file("t,ta\n");
  archive.upload_file(draft.deposit_id, "readings.csv", file);
  const auto doi = archive.publish_deposit(draft.deposit_id);
  AssessmentContext full_ctx;
  full_ctx.probe = [&](const std::string& d) { return archive.resolve(d); };
  const auto full = assess(all_evidence_fixture(doi), full_ctx);
  int yes = 0;
  for (const auto& m : full.per_metric) yes += m.outcome == fkp::Outcome::yes;
  out.require(yes == 16, "all-evidence fixture has " + std::to_string(yes) + " Yes");

  const auto empty = assess(empty_links_fixture(), AssessmentContext{});
  for (auto id : {MetricId::F1, MetricId::A1, MetricId::I1, MetricId::R2})
    out.require(empty[id].outcome == fkp::Outcome::no, std::string("empty-links ") + std::string(to_string(id)) + " is not No");
  if (out.pass) out.detail << "PIS-like " << pis_tallies << " (I2 Yes); all-evidence 16 Yes; empty-links F1/A1/I1/R2 No";
}

void deposit_round_trip(Verdict& out) {
  const auto dir = scratch("deposit");
  std::string doi;
  {
    PortalConfig config;
    config.data_dir = dir;
    Portal portal(config, std::make_unique<StubArchive>(dir / "archive_stub.json"));
    auto doc = demo::novi_sad_network();
    doc.dataset_links.clear();
    portal.catalog().upsert_network(doc, "demo");
    portal.catalog().publish(doc.network.id);

    DepositRequest request;
    request.metadata = {"Hourly air temperature", "12 sites, 2016-2017", {"Station team"}, "CC-BY-4.0", "once"};
    request.files = {{"air_temperature.csv", "time,site,ta\n"}};
    request.sampling_interval = std::chrono::hours{1};
    request.declared_record_count = 17544;
    const auto first = portal.deposit(doc.network.id, request);
    doi = first.doi;
    out.require(is_doi(doi), "deposit returned '" + doi + "'");
    out.require(portal.archive().publish_deposit(first.deposit_id) == doi, "second publish minted a new DOI");
    const auto retry = portal.deposit(doc.network.id, request);
    out.require(retry.doi == doi, "retried deposit returned a different DOI");
    out.require(portal.archive().resolve(doi) == ResolveStatus::reachable, "DOI does not resolve");
    out.require(portal.catalog().snapshot()->find(doc.network.id)->document.dataset_links.size() == 1,
                "retry recorded the DOI twice");
  }
  PortalConfig config;
  config.data_dir = dir;
  Portal reopened(config, std::make_unique<StubArchive>(dir / "archive_stub.json"));
  const auto& links = reopened.catalog().snapshot()->find("novi-sad-urban")->document.dataset_links;
  out.require(links.size() == 1 && links[0].doi == doi, "DOI not persisted as a dataset link");
  const auto a = reopened.assess("novi-sad-urban");
  out.require(a[MetricId::A1].outcome == fkp::Outcome::yes, "A1 after deposit: " + a[MetricId::A1].rationale);
  if (out.pass) out.detail << "minted " << doi << ", persisted, reachable, idempotent; A1 Yes";
}

void analytics_oracle(Verdict& out) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(1005);
  std::size_t cubes = 0, mismatches = 0;
  for (int catalog = 0; catalog < 4; ++catalog) {
    CatalogStore store;
    populate(store, rng, 300);
    const auto snap = store.snapshot();
    const auto index = SearchIndex::build(*snap);
    for (const auto& dims : dimension_subsets()) {
      for (int f = 0; f < 4; ++f) {
        auto filter = f == 0 ? SearchQuery{} : random_query(rng);
        if (filter.country && !is_iso3166_alpha2(*filter.country)) filter.country.reset();
        const CubeQuery q{dims, all_measures(), filter};
        const auto got = cube(*snap, index, q);
        ++cubes;
        if (!(got == oracle_cube(*snap, q))) ++mismatches;
        if (got.totals.network_count != static_cast<std::int64_t>(index.search(filter).size()))
          out.require(false, "network count differs from |search(F)|");
        if (std::find(dims.begin(), dims.end(), Dimension::year) == dims.end()) {
          std::int64_t networks = 0, sites = 0, sensors = 0, records = 0;
          for (const auto& row : got.rows) {
            networks += row.values.network_count;
            sites += row.values.site_count;
            sensors += row.values.sensor_count;
            records += row.values.dataset_record_sum;
          }
          out.require(networks == got.totals.network_count && sites == got.totals.site_count &&
                          sensors == got.totals.sensor_count && records == got.totals.dataset_record_sum,
                      "additive measures do not roll up");
        }
      }
    }
  }
  const double elapsed = seconds_since(t0);
  out.require(mismatches == 0, std::to_string(mismatches) + " cube/oracle mismatches");
  out.require(elapsed < 60.0, "took " + std::to_string(elapsed) + " s");
  if (out.pass)
    out.detail << cubes << " cubes over 300-network catalogs, 0 mismatches, " << static_cast<int>(elapsed * 1000)
               << " ms";
}

void persistence(Verdict& out) {
  std::mt19937_64 rng(1006);
  const auto a_dir = scratch("export_a");
  const auto b_dir = scratch("export_b");
  std::string first;
  {
    CatalogStore a(a_dir);
    populate(a, rng, 60);
    a.upsert_network(demo::novi_sad_network(), "demo");
    a.publish("novi-sad-urban");
    first = a.export_text();
  }
  {
    CatalogStore b(b_dir);
    out.require(b.import_text(first).failed() == 0, "import reported failures");
  }
  CatalogStore b(b_dir);
  out.require(b.export_text() == first, "export -> import -> export differs");

  CatalogStore store(scratch("ops"));
  int next = 0;
  std::size_t ops = 0;
  for (; ops < 1000 && out.pass; ++ops) {
    const auto snap = store.snapshot();
    std::vector<std::string> ids;
    for (const auto& [id, _] : snap->networks) ids.push_back(id);
    try {
      switch (ids.empty() ? 0 : uniform(rng, 0, 4)) {
        case 0: store.upsert_network(random_document(rng, "op" + std::to_string(next++))); break;
        case 1: {
          auto doc = snap->find(pick(rng, ids))->document;
          doc.version = snap->find(doc.network.id)->version;
          doc.network.description += " edited";
          if (!doc.sites.empty()) {
            const auto gone = doc.sites.back().id;
            doc.sites.pop_back();
            std::erase_if(doc.sensors, [&](const Sensor& s) { return s.site_id == gone; });
          }
          store.upsert_network(doc);
          break;
        }
        case 2: store.publish(pick(rng, ids)); break;
        case 3: store.remove(pick(rng, ids)); break;
        case 4: {
          auto doc = random_document(rng, "op" + std::to_string(next++));
          const auto* other = snap->find(pick(rng, ids));
          if (!other->document.sites.empty() && !doc.sites.empty()) {
            const auto old = doc.sites[0].id;
            doc.sites[0].id = other->document.sites[0].id;
            for (auto& s : doc.sensors)
              if (s.site_id == old) s.site_id = doc.sites[0].id;
          }
          store.upsert_network(doc);
          break;
        }
      }
    } catch (const Error&) {
    }
    const auto audit = store.snapshot()->audit();
    out.require(audit.empty(), "audit failed after op " + std::to_string(ops) + ": " + (audit.empty() ? "" : audit[0]));
  }
  if (out.pass) out.detail << "export/import/export byte-identical (" << first.size() << " bytes); audit clean after "
                           << ops << " random ops";
}

void api_contract(Verdict& out) {
  std::mt19937_64 rng(1007);
  std::size_t checks = 0;
  for (int round = 0; round < 30 && out.pass; ++round) {
    Portal portal(PortalConfig{}, std::make_unique<StubArchive>());
    ApiHandler api(portal, TokenStore::parse("writer contributor w\nroot admin r\n"));
    auto call = [&](const std::string& method, const std::string& path, const std::string& token,
                    const std::string& body = {}, std::map<std::string, std::string> query = {}) {
      ApiRequest r{method, path, std::move(query), {}, body, {}};
      if (!token.empty()) r.headers["authorization"] = "Bearer " + token;
      ++checks;
      return api.handle(r);
    };
    std::set<std::string> live, drafts;
    for (int i = 0, n = uniform(rng, 1, 20); i < n; ++i) {
      const auto doc = random_document(rng, "api" + std::to_string(i));
      const auto body = serialize_document(doc);
      out.require(call("POST", "/networks", "", body).status == 401, "anonymous write was not 401");
      out.require(call("POST", "/networks", "writer", body).status == 201, "authenticated write failed");
      if (coin(rng)) {
        out.require(call("POST", "/networks/" + doc.network.id + "/publish", "").status == 401,
                    "anonymous publish was not 401");
        call("POST", "/networks/" + doc.network.id + "/publish", "writer");
        live.insert(doc.network.id);
      } else {
        drafts.insert(doc.network.id);
      }
    }
    for (const auto& id : live) out.require(call("GET", "/networks/" + id, "").status == 200, "published read failed");
    for (const auto& id : drafts) out.require(call("GET", "/networks/" + id, "").status == 404, "draft readable");
    for (int i = 0; i < 20; ++i) {
      auto q = random_query(rng);
      if (q.country && !is_iso3166_alpha2(*q.country)) q.country.reset();
      auto params = query_to_params(q);
      params["limit"] = "500";
      const auto res = call("GET", "/search", "", {}, params);
      const auto found = json::parse(res.body);
      for (const auto& item : found["items"])
        out.require(live.count(item["network_id"].get<std::string>()) == 1, "draft visible in anonymous search");
    }
  }
  if (out.pass) out.detail << checks << " requests over 30 random publish states";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, void (*)(Verdict&)>> criteria = {
      {"record-count", record_count},
      {"search-walkthrough", search_walkthrough},
      {"fair-rubric", fair_rubric},
      {"deposit-round-trip", deposit_round_trip},
      {"analytics-oracle", analytics_oracle},
      {"persistence-round-trip", persistence},
      {"api-contract", api_contract},
  };
  int failed = 0;
  for (const auto& [name, run] : criteria) {
    Verdict out;
    try {
      run(out);
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail.str() << std::endl;
    failed += out.pass ? 0 : 1;
  }
  std::filesystem::remove_all(std::filesystem::temp_directory_path() / ("fkp_acceptance_" + std::to_string(::getpid())));
  return failed == 0 ? 0 : 1;
}
