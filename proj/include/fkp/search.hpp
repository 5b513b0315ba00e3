#pragma once

// Faceted + keyword search over published networks.
//
// SearchIndex is an immutable generation: inverted postings per facet
// (country, local environment, season) plus a token index with term
// frequencies. SearchService holds the current generation and swaps it
// atomically on each catalog commit.

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fkp/catalog.hpp"
#include "fkp/model.hpp"

namespace fkp {

struct SearchQuery {
  std::optional<std::string> country;
  std::optional<std::string> region;
  std::optional<LocalEnvironment> local_environment;
  std::set<Season> seasonality;  // empty: no constraint
  std::optional<DateRange> date_range;
  std::vector<std::string> keywords;

  bool operator==(const SearchQuery&) const = default;
};

/// Throws Error{invalid_argument} for an unknown country code or an inverted
/// date range.
void check_query(const SearchQuery& query);

/// Builds a query from URL parameters: country, region, env, season
/// (comma-separated), date_from, date_to, q (whitespace-separated terms).
/// A lone date_from or date_to leaves the other end open.
SearchQuery query_from_params(const std::map<std::string, std::string>& params);
std::map<std::string, std::string> query_to_params(const SearchQuery& query);

/// Lowercased alphanumeric tokens; every other ASCII byte separates tokens.
std::vector<std::string> tokenize(std::string_view text);

struct LinkSummary {
  std::optional<std::string> doi;
  std::string archive_url;
  std::string title;
  std::optional<std::string> license;
  std::string file_format;

  bool operator==(const LinkSummary&) const = default;
};

struct SearchResult {
  std::string network_id;
  std::string name;
  std::string country;
  LocalEnvironment local_environment;
  DateRange coverage;
  std::size_t site_count = 0;
  std::vector<LinkSummary> doi_links;
  double score = 0.0;

  bool operator==(const SearchResult&) const = default;
};

nlohmann::json to_json(const SearchResult& result);

struct IndexStats {
  std::int64_t revision = 0;
  std::size_t documents = 0;
  std::size_t distinct_tokens = 0;
};

class SearchIndex {
 public:
  /// Full rebuild from the visible networks of `snapshot`.
  static SearchIndex build(const Snapshot& snapshot);

  /// New generation with the postings of `changed` re-derived from `snapshot`.
  SearchIndex updated(const Snapshot& snapshot, const std::vector<std::string>& changed) const;

  std::vector<SearchResult> search(const SearchQuery& query) const;
  IndexStats stats() const;

 private:
  struct Doc {
    SearchResult summary;
    std::string region_lower;
    std::set<Season> seasons;
    std::map<std::string, int> term_frequency;
  };

  void add(const CatalogEntry& entry);
  void erase(const std::string& id);

  std::int64_t revision_ = 0;
  std::map<std::string, Doc> docs_;
  std::map<std::string, std::set<std::string>> by_country_;
  std::map<LocalEnvironment, std::set<std::string>> by_environment_;
  std::map<Season, std::set<std::string>> by_season_;
  std::map<std::string, std::map<std::string, int>> postings_;  // token -> (doc -> tf)
};

class SearchService {
 public:
  explicit SearchService(const Snapshot& snapshot);
  /// Subscribes to `store` so every commit produces a new index generation.
  explicit SearchService(CatalogStore& store);

  std::vector<SearchResult> search(const SearchQuery& query) const;
  IndexStats rebuild_index(const Snapshot& snapshot);
  void apply(const Snapshot& snapshot, const std::vector<std::string>& changed);
  std::shared_ptr<const SearchIndex> current() const;

 private:
  mutable std::mutex mutex_;
  std::shared_ptr<const SearchIndex> index_;
};

}  // namespace fkp
