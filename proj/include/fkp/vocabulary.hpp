#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <string_view>

namespace fkp {

/// Controlled vocabulary for sensor variables and network keywords.
///
/// The default instance carries the seed list; deployments extend it with a
/// JSON config of the form
/// `{"variables": [...], "keywords": [...]}`. Extension only adds terms.
class Vocabulary {
 public:
  Vocabulary();

  static const Vocabulary& defaults();
  /// Seed vocabulary plus the terms listed in `path`.
  static Vocabulary load(const std::filesystem::path& path);

  void add_variable(std::string term);
  void add_keyword(std::string term);

  bool is_variable(std::string_view term) const;
  /// Keywords accept any variable term as well as the keyword list.
  bool is_keyword(std::string_view term) const;

  const std::set<std::string, std::less<>>& variables() const { return variables_; }
  const std::set<std::string, std::less<>>& keywords() const { return keywords_; }

 private:
  std::set<std::string, std::less<>> variables_;
  std::set<std::string, std::less<>> keywords_;
};

/// Parses a UCUM-style unit expression such as `Cel`, `m/s`, `W/m2`, `hPa`,
/// `umol/m2/s` or `%`.
bool is_parseable_unit(std::string_view units);

}  // namespace fkp
