#pragma once

#include <string>
#include <vector>

#include "fkp/error.hpp"
#include "fkp/model.hpp"
#include "fkp/vocabulary.hpp"

namespace fkp {

enum class Severity { error, warning };

struct Issue {
  Severity severity;
  std::string code;
  std::string message;

  bool operator==(const Issue&) const = default;
};

struct ValidationReport {
  std::vector<Issue> issues;

  bool empty() const { return issues.empty(); }
  std::size_t error_count() const;
  std::size_t warning_count() const;
  bool admissible() const { return error_count() == 0; }
  std::string summary() const;
};

/// Thrown when an operation requires an admissible record.
class ValidationError : public Error {
 public:
  ValidationError(std::string message, ValidationReport report,
                  ErrorCode code = ErrorCode::validation_failed)
      : Error(code, std::move(message)), report_(std::move(report)) {}

  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Checks every type invariant of the record. Never throws.
ValidationReport validate_network(const Network& network, const std::vector<Site>& sites,
                                  const std::vector<Sensor>& sensors,
                                  const std::vector<DatasetLink>& links = {},
                                  const Vocabulary& vocabulary = Vocabulary::defaults());

ValidationReport validate_document(const NetworkDocument& document,
                                   const Vocabulary& vocabulary = Vocabulary::defaults());

/// validate_document plus the publication gate (description, country and
/// operational coverage must be present).
ValidationReport validate_for_publication(const NetworkDocument& document,
                                          const Vocabulary& vocabulary = Vocabulary::defaults());

}  // namespace fkp
