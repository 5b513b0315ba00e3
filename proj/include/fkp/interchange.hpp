#pragma once

// Network interchange document: one network with nested sites, sensors and
// dataset links, serialized as JSON. Schema tag "fkp-network", version 1.
// Parsing is strict (unknown keys are rejected) so that parse -> serialize is
// lossless.

#include <string>
#include <string_view>

#include <json.hpp>

#include "fkp/model.hpp"

namespace fkp {

inline constexpr std::string_view kDocumentFormat = "fkp-network";
inline constexpr int kDocumentVersion = 1;

nlohmann::json to_json(const DateRange& range);
nlohmann::json to_json(const Network& network);
nlohmann::json to_json(const Site& site);
nlohmann::json to_json(const Sensor& sensor);
nlohmann::json to_json(const DatasetLink& link);
nlohmann::json to_json(const NetworkDocument& document);

/// Throw Error{parse_error} naming the offending field.
DateRange date_range_from_json(const nlohmann::json& j);
DatasetLink dataset_link_from_json(const nlohmann::json& j);
NetworkDocument document_from_json(const nlohmann::json& j);

NetworkDocument parse_document(std::string_view text);
/// Canonical text form: sorted keys, two-space indent, trailing newline.
std::string serialize_document(const NetworkDocument& document);

std::string dump_canonical(const nlohmann::json& j);

}  // namespace fkp
