#pragma once

#include "fkp/model.hpp"

namespace fkp::demo {

/// Novi Sad Urban Network: 12 urban sites with one hourly air-temperature
/// sensor each, covering 2016-01-01..2017-12-31, and two archived datasets
/// (site table, hourly temperature series of 17,544 records). Unpublished.
/// Site names and coordinates are illustrative placeholders.
NetworkDocument novi_sad_network();

}  // namespace fkp::demo
