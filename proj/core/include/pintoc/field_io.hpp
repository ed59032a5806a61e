#pragma once

#include <iosfwd>
#include <string>

#include "pintoc/types.hpp"

namespace pintoc {

/// Plain-text grid dump: header "# nx ny h t", then one row per grid line,
/// space-separated values.
void write_field(std::ostream& os, const Grid& grid, const Field& f, double t);

struct FieldDump {
  int nx = 0;
  int ny = 0;
  double h = 0.0;
  double t = 0.0;
  Field values;
};

FieldDump read_field(std::istream& is);

}  // namespace pintoc
