#include "pintoc/field_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>

namespace pintoc {

void write_field(std::ostream& os, const Grid& grid, const Field& f,
                 double t) {
  if (f.size() != grid.num_nodes())
    throw ShapeError("write_field: field size does not match grid");
  char buf[48];
  os << "# " << grid.nx() << " " << grid.ny() << " ";
  std::snprintf(buf, sizeof buf, "%.17g %.17g\n", grid.hx(), t);
  os << buf;
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", f[grid.node_index(i, j)]);
      os << (i ? " " : "") << buf;
    }
    os << "\n";
  }
}

FieldDump read_field(std::istream& is) {
  FieldDump d;
  std::string line;
  if (!std::getline(is, line))
    throw ShapeError("read_field: empty input");
  std::istringstream header(line);
  char hash;
  if (!(header >> hash >> d.nx >> d.ny >> d.h >> d.t) || hash != '#')
    throw ShapeError("read_field: bad header");
  d.values.resize(static_cast<long>(d.nx) * d.ny);
  for (int j = 0; j < d.ny; ++j) {
    if (!std::getline(is, line))
      throw ShapeError("read_field: truncated dump");
    std::istringstream row(line);
    for (int i = 0; i < d.nx; ++i) {
      if (!(row >> d.values[static_cast<long>(j) * d.nx + i]))
        throw ShapeError("read_field: short row");
    }
  }
  return d;
}

}  // namespace pintoc
