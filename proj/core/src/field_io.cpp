#include "wellpose/field_io.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wellpose {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_field_csv(std::ostream& os, const ScalarField2D& f,
                     const std::string& name, double t) {
  const Grid2D& g = f.grid();
  os << "# field=" << name << " nx=" << g.nx() << " ny=" << g.ny()
     << " lx=" << fmt17(g.lx()) << " ly=" << fmt17(g.ly()) << " t=" << fmt17(t)
     << "\n";
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (i) os << ',';
      os << fmt17(f(i, j));
    }
    os << '\n';
  }
}

namespace {

std::string header_value(const std::string& header, const std::string& key) {
  const std::string token = key + "=";
  auto pos = header.find(token);
  if (pos == std::string::npos)
    throw std::runtime_error("field csv: missing header key '" + key + "'");
  pos += token.size();
  auto end = header.find(' ', pos);
  return header.substr(pos, end == std::string::npos ? end : end - pos);
}

}  // namespace

FieldRecord read_field_csv(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# field=", 0) != 0)
    throw std::runtime_error("field csv: malformed header");

  const std::string name = header_value(header, "field");
  const int nx = std::stoi(header_value(header, "nx"));
  const int ny = std::stoi(header_value(header, "ny"));
  const double lx = std::stod(header_value(header, "lx"));
  const double ly = std::stod(header_value(header, "ly"));
  const double t = std::stod(header_value(header, "t"));

  FieldRecord rec{name, t, ScalarField2D(make_grid(nx, ny, lx, ly))};
  std::string line;
  for (int j = 0; j < ny; ++j) {
    if (!std::getline(is, line))
      throw std::runtime_error("field csv: truncated at row " +
                               std::to_string(j));
    std::istringstream row(line);
    std::string cell;
    for (int i = 0; i < nx; ++i) {
      if (!std::getline(row, cell, ','))
        throw std::runtime_error("field csv: short row " + std::to_string(j));
      rec.field(i, j) = std::stod(cell);
    }
  }
  return rec;
}

}  // namespace wellpose
