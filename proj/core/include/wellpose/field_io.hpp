#pragma once

#include <iosfwd>
#include <string>

#include "wellpose/field.hpp"

namespace wellpose {

/// Formats a double with 17 significant digits (round-trips exactly).
std::string fmt17(double v);

/// CSV layout: header line
///   # field=<name> nx=<nx> ny=<ny> lx=<lx> ly=<ly> t=<time>
/// then one comma-separated row per y node, columns are x nodes.
void write_field_csv(std::ostream& os, const ScalarField2D& f,
                     const std::string& name, double t);

struct FieldRecord {
  std::string name;
  double t = 0.0;
  ScalarField2D field;
};

/// Parses the format written by write_field_csv. Throws std::runtime_error
/// on malformed input.
FieldRecord read_field_csv(std::istream& is);

}  // namespace wellpose
