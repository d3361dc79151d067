#pragma once

#include <string>
#include <vector>

namespace wellpose::cli {

struct CheckOutcome {
  std::string name;
  bool pass;
  std::string detail;  // empty on pass
};

/// Runs the built-in invariant suite on small grids; one outcome per
/// operation family. Cheap enough for an interactive sanity check.
std::vector<CheckOutcome> run_self_checks();

}  // namespace wellpose::cli
