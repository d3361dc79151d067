#pragma once

namespace wellpose::detail {

[[noreturn]] void contract_failure(const char* expr, const char* file, int line);

}  // namespace wellpose::detail

// Programmer-error contract (e.g. fields on mismatched grids). Stays active in
// all build types; violations abort rather than throw.
#define WP_CONTRACT(expr) \
  ((expr) ? (void)0 : ::wellpose::detail::contract_failure(#expr, __FILE__, __LINE__))
