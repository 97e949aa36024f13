// tolerance.cpp — global relative tolerance with environment override.
#include "commuprop/tolerance.hpp"

#include <cstdlib>

namespace commuprop {

double default_rel_tol() {
  if (const char* env = std::getenv("COMMUPROP_TOL")) {
    char* end = nullptr;
    const double v = std::strtod(env, &end);
    if (end != env && v > 0.0) return v;
  }
  return 1e-9;
}

}  // namespace commuprop
