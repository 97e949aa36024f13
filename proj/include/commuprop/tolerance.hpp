// tolerance.hpp — Global relative tolerance used by the commutativity checks.
#pragma once

namespace commuprop {

// Default relative tolerance (1e-9). The environment variable COMMUPROP_TOL,
// when set to a positive number, overrides it. Read on every call so the
// override can be applied per process without re-linking.
double default_rel_tol();

}  // namespace commuprop
