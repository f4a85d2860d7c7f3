#pragma once

// Umbrella header: lattice geometry, shell functionals, and the verification
// tool kit.

#include "deephole/functional.hpp"
#include "deephole/lattice.hpp"
#include "deephole/report_io.hpp"
#include "deephole/verify.hpp"
