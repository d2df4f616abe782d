#pragma once

// Umbrella header for the numerical library. The command-line layer lives in
// msgkit/cli.hpp and is not pulled in here: it needs the CLI11 single header
// on the include path, which library consumers should not have to provide.
#include "msgkit/analysis.hpp"
#include "msgkit/dynamics.hpp"
#include "msgkit/errors.hpp"
#include "msgkit/expansion.hpp"
#include "msgkit/fixed_points.hpp"
#include "msgkit/model.hpp"
#include "msgkit/numerics.hpp"
#include "msgkit/static_solver.hpp"
