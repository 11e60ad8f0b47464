#pragma once

// Umbrella header.

#include "pcpmkit/diagnostics.hpp"
#include "pcpmkit/errors.hpp"
#include "pcpmkit/generators.hpp"
#include "pcpmkit/io.hpp"
#include "pcpmkit/jacobi.hpp"
#include "pcpmkit/oracle.hpp"
#include "pcpmkit/problem.hpp"
#include "pcpmkit/prox.hpp"
#include "pcpmkit/solvers.hpp"
#include "pcpmkit/stepsize.hpp"
