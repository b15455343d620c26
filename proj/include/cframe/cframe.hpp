#pragma once

#include "cframe/error.hpp"
#include "cframe/fixtures.hpp"
#include "cframe/measure.hpp"
#include "cframe/numeric.hpp"
#include "cframe/solvers.hpp"
#include "cframe/stiefel.hpp"
