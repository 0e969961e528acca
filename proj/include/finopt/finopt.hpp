#pragma once

#include "finopt/analytic.hpp"
#include "finopt/errors.hpp"
#include "finopt/golden_section.hpp"
#include "finopt/io.hpp"
#include "finopt/mesh.hpp"
#include "finopt/optimizer.hpp"
#include "finopt/problem.hpp"
#include "finopt/sensitivity.hpp"
#include "finopt/solver.hpp"
#include "finopt/tridiagonal.hpp"
