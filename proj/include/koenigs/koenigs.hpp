#pragma once

// Everything except the experiment runner, which pulls in nlohmann/json.
#include "koenigs/catalog.hpp"
#include "koenigs/conditions.hpp"
#include "koenigs/engine.hpp"
#include "koenigs/error.hpp"
#include "koenigs/expr.hpp"
#include "koenigs/grid.hpp"
#include "koenigs/jet.hpp"
#include "koenigs/norms.hpp"
#include "koenigs/validate.hpp"
