#pragma once

#include "geoeq/errors.hpp"
#include "geoeq/numerics.hpp"
#include "geoeq/model_core.hpp"
#include "geoeq/welfare.hpp"
#include "geoeq/dispersion.hpp"
#include "geoeq/thresholds.hpp"
#include "geoeq/equilibria.hpp"
#include "geoeq/sweep.hpp"
