#pragma once

#include "fpcontrol/errors.hpp"
#include "fpcontrol/stats/special.hpp"
#include "fpcontrol/stats/rng.hpp"
#include "fpcontrol/stats/tests.hpp"
#include "fpcontrol/error_rates.hpp"
#include "fpcontrol/studentized_range.hpp"
#include "fpcontrol/adjust.hpp"
#include "fpcontrol/scenario.hpp"
#include "fpcontrol/shrinkage.hpp"
#include "fpcontrol/simlab.hpp"
#include "fpcontrol/io/table.hpp"
#include "fpcontrol/io/svg.hpp"
