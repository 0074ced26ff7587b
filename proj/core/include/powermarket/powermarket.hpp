#pragma once

#include "powermarket/config.hpp"
#include "powermarket/csv.hpp"
#include "powermarket/curves.hpp"
#include "powermarket/engine.hpp"
#include "powermarket/experiment.hpp"
#include "powermarket/external.hpp"
#include "powermarket/population.hpp"
#include "powermarket/rng.hpp"
#include "powermarket/stats.hpp"
