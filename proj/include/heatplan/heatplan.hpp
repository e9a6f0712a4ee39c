// heatplan.hpp — convenience include for the whole library.

#pragma once

#include "heatplan/analysis.hpp"
#include "heatplan/io.hpp"
#include "heatplan/knapsack.hpp"
#include "heatplan/lp_export.hpp"
#include "heatplan/model.hpp"
#include "heatplan/solve.hpp"
#include "heatplan/uncertainty.hpp"
