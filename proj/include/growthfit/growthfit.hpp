#pragma once

#include "growthfit/csv.hpp"
#include "growthfit/divergence.hpp"
#include "growthfit/errors.hpp"
#include "growthfit/format.hpp"
#include "growthfit/hypotheses.hpp"
#include "growthfit/linear_fit.hpp"
#include "growthfit/piecewise.hpp"
#include "growthfit/report.hpp"
#include "growthfit/stagnation.hpp"
#include "growthfit/svg_plot.hpp"
#include "growthfit/time_series.hpp"
