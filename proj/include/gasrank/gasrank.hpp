#pragma once

#include "gasrank/config.hpp"
#include "gasrank/csv.hpp"
#include "gasrank/data_io.hpp"
#include "gasrank/diagnostics.hpp"
#include "gasrank/errors.hpp"
#include "gasrank/estimation.hpp"
#include "gasrank/filter.hpp"
#include "gasrank/forecast.hpp"
#include "gasrank/json_io.hpp"
#include "gasrank/panel.hpp"
#include "gasrank/parallel.hpp"
#include "gasrank/plackett_luce.hpp"
#include "gasrank/random.hpp"
#include "gasrank/simulate.hpp"
#include "gasrank/subplex.hpp"
#include "gasrank/version.hpp"
