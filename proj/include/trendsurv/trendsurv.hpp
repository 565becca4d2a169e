#pragma once

// Umbrella header for the whole toolkit.

#include "trendsurv/date.hpp"
#include "trendsurv/error.hpp"
#include "trendsurv/ingest.hpp"
#include "trendsurv/report.hpp"
#include "trendsurv/rng.hpp"
#include "trendsurv/series.hpp"
#include "trendsurv/stats.hpp"
#include "trendsurv/surveillance.hpp"
#include "trendsurv/synth.hpp"
#include "trendsurv/tdist.hpp"
