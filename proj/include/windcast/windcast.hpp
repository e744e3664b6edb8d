#pragma once

#include "windcast/ann.hpp"
#include "windcast/dataset.hpp"
#include "windcast/error.hpp"
#include "windcast/harness.hpp"
#include "windcast/metrics.hpp"
#include "windcast/regression.hpp"
#include "windcast/stats.hpp"
