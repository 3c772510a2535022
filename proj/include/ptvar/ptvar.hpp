#pragma once

#include "ptvar/bandwidth.hpp"
#include "ptvar/error.hpp"
#include "ptvar/estimator.hpp"
#include "ptvar/fbm.hpp"
#include "ptvar/kernels.hpp"
#include "ptvar/parallel.hpp"
#include "ptvar/period.hpp"
#include "ptvar/process.hpp"
#include "ptvar/rng.hpp"
#include "ptvar/series.hpp"
#include "ptvar/stats.hpp"
#include "ptvar/test_functions.hpp"
