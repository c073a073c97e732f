#pragma once

#include "sbm/core.hpp"
#include "sbm/error.hpp"
#include "sbm/graph_io.hpp"
#include "sbm/harness.hpp"
#include "sbm/linalg.hpp"
#include "sbm/ml.hpp"
#include "sbm/rng.hpp"
#include "sbm/sdp.hpp"
#include "sbm/tail.hpp"
#include "sbm/two_phase.hpp"
