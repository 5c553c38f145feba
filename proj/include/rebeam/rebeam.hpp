/**
 * @file rebeam.hpp
 * @brief Umbrella header for the rebeam library.
 */

#pragma once

#include "rebeam/common.hpp"
#include "rebeam/core.hpp"
#include "rebeam/cvrp.hpp"
#include "rebeam/decode.hpp"
#include "rebeam/features.hpp"
#include "rebeam/generate.hpp"
#include "rebeam/harness.hpp"
#include "rebeam/io.hpp"
#include "rebeam/jssp.hpp"
#include "rebeam/optim.hpp"
#include "rebeam/oracles.hpp"
#include "rebeam/policy.hpp"
#include "rebeam/sbs.hpp"
#include "rebeam/sil.hpp"
#include "rebeam/synthetic.hpp"
#include "rebeam/tree.hpp"
#include "rebeam/tsp.hpp"
