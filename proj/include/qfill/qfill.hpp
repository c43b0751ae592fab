#pragma once

// Umbrella header.

#include "qfill/core.hpp"
#include "qfill/states.hpp"
#include "qfill/damping.hpp"
#include "qfill/measures.hpp"
#include "qfill/convex_roof.hpp"
#include "qfill/witness_plan.hpp"
#include "qfill/experiments.hpp"
