#pragma once

// Budget online multi-kernel learning: sparse passive-aggressive per-kernel
// updates with Hedge-weighted combination, the compared online baselines,
// and a seeded benchmark harness.

#include "bomkl/bench.hpp"
#include "bomkl/classifier.hpp"
#include "bomkl/config.hpp"
#include "bomkl/dataset.hpp"
#include "bomkl/kernels.hpp"
#include "bomkl/learners.hpp"
#include "bomkl/multi_kernel.hpp"
#include "bomkl/prng.hpp"
#include "bomkl/snapshot.hpp"
#include "bomkl/sparse_vector.hpp"
