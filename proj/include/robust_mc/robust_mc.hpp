#pragma once

#include "robust_mc/errors.hpp"
#include "robust_mc/matcore.hpp"
#include "robust_mc/rng.hpp"
#include "robust_mc/model.hpp"
#include "robust_mc/init.hpp"
#include "robust_mc/metrics.hpp"
#include "robust_mc/solver.hpp"
#include "robust_mc/synth.hpp"
#include "robust_mc/bench.hpp"
