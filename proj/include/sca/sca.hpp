#pragma once

#include "sca/annealing.hpp"
#include "sca/dynamics.hpp"
#include "sca/errors.hpp"
#include "sca/exactlab.hpp"
#include "sca/io.hpp"
#include "sca/model.hpp"
#include "sca/numeric.hpp"
#include "sca/pinning.hpp"
#include "sca/rng.hpp"
