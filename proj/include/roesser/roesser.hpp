#pragma once

// Roesser-model state-space realizations of convolutional layers.

#include "roesser/analysis.hpp"
#include "roesser/convolution.hpp"
#include "roesser/errors.hpp"
#include "roesser/io.hpp"
#include "roesser/random.hpp"
#include "roesser/realization.hpp"
#include "roesser/simulator.hpp"
#include "roesser/tensor.hpp"
