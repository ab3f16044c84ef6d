#pragma once

// Umbrella header for the f-deformed Poschl-Teller oscillator library.

#include "mpt/numerics.hpp"
#include "mpt/spectrum.hpp"
#include "mpt/operators.hpp"
#include "mpt/states.hpp"
#include "mpt/statistics.hpp"
#include "mpt/measure.hpp"
