#pragma once

#include "mixnorm/core/error.hpp"
#include "mixnorm/grid.hpp"
#include "mixnorm/tensor_grid.hpp"
#include "mixnorm/profiles.hpp"
#include "mixnorm/differences.hpp"
#include "mixnorm/fft.hpp"
#include "mixnorm/fourier.hpp"
#include "mixnorm/sobolev.hpp"
#include "mixnorm/spaces.hpp"
#include "mixnorm/multipliers.hpp"
#include "mixnorm/random_family.hpp"
#include "mixnorm/counterexamples.hpp"
