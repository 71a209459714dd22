#pragma once

// Gaussian-process reconstruction of 2D current fields from sparse buoy
// velocities, with Helmholtz-decomposed priors and calibrated divergence /
// vorticity inference.

#include "helmgp/benchmark.hpp"
#include "helmgp/dataset.hpp"
#include "helmgp/derived_kernels.hpp"
#include "helmgp/drifters.hpp"
#include "helmgp/errors.hpp"
#include "helmgp/experiment.hpp"
#include "helmgp/fd_oracle.hpp"
#include "helmgp/fields.hpp"
#include "helmgp/gp.hpp"
#include "helmgp/gram.hpp"
#include "helmgp/grid_io.hpp"
#include "helmgp/hyperopt.hpp"
#include "helmgp/matrix_kernel.hpp"
#include "helmgp/se_kernel.hpp"
