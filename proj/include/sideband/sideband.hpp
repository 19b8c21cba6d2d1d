#pragma once

// Umbrella header.

#include "sideband/atomic.hpp"
#include "sideband/closed_form.hpp"
#include "sideband/config_io.hpp"
#include "sideband/constants.hpp"
#include "sideband/errors.hpp"
#include "sideband/fspec.hpp"
#include "sideband/lindblad.hpp"
#include "sideband/linearization.hpp"
#include "sideband/model.hpp"
#include "sideband/ode.hpp"
#include "sideband/rate_dynamics.hpp"
#include "sideband/sweep.hpp"
