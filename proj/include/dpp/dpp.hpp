#pragma once

// Umbrella header for the whole library.

#include "dpp/acceptance.hpp"
#include "dpp/configuration.hpp"
#include "dpp/defaults.hpp"
#include "dpp/discretize.hpp"
#include "dpp/dynamics.hpp"
#include "dpp/errors.hpp"
#include "dpp/estimate.hpp"
#include "dpp/functionals.hpp"
#include "dpp/io.hpp"
#include "dpp/kernel.hpp"
#include "dpp/logderiv.hpp"
#include "dpp/palm.hpp"
#include "dpp/parallel.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/rng.hpp"
#include "dpp/sampler.hpp"
#include "dpp/special.hpp"
#include "dpp/window.hpp"
