#pragma once

// Umbrella header for the MIDAL speckle denoising library.

#include "midal/benchmark.hpp"
#include "midal/data_term.hpp"
#include "midal/error.hpp"
#include "midal/image.hpp"
#include "midal/io.hpp"
#include "midal/metrics.hpp"
#include "midal/phantom.hpp"
#include "midal/serialize.hpp"
#include "midal/solver.hpp"
#include "midal/speckle.hpp"
#include "midal/tv_prox.hpp"
