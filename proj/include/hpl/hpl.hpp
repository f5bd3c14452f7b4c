#pragma once

// Umbrella header for the harmonic-process laboratory.

#include "hpl/asymptotics.hpp"
#include "hpl/bessel.hpp"
#include "hpl/config.hpp"
#include "hpl/covariance.hpp"
#include "hpl/errors.hpp"
#include "hpl/estimator.hpp"
#include "hpl/fft.hpp"
#include "hpl/harness.hpp"
#include "hpl/hermite.hpp"
#include "hpl/io.hpp"
#include "hpl/lm.hpp"
#include "hpl/mvn.hpp"
#include "hpl/path.hpp"
#include "hpl/pathgen.hpp"
#include "hpl/pool.hpp"
#include "hpl/rng.hpp"
#include "hpl/spectral.hpp"
#include "hpl/stats.hpp"
#include "hpl/trig.hpp"
