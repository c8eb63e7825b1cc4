#pragma once

#include "qkr/bessel.hpp"
#include "qkr/classical.hpp"
#include "qkr/config.hpp"
#include "qkr/ergostats.hpp"
#include "qkr/experiments.hpp"
#include "qkr/fft.hpp"
#include "qkr/floquet.hpp"
#include "qkr/io.hpp"
#include "qkr/observables.hpp"
#include "qkr/phase_space.hpp"
#include "qkr/rng.hpp"
