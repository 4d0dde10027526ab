#pragma once

#include "pairstat/asymptotics.hpp"
#include "pairstat/commands.hpp"
#include "pairstat/errors.hpp"
#include "pairstat/exact.hpp"
#include "pairstat/faddeeva.hpp"
#include "pairstat/grid.hpp"
#include "pairstat/io.hpp"
#include "pairstat/pair.hpp"
#include "pairstat/propagator.hpp"
#include "pairstat/quadrature.hpp"
#include "pairstat/regions.hpp"
#include "pairstat/scenario.hpp"
#include "pairstat/wavefunction.hpp"
