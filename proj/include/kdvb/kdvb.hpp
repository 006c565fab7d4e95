#pragma once

// Everything in the numerical library; the lab/ headers are separate.

#include "kdvb/band_matrix.hpp"
#include "kdvb/carleman.hpp"
#include "kdvb/control.hpp"
#include "kdvb/errors.hpp"
#include "kdvb/evolution.hpp"
#include "kdvb/grid.hpp"
#include "kdvb/jet.hpp"
#include "kdvb/observability.hpp"
#include "kdvb/operator.hpp"
#include "kdvb/oracles.hpp"
#include "kdvb/parallel.hpp"
#include "kdvb/rng.hpp"
#include "kdvb/sobolev.hpp"
#include "kdvb/weight_psi.hpp"
