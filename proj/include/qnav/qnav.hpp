#pragma once

#include "qnav/correlations.hpp"
#include "qnav/curvature_solver.hpp"
#include "qnav/curved_geometry.hpp"
#include "qnav/errors.hpp"
#include "qnav/parallel.hpp"
#include "qnav/planar_walk.hpp"
#include "qnav/quadrature.hpp"
#include "qnav/random.hpp"
#include "qnav/roots.hpp"
#include "qnav/verify.hpp"
