#pragma once

#include "errors.hpp"
#include "metric.hpp"
#include "curve.hpp"
#include "quadrature.hpp"
#include "assumptions.hpp"
#include "scheme.hpp"
#include "exact.hpp"
#include "evolve.hpp"
#include "harness.hpp"
