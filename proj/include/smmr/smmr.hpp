#pragma once

#include "smmr/coupling.hpp"
#include "smmr/harness/problem_setup.hpp"
#include "smmr/harness/sweep.hpp"
#include "smmr/inner.hpp"
#include "smmr/model.hpp"
#include "smmr/problems/advection.hpp"
#include "smmr/problems/brusselator.hpp"
#include "smmr/problems/linear.hpp"
#include "smmr/problems/lorenz96.hpp"
#include "smmr/projection.hpp"
#include "smmr/rk.hpp"
#include "smmr/scheme_io.hpp"
#include "smmr/steppers.hpp"
#include "smmr/tableau.hpp"
