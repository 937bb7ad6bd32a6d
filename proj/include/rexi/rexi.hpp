#pragma once

#include "rexi/gauss_kernel.hpp"
#include "rexi/rational_fit.hpp"
#include "rexi/coeff_io.hpp"
#include "rexi/rexi_terms.hpp"
#include "rexi/matrix_eval.hpp"
#include "rexi/test_operators.hpp"
#include "rexi/lrsw/state.hpp"
#include "rexi/lrsw/operator.hpp"
#include "rexi/lrsw/scenario.hpp"
#include "rexi/lrsw/stepper.hpp"
