#pragma once

#include "memkernel/errors.hpp"
#include "memkernel/params.hpp"
#include "memkernel/special_functions.hpp"
#include "memkernel/quadrature.hpp"
#include "memkernel/kernel.hpp"
#include "memkernel/theta_green.hpp"
#include "memkernel/grid.hpp"
#include "memkernel/parallel.hpp"
#include "memkernel/ibvp_solver.hpp"
#include "memkernel/esjj.hpp"
#include "memkernel/fd_oracle.hpp"
