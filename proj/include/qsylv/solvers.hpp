#pragma once

#include "qsylv/solvers/basic.hpp"
#include "qsylv/solvers/common.hpp"
#include "qsylv/solvers/five_term.hpp"
#include "qsylv/solvers/master.hpp"
#include "qsylv/solvers/mixed.hpp"
#include "qsylv/solvers/three_term.hpp"
