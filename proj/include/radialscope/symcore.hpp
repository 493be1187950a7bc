#pragma once

#include "radialscope/errors.hpp"
#include "radialscope/symcore/calculus.hpp"
#include "radialscope/symcore/chart.hpp"
#include "radialscope/symcore/compile.hpp"
#include "radialscope/symcore/expr.hpp"
#include "radialscope/symcore/functions.hpp"
#include "radialscope/symcore/parse.hpp"
#include "radialscope/symcore/sampling.hpp"
