#pragma once

#include "radialscope/commutant/cutoffs.hpp"
#include "radialscope/commutant/symbols.hpp"
