#pragma once

#include "radialscope/threshold/operator.hpp"
#include "radialscope/threshold/thresholds.hpp"
