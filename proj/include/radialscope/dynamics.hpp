#pragma once

#include "radialscope/dynamics/cosphere.hpp"
#include "radialscope/dynamics/flow.hpp"
