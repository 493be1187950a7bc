#pragma once

#include "radialscope/probe/distribution.hpp"
#include "radialscope/probe/experiment.hpp"
#include "radialscope/probe/spectrum.hpp"
