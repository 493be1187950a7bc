#pragma once

#include "radialscope/cli/config.hpp"
#include "radialscope/cli/report.hpp"
#include "radialscope/cli/run.hpp"
