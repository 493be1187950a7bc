#pragma once

#include "radialscope/geometry/blowup.hpp"
#include "radialscope/geometry/conic.hpp"
#include "radialscope/geometry/normal_form.hpp"
