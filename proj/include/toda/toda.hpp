#pragma once

#include "toda/spectrum.hpp"
#include "toda/closed_forms.hpp"
#include "toda/system.hpp"
#include "toda/ode_engine.hpp"
#include "toda/analysis.hpp"
