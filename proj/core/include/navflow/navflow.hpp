#pragma once

#include "navflow/analysis.hpp"
#include "navflow/errors.hpp"
#include "navflow/flows.hpp"
#include "navflow/geometry.hpp"
#include "navflow/integrate.hpp"
#include "navflow/io.hpp"
#include "navflow/random.hpp"
#include "navflow/separation.hpp"
#include "navflow/svg.hpp"
#include "navflow/sweep.hpp"
#include "navflow/switched.hpp"
#include "navflow/worldgen.hpp"
