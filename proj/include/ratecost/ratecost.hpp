#pragma once

#include "ratecost/birthdeath.hpp"
#include "ratecost/bounds.hpp"
#include "ratecost/errors.hpp"
#include "ratecost/loop.hpp"
#include "ratecost/parallel.hpp"
#include "ratecost/quadrature.hpp"
#include "ratecost/random.hpp"
#include "ratecost/sde.hpp"
#include "ratecost/stats.hpp"
#include "ratecost/trajectory.hpp"
