#pragma once

#include "thermo/circle.hpp"
#include "thermo/csv.hpp"
#include "thermo/cylinders.hpp"
#include "thermo/dynamics.hpp"
#include "thermo/error.hpp"
#include "thermo/measure.hpp"
#include "thermo/orbit.hpp"
#include "thermo/parallel.hpp"
#include "thermo/potential.hpp"
#include "thermo/recurrence.hpp"
#include "thermo/rng.hpp"
#include "thermo/stats.hpp"
#include "thermo/transfer.hpp"
#include "thermo/validator.hpp"
