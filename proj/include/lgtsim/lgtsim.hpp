#pragma once

#include "circuits.hpp"
#include "config.hpp"
#include "core.hpp"
#include "gates.hpp"
#include "groups.hpp"
#include "lattice.hpp"
#include "observables.hpp"
#include "oracle.hpp"
#include "register.hpp"
#include "resources.hpp"
#include "stateprep.hpp"
#include "experiments.hpp"
