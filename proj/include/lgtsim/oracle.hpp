#pragma once

#include "oracle/ahm.hpp"
#include "oracle/chain.hpp"
#include "oracle/krylov.hpp"
#include "oracle/operators.hpp"
