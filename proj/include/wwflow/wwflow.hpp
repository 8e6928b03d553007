#pragma once

#include "wwflow/classical.hpp"
#include "wwflow/currents.hpp"
#include "wwflow/ensembles.hpp"
#include "wwflow/errors.hpp"
#include "wwflow/fieldmap.hpp"
#include "wwflow/grid.hpp"
#include "wwflow/hamiltonian.hpp"
#include "wwflow/jet.hpp"
#include "wwflow/specfun.hpp"
#include "wwflow/validation.hpp"
