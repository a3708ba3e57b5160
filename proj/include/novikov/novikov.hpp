#pragma once

#include "novikov/chains.hpp"
#include "novikov/groups.hpp"
#include "novikov/hochschild.hpp"
#include "novikov/orbits.hpp"
#include "novikov/rational.hpp"
#include "novikov/regmat.hpp"
#include "novikov/series.hpp"
#include "novikov/genus2.hpp"
#include "novikov/io.hpp"
