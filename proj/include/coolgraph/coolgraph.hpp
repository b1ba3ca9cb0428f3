#pragma once

#include "coolgraph/constants.hpp"
#include "coolgraph/cycling.hpp"
#include "coolgraph/errors.hpp"
#include "coolgraph/exomol.hpp"
#include "coolgraph/level_graph.hpp"
#include "coolgraph/rate_model.hpp"
#include "coolgraph/report.hpp"
#include "coolgraph/scheme.hpp"
#include "coolgraph/search.hpp"
#include "coolgraph/snapshot.hpp"
