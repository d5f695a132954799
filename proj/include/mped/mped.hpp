#pragma once

#include "mped/errors.hpp"
#include "mped/graph.hpp"
#include "mped/graphgen.hpp"
#include "mped/harness.hpp"
#include "mped/mec.hpp"
#include "mped/meek.hpp"
#include "mped/objectives.hpp"
#include "mped/optimize.hpp"
#include "mped/random.hpp"
#include "mped/sem.hpp"
#include "mped/sepsys.hpp"
#include "mped/stats.hpp"
