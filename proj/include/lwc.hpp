#pragma once

#include "lwc/assignment.hpp"
#include "lwc/branching.hpp"
#include "lwc/canonical.hpp"
#include "lwc/error.hpp"
#include "lwc/fenwick.hpp"
#include "lwc/fringe.hpp"
#include "lwc/generators.hpp"
#include "lwc/graph.hpp"
#include "lwc/io.hpp"
#include "lwc/ising.hpp"
#include "lwc/local.hpp"
#include "lwc/measure.hpp"
#include "lwc/pagerank.hpp"
#include "lwc/parallel.hpp"
#include "lwc/random.hpp"
#include "lwc/spectral.hpp"
#include "lwc/stats.hpp"
