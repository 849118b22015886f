#pragma once

#include "lace/core.hpp"
#include "lace/dsl.hpp"
#include "lace/equiv_rel.hpp"
#include "lace/gadgets.hpp"
#include "lace/io.hpp"
#include "lace/metrics.hpp"
#include "lace/query.hpp"
#include "lace/semantics.hpp"
#include "lace/similarity.hpp"
#include "lace/solver.hpp"
