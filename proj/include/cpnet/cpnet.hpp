#pragma once

#include "cpnet/errors.hpp"
#include "cpnet/csv.hpp"
#include "cpnet/ingest.hpp"
#include "cpnet/corr.hpp"
#include "cpnet/graph.hpp"
#include "cpnet/planarity.hpp"
#include "cpnet/pmfg.hpp"
#include "cpnet/centrality.hpp"
#include "cpnet/coreperiphery.hpp"
#include "cpnet/portfolio.hpp"
#include "cpnet/parallel.hpp"
#include "cpnet/seeding.hpp"
#include "cpnet/backtest.hpp"
