#pragma once

#include "cegta/analysis.hpp"
#include "cegta/compliance.hpp"
#include "cegta/explore.hpp"
#include "cegta/game.hpp"
#include "cegta/inner_loop.hpp"
#include "cegta/local_search.hpp"
#include "cegta/reduction.hpp"
#include "cegta/regret.hpp"
#include "cegta/replicator.hpp"
#include "cegta/scheduler.hpp"
#include "cegta/subgame.hpp"
#include "cegta/ibr/oracle.hpp"
