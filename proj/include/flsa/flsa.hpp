#pragma once

#include "flsa/io.hpp"
#include "flsa/maxflow.hpp"
#include "flsa/oracle.hpp"
#include "flsa/path_1d.hpp"
#include "flsa/path_general.hpp"
#include "flsa/path_store.hpp"
#include "flsa/path_tree.hpp"
#include "flsa/penalty_graph.hpp"
#include "flsa/simulate.hpp"
#include "flsa/soft_threshold.hpp"
