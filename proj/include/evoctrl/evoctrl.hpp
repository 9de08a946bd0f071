#pragma once

#include "evoctrl/enumeration.hpp"
#include "evoctrl/evaluation.hpp"
#include "evoctrl/policy.hpp"
#include "evoctrl/probability.hpp"
#include "evoctrl/problem.hpp"
#include "evoctrl/qlearning.hpp"
#include "evoctrl/simulator.hpp"
#include "evoctrl/solver.hpp"
