#pragma once

#include "tvmoo/core.hpp"
#include "tvmoo/engine.hpp"
#include "tvmoo/lemma1_suite.hpp"
#include "tvmoo/metrics.hpp"
#include "tvmoo/objective.hpp"
#include "tvmoo/oracles.hpp"
#include "tvmoo/prox_terms.hpp"
#include "tvmoo/quadratic.hpp"
#include "tvmoo/scenario.hpp"
