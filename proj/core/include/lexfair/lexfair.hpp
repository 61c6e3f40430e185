#pragma once

#include "lexfair/axioms.hpp"
#include "lexfair/efficiency.hpp"
#include "lexfair/existence.hpp"
#include "lexfair/experiments.hpp"
#include "lexfair/fairness.hpp"
#include "lexfair/matching.hpp"
#include "lexfair/mechanisms.hpp"
#include "lexfair/model.hpp"
#include "lexfair/reductions.hpp"
