#pragma once
// Umbrella include for the whole library.

#include "releap/agent.hpp"
#include "releap/cohort.hpp"
#include "releap/cox.hpp"
#include "releap/csv.hpp"
#include "releap/design.hpp"
#include "releap/errors.hpp"
#include "releap/harness.hpp"
#include "releap/ledger.hpp"
#include "releap/logistic.hpp"
#include "releap/loop.hpp"
#include "releap/metrics.hpp"
#include "releap/policy.hpp"
#include "releap/rng.hpp"
#include "releap/special.hpp"
#include "releap/strategies.hpp"
#include "releap/svg.hpp"
