#pragma once

#include "bteb/bayes_rule.hpp"
#include "bteb/bt_dist.hpp"
#include "bteb/eb_estimator.hpp"
#include "bteb/errors.hpp"
#include "bteb/monotonizer.hpp"
#include "bteb/numerics.hpp"
#include "bteb/prior.hpp"
#include "bteb/quadrature.hpp"
#include "bteb/risk_engine.hpp"
#include "bteb/rng.hpp"
