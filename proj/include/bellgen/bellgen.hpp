#pragma once

#include "bellgen/angles.hpp"
#include "bellgen/errors.hpp"
#include "bellgen/model.hpp"
#include "bellgen/randtests.hpp"
#include "bellgen/rng.hpp"
#include "bellgen/sampler.hpp"
#include "bellgen/session.hpp"
#include "bellgen/special.hpp"
#include "bellgen/stats.hpp"
#include "bellgen/version.hpp"
#include "bellgen/wire.hpp"
