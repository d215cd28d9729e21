#pragma once

#include "carleson/sampling.hpp"

namespace carleson::testing {

using carleson::Rng;
using carleson::random_interval;
using carleson::random_member;
using carleson::random_poly;
using carleson::random_tile;
using carleson::uniform;
using carleson::uniform_int;

}  // namespace carleson::testing
