#pragma once

// Umbrella header: exact PIR capacity, minimum message size, and scheme
// verification under arbitrary collusion patterns.

#include "pircap/construct.hpp"
#include "pircap/errors.hpp"
#include "pircap/family.hpp"
#include "pircap/json_io.hpp"
#include "pircap/lp.hpp"
#include "pircap/pattern.hpp"
#include "pircap/rational.hpp"
#include "pircap/scheme.hpp"
#include "pircap/verify.hpp"
