#pragma once

#include "staticprop/absorption.hpp"
#include "staticprop/block_system.hpp"
#include "staticprop/config.hpp"
#include "staticprop/csv.hpp"
#include "staticprop/errors.hpp"
#include "staticprop/model.hpp"
#include "staticprop/numerics.hpp"
#include "staticprop/propagators.hpp"
#include "staticprop/runner.hpp"
#include "staticprop/wick.hpp"
