#pragma once

#include "ialm/bench.hpp"
#include "ialm/core.hpp"
#include "ialm/csv.hpp"
#include "ialm/generate.hpp"
#include "ialm/inner_loop.hpp"
#include "ialm/lasso.hpp"
#include "ialm/outer_loop.hpp"
#include "ialm/reference.hpp"
