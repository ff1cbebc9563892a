#pragma once

#include "zyg/affine_fit.hpp"
#include "zyg/ball_builder.hpp"
#include "zyg/cover_certifier.hpp"
#include "zyg/dyadic_measure.hpp"
#include "zyg/errors.hpp"
#include "zyg/function_catalog.hpp"
#include "zyg/geometry.hpp"
#include "zyg/graph_index.hpp"
#include "zyg/linear_program.hpp"
#include "zyg/regularity.hpp"
