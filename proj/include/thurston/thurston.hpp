#pragma once

#include "thurston/errors.hpp"
#include "thurston/rational.hpp"
#include "thurston/matrix.hpp"
#include "thurston/atoms.hpp"
#include "thurston/expr.hpp"
#include "thurston/parser.hpp"
#include "thurston/geometry.hpp"
#include "thurston/families.hpp"
#include "thurston/oracle.hpp"
