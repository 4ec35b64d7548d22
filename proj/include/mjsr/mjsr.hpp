#pragma once

#include "mjsr/config.hpp"
#include "mjsr/enumeration.hpp"
#include "mjsr/error.hpp"
#include "mjsr/hourglass.hpp"
#include "mjsr/matrix.hpp"
#include "mjsr/matrix_set.hpp"
#include "mjsr/problem_file.hpp"
#include "mjsr/radii.hpp"
#include "mjsr/stability.hpp"
