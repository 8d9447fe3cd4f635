#pragma once

#include "types.hpp"
#include "constants.hpp"
#include "gauss_jacobi.hpp"
#include "parallel.hpp"
#include "vector_bessel.hpp"
#include "closed_forms.hpp"
#include "radial_recursion.hpp"
#include "haar_oracle.hpp"
#include "verification.hpp"
