#pragma once

#include "iia/algebra/division.hpp"
#include "iia/algebra/gaussian_rational.hpp"
#include "iia/algebra/groebner.hpp"
#include "iia/algebra/linear_solve.hpp"
#include "iia/algebra/matrix.hpp"
#include "iia/algebra/monomial.hpp"
#include "iia/algebra/polynomial.hpp"
#include "iia/algebra/prime_field.hpp"
