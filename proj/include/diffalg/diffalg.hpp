#ifndef DIFFALG_DIFFALG_HPP
#define DIFFALG_DIFFALG_HPP

#include "algebra.hpp"
#include "budget.hpp"
#include "cochain.hpp"
#include "cohomology.hpp"
#include "deformations.hpp"
#include "errors.hpp"
#include "extensions.hpp"
#include "io.hpp"
#include "matrix.hpp"
#include "prime_field.hpp"
#include "rational.hpp"

#endif
