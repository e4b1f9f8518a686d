#ifndef RICCATI_RICCATI_HPP
#define RICCATI_RICCATI_HPP

#include "riccati/certify.hpp"
#include "riccati/error.hpp"
#include "riccati/integrate.hpp"
#include "riccati/lemmas.hpp"
#include "riccati/matrix.hpp"
#include "riccati/ode.hpp"
#include "riccati/problem.hpp"
#include "riccati/timefn.hpp"

#endif  // RICCATI_RICCATI_HPP
