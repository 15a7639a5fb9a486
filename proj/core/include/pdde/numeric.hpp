#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace pdde {

using Integer = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Arbitrary precision float with runtime-selected precision.  Values pick up
// the precision that is current when they are constructed, so call
// set_precision_bits once at startup before building any BigFloat.
using BigFloat = boost::multiprecision::mpfr_float;

// Sets the working precision for BigFloat values created afterwards and
// returns the corresponding decimal digit count.
unsigned set_precision_bits(unsigned bits);
unsigned precision_bits();

BigFloat to_bigfloat(const Rational& q);

// base^e for integer e of either sign.
Rational rational_pow(Rational base, long e);

}  // namespace pdde
