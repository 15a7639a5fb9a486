#include "pdde/numeric.hpp"

#include "pdde/errors.hpp"

namespace pdde {

namespace {
unsigned g_precision_bits = 256;
}

unsigned set_precision_bits(unsigned bits) {
  if (bits < 53) bits = 53;
  g_precision_bits = bits;
  // log10(2) = 0.30102999...; round down so the mpfr mantissa always covers
  // the advertised decimal digits.
  auto digits = static_cast<unsigned>(bits * 0.3010299956639812);
  if (digits < 15) digits = 15;
  BigFloat::default_precision(digits);
  return digits;
}

unsigned precision_bits() { return g_precision_bits; }

BigFloat to_bigfloat(const Rational& q) {
  return BigFloat(numerator(q)) / BigFloat(denominator(q));
}

Rational rational_pow(Rational base, long e) {
  if (e < 0) {
    if (base == 0) throw ZeroDenominator("rational_pow: zero base, negative exponent");
    base = Rational(denominator(base), numerator(base));
    e = -e;
  }
  Rational out(1);
  while (e > 0) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

}  // namespace pdde
