#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pdde/errors.hpp"
#include "pdde/numeric.hpp"

namespace pdde {

// Every MultiPoly lives in one fixed ring with kNumVars variable slots.
// Slot meanings are contextual; the enum below names the common assignment.
inline constexpr int kNumVars = 8;
using Exps = std::array<int16_t, kNumVars>;

enum Var : int {
  VZ = 0,   // edge / size variable
  VU = 1,   // catalytic variable (first branch value in two-branch systems)
  VX = 2,   // pattern marking variable
  VT = 3,   // unknown series value (first branch)
  VT0 = 4,  // first initial term
  VT1 = 5,  // second initial term
  VA = 6,   // second branch catalytic value, or a rescaled unknown
  VB = 7,   // second branch series value, or a rescaled unknown
};

extern const std::array<std::string, kNumVars> kDefaultVarNames;

// ---------------------------------------------------------------------------
// Sparse polynomial over the rationals in the 8 canonical slots.
// Terms are kept in strictly descending lexicographic order on the exponent
// vector (slot 0 most significant) with no zero coefficients.
// ---------------------------------------------------------------------------
class MultiPoly {
 public:
  struct Term {
    Exps e{};
    Rational c;
  };

  MultiPoly() = default;
  explicit MultiPoly(const Rational& c);
  explicit MultiPoly(long c) : MultiPoly(Rational(c)) {}

  static MultiPoly variable(int var, int exp = 1);
  static MultiPoly monomial(const Rational& c, const Exps& e);
  static MultiPoly from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  const Rational& leading_rational() const;  // coefficient of the leading term
  Rational constant_value() const;           // requires is_constant

  int degree(int var) const;
  int total_degree() const;
  bool depends_on(int var) const;

  // Coefficient of var^deg as a polynomial with the var slot zeroed.
  MultiPoly coeff_of(int var, int deg) const;
  MultiPoly leading_coeff(int var) const;

  friend MultiPoly operator+(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator-(const MultiPoly& a, const MultiPoly& b);
  friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
  MultiPoly operator-() const;
  MultiPoly& operator+=(const MultiPoly& o);
  MultiPoly& operator-=(const MultiPoly& o);
  MultiPoly& operator*=(const MultiPoly& o);
  friend bool operator==(const MultiPoly& a, const MultiPoly& b);

  MultiPoly pow(int n) const;
  MultiPoly scaled(const Rational& c) const;
  MultiPoly derivative(int var) const;

  MultiPoly substitute(int var, const MultiPoly& value) const;
  MultiPoly substitute(int var, const Rational& value) const;

  // Simultaneously moves exponents between slots: {from, to} pairs.  A move
  // onto a slot that still carries exponents of its own throws.
  MultiPoly rename(std::span<const std::pair<int, int>> moves) const;

  Exps monomial_content() const;
  MultiPoly divide_monomial(const Exps& m) const;

  // Scales to integer coefficients with content 1 and a positive leading
  // coefficient.  If scale is non-null, *scale is set so that the result
  // equals scale * original.
  MultiPoly integer_primitive(Rational* scale = nullptr) const;

  template <class V>
  V eval(const std::array<V, kNumVars>& point) const {
    V out{};
    std::array<std::vector<V>, kNumVars> pow;
    for (const Term& t : terms_) {
      V prod = convert_eval<V>(t.c);
      for (int v = 0; v < kNumVars; ++v) {
        const int e = t.e[size_t(v)];
        if (e == 0) continue;
        auto& cache = pow[size_t(v)];
        if (cache.empty()) cache.push_back(convert_eval<V>(Rational(1)));
        while (int(cache.size()) <= e) cache.push_back(cache.back() * point[size_t(v)]);
        prod *= cache[size_t(e)];
      }
      out += prod;
    }
    return out;
  }

  std::string str(std::span<const std::string> names) const;
  std::string str() const;

 private:
  template <class V>
  static V convert_eval(const Rational& q) {
    if constexpr (std::is_same_v<V, Rational>)
      return q;
    else if constexpr (std::is_same_v<V, BigFloat>)
      return to_bigfloat(q);
    else
      return V(q);
  }

  void normalize();
  std::vector<Term> terms_;
};

// ---- division and euclidean structure --------------------------------------

// Quotient of an exact division; throws NotDivisible otherwise.
MultiPoly exact_divide(const MultiPoly& f, const MultiPoly& g);
bool try_exact_divide(const MultiPoly& f, const MultiPoly& g, MultiPoly* q);
bool divides(const MultiPoly& g, const MultiPoly& f);

// lc(g, var)^(deg_var f - deg_var g + 1) * f == q * g + r, deg_var r < deg_var g.
void pseudo_divide(const MultiPoly& f, const MultiPoly& g, int var,
                   MultiPoly* q, MultiPoly* r);
MultiPoly pseudo_rem(const MultiPoly& f, const MultiPoly& g, int var);

MultiPoly content(const MultiPoly& f, int var);
MultiPoly primitive_part(const MultiPoly& f, int var);

MultiPoly gcd(const MultiPoly& f, const MultiPoly& g);

// Resultant with respect to var, subresultant polynomial remainder sequence.
MultiPoly resultant(const MultiPoly& f, const MultiPoly& g, int var);
// Same value via a fraction-free Sylvester determinant; reference path and
// fallback for small degrees.
MultiPoly resultant_sylvester(const MultiPoly& f, const MultiPoly& g, int var);

// f with repeated factors (with respect to var) collapsed to multiplicity 1,
// returned integer-primitive.
MultiPoly squarefree_part(const MultiPoly& f, int var);

// Fraction-free determinant; consumes the matrix.
MultiPoly det_bareiss(std::vector<std::vector<MultiPoly>> m);

// ---- text form --------------------------------------------------------------

// Grammar: sum of products of factors; factors are rational literals like
// 7 or -3/2, names with optional ^exponent, or parenthesized sums.
// Multiplication is explicit with '*'.
MultiPoly parse_poly(const std::string& text, std::span<const std::string> names);
MultiPoly parse_poly(const std::string& text);

// ---- rational functions ------------------------------------------------------

// num/den, reduced and normalized so that den is integer-primitive with a
// positive leading coefficient.  Equal values have equal representations.
class RationalFunction {
 public:
  RationalFunction() : num_(), den_(Rational(1)) {}
  explicit RationalFunction(MultiPoly p) : num_(std::move(p)), den_(Rational(1)) {}
  RationalFunction(MultiPoly num, MultiPoly den);

  static RationalFunction from_rational(const Rational& q) {
    return RationalFunction(MultiPoly(q));
  }
  static RationalFunction variable(int var) {
    return RationalFunction(MultiPoly::variable(var));
  }

  const MultiPoly& num() const { return num_; }
  const MultiPoly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const;

  friend RationalFunction operator+(const RationalFunction&, const RationalFunction&);
  friend RationalFunction operator-(const RationalFunction&, const RationalFunction&);
  friend RationalFunction operator*(const RationalFunction&, const RationalFunction&);
  friend RationalFunction operator/(const RationalFunction&, const RationalFunction&);
  RationalFunction operator-() const;
  friend bool operator==(const RationalFunction& a, const RationalFunction& b);

  RationalFunction pow(int n) const;
  RationalFunction derivative(int var) const;
  RationalFunction substitute(int var, const RationalFunction& value) const;
  RationalFunction substitute(int var, const Rational& value) const;

  std::string str(std::span<const std::string> names) const;
  std::string str() const;

 private:
  void reduce();
  MultiPoly num_;
  MultiPoly den_;
};

}  // namespace pdde
