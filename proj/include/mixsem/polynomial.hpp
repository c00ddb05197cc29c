#ifndef MIXSEM_POLYNOMIAL_HPP
#define MIXSEM_POLYNOMIAL_HPP

#include "mixsem/graph.hpp"
#include "mixsem/scalar.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace mixsem {

using Var = int;
inline constexpr int kMaxVars = 64;

/// Exponent vector. Ordered graded-lexicographically; variable 0 is the most
/// significant in the lexicographic tie-break.
class Monomial {
 public:
  Monomial() { exps_.fill(0); }
  static Monomial variable(Var v, int power = 1);

  int exponent(Var v) const { return exps_[static_cast<std::size_t>(v)]; }
  int degree() const { return degree_; }
  bool is_one() const { return degree_ == 0; }
  void set_exponent(Var v, int e);

  Monomial operator*(const Monomial& o) const;
  bool divides(const Monomial& o) const;
  /// o / *this; requires divides(o).
  Monomial quotient_of(const Monomial& o) const;

  bool operator==(const Monomial& o) const { return degree_ == o.degree_ && exps_ == o.exps_; }
  std::strong_ordering operator<=>(const Monomial& o) const;

 private:
  std::array<std::uint8_t, kMaxVars> exps_;
  int degree_ = 0;
};

/// Sparse polynomial with exact rational coefficients. Terms are kept in
/// decreasing graded-lex order, so the first term is the leading term.
class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, std::greater<>>;

  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT: constants convert implicitly
  Polynomial(int c) : Polynomial(Rational(c)) {}  // NOLINT
  static Polynomial variable(Var v);
  static Polynomial term(const Monomial& m, const Rational& c);

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one()); }
  std::size_t size() const { return terms_.size(); }
  int degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }
  int degree_in(Var v) const;
  /// Bitmask of variables that occur (kMaxVars <= 64).
  std::uint64_t variables() const;

  const Monomial& leading_monomial() const { return terms_.begin()->first; }
  const Rational& leading_coefficient() const { return terms_.begin()->second; }
  Rational constant_term() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Rational& c);
  Polynomial operator-() const;
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(Polynomial a, const Rational& c) { return a *= c; }
  friend Polynomial operator*(const Rational& c, Polynomial a) { return a *= c; }
  friend Polynomial operator*(int c, Polynomial a) { return a *= Rational(c); }
  friend Polynomial operator*(Polynomial a, int c) { return a *= Rational(c); }
  bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

  /// Adds c * m * other to this polynomial.
  void add_scaled(const Polynomial& other, const Rational& c, const Monomial& m);
  void add_term(const Monomial& m, const Rational& c);

  Rational evaluate(const std::vector<Rational>& point) const;
  double evaluate(const std::vector<double>& point) const;
  /// Replaces variable v by images[v]; variables without an image stay.
  Polynomial substitute(const std::vector<const Polynomial*>& images) const;

  /// Coefficients with respect to v: result[k] multiplies v^k.
  std::vector<Polynomial> coefficients_in(Var v) const;
  static Polynomial from_coefficients(const std::vector<Polynomial>& coeffs, Var v);

 private:
  Terms terms_;
};

Polynomial pow(const Polynomial& p, int e);

/// Positive rational c such that p / c has coprime integer coefficients and
/// positive leading coefficient; the sign of c follows the leading coefficient.
Rational content(const Polynomial& p);
Polynomial primitive_part(const Polynomial& p);

/// Exact division; throws InvariantViolation when b does not divide a.
Polynomial divide_exact(const Polynomial& a, const Polynomial& b);
bool divides(const Polynomial& b, const Polynomial& a, Polynomial* quotient = nullptr);

/// Greatest common divisor, primitive with positive leading coefficient.
/// gcd(0, 0) = 0.
Polynomial gcd(const Polynomial& a, const Polynomial& b);

/// p divided by its graded-lex leading coefficient. Throws on zero.
Polynomial canonicalize(const Polynomial& p);

/// Reduced quotient num/den.
class RationalFunction {
 public:
  RationalFunction() : num_(0), den_(1) {}
  RationalFunction(const Polynomial& p) : num_(p), den_(1) {}  // NOLINT
  RationalFunction(const Polynomial& num, const Polynomial& den);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }

  RationalFunction& operator+=(const RationalFunction& o);
  RationalFunction& operator-=(const RationalFunction& o);
  RationalFunction& operator*=(const RationalFunction& o);
  RationalFunction& operator/=(const RationalFunction& o);
  RationalFunction operator-() const { return {-num_, den_, true}; }
  friend RationalFunction operator+(RationalFunction a, const RationalFunction& b) { return a += b; }
  friend RationalFunction operator-(RationalFunction a, const RationalFunction& b) { return a -= b; }
  friend RationalFunction operator*(RationalFunction a, const RationalFunction& b) { return a *= b; }
  friend RationalFunction operator/(RationalFunction a, const RationalFunction& b) { return a /= b; }
  bool operator==(const RationalFunction& o) const { return num_ == o.num_ && den_ == o.den_; }

  Rational evaluate(const std::vector<Rational>& point) const;
  double evaluate(const std::vector<double>& point) const;

 private:
  RationalFunction(Polynomial num, Polynomial den, bool /*reduced*/)
      : num_(std::move(num)), den_(std::move(den)) {}
  void normalize();

  Polynomial num_;
  Polynomial den_;
};

// Covariance variables sigma_vw (v <= w) use the pair numbering of a
// kMaxNodes-node graph, so the order agrees with pair-lexicographic order.
Var sigma_var(NodeId v, NodeId w);
std::pair<NodeId, NodeId> sigma_pair(Var var);
Polynomial sigma(NodeId v, NodeId w);
inline constexpr int kSigmaVars = kMaxNodes * (kMaxNodes + 1) / 2;

/// s_ab when every node name is a single character, s_a_b otherwise.
std::string sigma_name(const std::vector<std::string>& names, Var var);

using VarNamer = std::function<std::string(Var)>;

/// Terms joined by " + ", each "coef*x*y" with the sign carried by the
/// coefficient; powers repeat the variable. Zero prints as "0".
std::string to_string(const Polynomial& p, const VarNamer& namer);
std::string to_string(const Polynomial& p, const std::vector<std::string>& names);

/// Inverse of to_string for covariance polynomials. Throws DataError.
Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names);

}  // namespace mixsem

#endif  // MIXSEM_POLYNOMIAL_HPP
