#include "mixsem/polynomial.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <sstream>

namespace mixsem {

namespace mp = boost::multiprecision;

Monomial Monomial::variable(Var v, int power) {
  Monomial m;
  m.set_exponent(v, power);
  return m;
}

void Monomial::set_exponent(Var v, int e) {
  if (v < 0 || v >= kMaxVars) throw std::out_of_range("variable index out of range");
  if (e < 0 || e > 255) throw std::out_of_range("exponent out of range");
  auto& slot = exps_[static_cast<std::size_t>(v)];
  degree_ += e - slot;
  slot = static_cast<std::uint8_t>(e);
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    const int e = exps_[i] + o.exps_[i];
    if (e > 255) throw std::overflow_error("monomial exponent overflow");
    r.exps_[i] = static_cast<std::uint8_t>(e);
  }
  r.degree_ = degree_ + o.degree_;
  return r;
}

bool Monomial::divides(const Monomial& o) const {
  if (degree_ > o.degree_) return false;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] > o.exps_[i]) return false;
  }
  return true;
}

Monomial Monomial::quotient_of(const Monomial& o) const {
  Monomial r;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    r.exps_[i] = static_cast<std::uint8_t>(o.exps_[i] - exps_[i]);
  }
  r.degree_ = o.degree_ - degree_;
  return r;
}

std::strong_ordering Monomial::operator<=>(const Monomial& o) const {
  if (degree_ != o.degree_) return degree_ <=> o.degree_;
  for (std::size_t i = 0; i < exps_.size(); ++i) {
    if (exps_[i] != o.exps_[i]) return exps_[i] <=> o.exps_[i];
  }
  return std::strong_ordering::equal;
}

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial(), c);
}

Polynomial Polynomial::variable(Var v) { return term(Monomial::variable(v), 1); }

Polynomial Polynomial::term(const Monomial& m, const Rational& c) {
  Polynomial p;
  p.add_term(m, c);
  return p;
}

int Polynomial::degree_in(Var v) const {
  int d = terms_.empty() ? -1 : 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.exponent(v));
  return d;
}

std::uint64_t Polynomial::variables() const {
  std::uint64_t mask = 0;
  for (const auto& [m, c] : terms_) {
    for (Var v = 0; v < kMaxVars; ++v) {
      if (m.exponent(v) != 0) mask |= std::uint64_t{1} << v;
    }
  }
  return mask;
}

Rational Polynomial::constant_term() const {
  auto it = terms_.find(Monomial());
  return it == terms_.end() ? Rational(0) : it->second;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

void Polynomial::add_scaled(const Polynomial& other, const Rational& c, const Monomial& m) {
  if (c == 0) return;
  for (const auto& [om, oc] : other.terms_) add_term(om * m, oc * c);
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [m, x] : terms_) x *= c;
  }
  return *this;
}

Polynomial Polynomial::operator-() const {
  Polynomial r = *this;
  for (auto& [m, c] : r.terms_) c = -c;
  return r;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial r;
  const Polynomial& small = a.size() <= b.size() ? a : b;
  const Polynomial& big = a.size() <= b.size() ? b : a;
  for (const auto& [m, c] : small.terms_) r.add_scaled(big, c, m);
  return r;
}

Polynomial pow(const Polynomial& p, int e) {
  if (e < 0) throw std::invalid_argument("negative exponent");
  Polynomial r(1);
  Polynomial base = p;
  while (e > 0) {
    if (e & 1) r = r * base;
    e >>= 1;
    if (e > 0) base = base * base;
  }
  return r;
}

namespace {

template <typename T>
T power(const T& x, int e) {
  T r(1);
  for (int i = 0; i < e; ++i) r *= x;
  return r;
}

template <typename T>
T evaluate_terms(const Polynomial::Terms& terms, const std::vector<T>& point) {
  T sum(0);
  for (const auto& [m, c] : terms) {
    T t;
    if constexpr (std::is_same_v<T, double>) {
      t = c.template convert_to<double>();
    } else {
      t = c;
    }
    for (Var v = 0; v < kMaxVars && m.degree() > 0; ++v) {
      const int e = m.exponent(v);
      if (e == 0) continue;
      if (static_cast<std::size_t>(v) >= point.size()) throw std::invalid_argument("evaluation point too short");
      t *= power(point[static_cast<std::size_t>(v)], e);
    }
    sum += t;
  }
  return sum;
}

}  // namespace

Rational Polynomial::evaluate(const std::vector<Rational>& point) const {
  return evaluate_terms(terms_, point);
}

double Polynomial::evaluate(const std::vector<double>& point) const {
  return evaluate_terms(terms_, point);
}

std::vector<Polynomial> Polynomial::coefficients_in(Var v) const {
  std::vector<Polynomial> out(static_cast<std::size_t>(std::max(degree_in(v), 0) + 1));
  for (const auto& [m, c] : terms_) {
    Monomial rest = m;
    const int e = m.exponent(v);
    rest.set_exponent(v, 0);
    out[static_cast<std::size_t>(e)].add_term(rest, c);
  }
  return out;
}

Polynomial Polynomial::from_coefficients(const std::vector<Polynomial>& coeffs, Var v) {
  Polynomial r;
  for (std::size_t k = 0; k < coeffs.size(); ++k) {
    r.add_scaled(coeffs[k], 1, Monomial::variable(v, static_cast<int>(k)));
  }
  return r;
}

namespace {

// Horner scheme over the substituted variables, lowest index outermost.
Polynomial substitute_rec(const Polynomial& p, const std::vector<const Polynomial*>& images, Var from) {
  if (p.is_zero()) return p;
  const std::uint64_t vars = p.variables();
  Var x = -1;
  for (Var v = from; v < static_cast<Var>(images.size()); ++v) {
    if (images[static_cast<std::size_t>(v)] != nullptr && ((vars >> v) & 1u)) {
      x = v;
      break;
    }
  }
  if (x < 0) return p;
  const auto coeffs = p.coefficients_in(x);
  const Polynomial& img = *images[static_cast<std::size_t>(x)];
  Polynomial acc;
  for (auto k = coeffs.size(); k-- > 0;) {
    acc = acc * img;
    acc += substitute_rec(coeffs[k], images, x + 1);
  }
  return acc;
}

}  // namespace

Polynomial Polynomial::substitute(const std::vector<const Polynomial*>& images) const {
  return substitute_rec(*this, images, 0);
}

Rational content(const Polynomial& p) {
  if (p.is_zero()) return 0;
  Integer g = 0;
  Integer l = 1;
  for (const auto& [m, c] : p.terms()) {
    g = mp::gcd(g, Integer(mp::numerator(c)));
    l = mp::lcm(l, Integer(mp::denominator(c)));
  }
  Rational r = Rational(abs(g)) / Rational(l);
  return p.leading_coefficient() < 0 ? Rational(-r) : r;
}

Polynomial primitive_part(const Polynomial& p) {
  if (p.is_zero()) return p;
  Polynomial r = p;
  r *= Rational(1) / content(p);
  return r;
}

bool divides(const Polynomial& b, const Polynomial& a, Polynomial* quotient) {
  if (b.is_zero()) throw std::domain_error("division by zero polynomial");
  Polynomial q;
  Polynomial r = a;
  const Monomial& lb = b.leading_monomial();
  const Rational lc = b.leading_coefficient();
  while (!r.is_zero()) {
    const Monomial& lr = r.leading_monomial();
    if (!lb.divides(lr)) return false;
    const Monomial m = lb.quotient_of(lr);
    const Rational c = r.leading_coefficient() / lc;
    q.add_term(m, c);
    r.add_scaled(b, -c, m);
  }
  if (quotient != nullptr) *quotient = std::move(q);
  return true;
}

Polynomial divide_exact(const Polynomial& a, const Polynomial& b) {
  Polynomial q;
  if (!divides(b, a, &q)) throw InvariantViolation("inexact polynomial division");
  return q;
}

namespace {

Var lowest_variable(std::uint64_t mask) {
  return mask == 0 ? -1 : static_cast<Var>(std::countr_zero(mask));
}

Polynomial gcd_rec(const Polynomial& a, const Polynomial& b);

// gcd of the coefficients of p with respect to x.
Polynomial content_in(const Polynomial& p, Var x) {
  Polynomial g;
  for (const auto& c : p.coefficients_in(x)) {
    if (c.is_zero()) continue;
    g = gcd_rec(g, c);
    if (g.is_constant()) return Polynomial(1);
  }
  return g;
}

Polynomial pseudo_remainder(const Polynomial& a, const Polynomial& b, Var x) {
  auto ca = a.coefficients_in(x);
  const auto cb = b.coefficients_in(x);
  const std::size_t db = cb.size() - 1;
  const Polynomial& lb = cb.back();
  while (ca.size() > db && !ca.empty()) {
    const Polynomial la = ca.back();
    const std::size_t shift = ca.size() - 1 - db;
    for (auto& c : ca) c = c * lb;
    for (std::size_t k = 0; k <= db; ++k) ca[k + shift] -= la * cb[k];
    while (!ca.empty() && ca.back().is_zero()) ca.pop_back();
  }
  return Polynomial::from_coefficients(ca, x);
}

Polynomial gcd_rec(const Polynomial& a, const Polynomial& b) {
  if (a.is_zero()) return primitive_part(b);
  if (b.is_zero()) return primitive_part(a);
  if (a.is_constant() || b.is_constant()) return Polynomial(1);
  const std::uint64_t va = a.variables();
  const std::uint64_t vb = b.variables();
  const Var x = lowest_variable(va | vb);
  if (!((vb >> x) & 1u)) return gcd_rec(content_in(a, x), b);
  if (!((va >> x) & 1u)) return gcd_rec(a, content_in(b, x));

  const Polynomial ca = content_in(a, x);
  const Polynomial cb = content_in(b, x);
  const Polynomial gc = gcd_rec(ca, cb);
  Polynomial p = primitive_part(divide_exact(a, ca));
  Polynomial q = primitive_part(divide_exact(b, cb));
  if (p.degree_in(x) < q.degree_in(x)) std::swap(p, q);
  while (true) {
    Polynomial r = pseudo_remainder(p, q, x);
    if (r.is_zero()) break;
    if (r.degree_in(x) == 0) {
      q = Polynomial(1);
      break;
    }
    p = std::move(q);
    q = primitive_part(divide_exact(r, content_in(r, x)));
  }
  return primitive_part(gc * q);
}

}  // namespace

Polynomial gcd(const Polynomial& a, const Polynomial& b) { return gcd_rec(a, b); }

Polynomial canonicalize(const Polynomial& p) {
  if (p.is_zero()) throw std::invalid_argument("canonicalize: zero polynomial");
  Polynomial r = p;
  r *= Rational(1) / p.leading_coefficient();
  return r;
}

RationalFunction::RationalFunction(const Polynomial& num, const Polynomial& den)
    : num_(num), den_(den) {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  normalize();
}

void RationalFunction::normalize() {
  if (num_.is_zero()) {
    den_ = Polynomial(1);
    return;
  }
  if (!den_.is_constant()) {
    const Polynomial g = gcd(num_, den_);
    if (!g.is_constant()) {
      num_ = divide_exact(num_, g);
      den_ = divide_exact(den_, g);
    }
  }
  const Rational c = content(den_);
  if (c != 1) {
    num_ *= Rational(1) / c;
    den_ *= Rational(1) / c;
  }
}

RationalFunction& RationalFunction::operator+=(const RationalFunction& o) {
  if (den_ == o.den_) {
    num_ += o.num_;
  } else {
    num_ = num_ * o.den_ + o.num_ * den_;
    den_ = den_ * o.den_;
  }
  normalize();
  return *this;
}

RationalFunction& RationalFunction::operator-=(const RationalFunction& o) { return *this += -o; }

RationalFunction& RationalFunction::operator*=(const RationalFunction& o) {
  num_ = num_ * o.num_;
  den_ = den_ * o.den_;
  normalize();
  return *this;
}

RationalFunction& RationalFunction::operator/=(const RationalFunction& o) {
  if (o.is_zero()) throw std::domain_error("division by zero rational function");
  num_ = num_ * o.den_;
  den_ = den_ * o.num_;
  normalize();
  return *this;
}

Rational RationalFunction::evaluate(const std::vector<Rational>& point) const {
  const Rational d = den_.evaluate(point);
  if (d == 0) throw std::domain_error("denominator vanishes at evaluation point");
  return num_.evaluate(point) / d;
}

double RationalFunction::evaluate(const std::vector<double>& point) const {
  return num_.evaluate(point) / den_.evaluate(point);
}

Var sigma_var(NodeId v, NodeId w) {
  if (v > w) std::swap(v, w);
  if (v < 0 || w >= kMaxNodes) throw std::out_of_range("sigma_var: node out of range");
  return v * kMaxNodes - v * (v - 1) / 2 + (w - v);
}

std::pair<NodeId, NodeId> sigma_pair(Var var) {
  for (NodeId v = 0; v < kMaxNodes; ++v) {
    const Var first = sigma_var(v, v);
    if (var < first + (kMaxNodes - v)) return {v, v + (var - first)};
  }
  throw std::out_of_range("sigma_pair: not a covariance variable");
}

Polynomial sigma(NodeId v, NodeId w) { return Polynomial::variable(sigma_var(v, w)); }

std::string sigma_name(const std::vector<std::string>& names, Var var) {
  const auto [v, w] = sigma_pair(var);
  if (v >= static_cast<NodeId>(names.size()) || w >= static_cast<NodeId>(names.size())) {
    throw std::out_of_range("sigma_name: node out of range");
  }
  const bool single = std::all_of(names.begin(), names.end(), [](const std::string& s) { return s.size() == 1; });
  const auto& a = names[static_cast<std::size_t>(v)];
  const auto& b = names[static_cast<std::size_t>(w)];
  return single ? "s_" + a + b : "s_" + a + "_" + b;
}

std::string to_string(const Polynomial& p, const VarNamer& namer) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    if (!first) out += " + ";
    first = false;
    out += c.str();
    for (Var v = 0; v < kMaxVars; ++v) {
      for (int k = 0; k < m.exponent(v); ++k) out += "*" + namer(v);
    }
  }
  return out;
}

std::string to_string(const Polynomial& p, const std::vector<std::string>& names) {
  return to_string(p, [&](Var v) { return sigma_name(names, v); });
}

Polynomial parse_polynomial(const std::string& text, const std::vector<std::string>& names) {
  std::map<std::string, Var> vars;
  for (NodeId v = 0; v < static_cast<NodeId>(names.size()); ++v) {
    for (NodeId w = v; w < static_cast<NodeId>(names.size()); ++w) {
      vars.emplace(sigma_name(names, sigma_var(v, w)), sigma_var(v, w));
    }
  }
  Polynomial p;
  std::string s = text;
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
  if (s == "0") return p;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    // terms are separated by '+'; a '-' only appears as a coefficient sign
    std::size_t end = s.find('+', pos);
    if (end == std::string::npos) end = s.size();
    const std::string term = s.substr(pos, end - pos);
    if (term.empty()) throw DataError("malformed polynomial '" + text + "'");
    std::vector<std::string> factors;
    std::stringstream ts(term);
    for (std::string f; std::getline(ts, f, '*');) factors.push_back(f);
    Rational coef = 1;
    Monomial m;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      const std::string& f = factors[i];
      auto it = vars.find(f);
      if (it != vars.end()) {
        m.set_exponent(it->second, m.exponent(it->second) + 1);
        continue;
      }
      if (i != 0) throw DataError("unknown variable '" + f + "' in polynomial");
      try {
        coef = Rational(f);
      } catch (const std::exception&) {
        throw DataError("bad coefficient '" + f + "' in polynomial");
      }
    }
    p.add_term(m, coef);
    pos = end + 1;
  }
  return p;
}

}  // namespace mixsem
