#pragma once
#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "gddx/errors.hpp"

namespace gddx {

/// Exponent vector; entry i is the degree of variable i. Trailing zeros are
/// trimmed so equal monomials compare equal.
using Monomial = std::vector<std::uint16_t>;

/// Lexicographic order with the highest-numbered variable most significant.
struct MonomialLess {
  bool operator()(const Monomial &a, const Monomial &b) const {
    const auto n = std::max(a.size(), b.size());
    for (auto i = n; i-- > 0;) {
      const auto ea = i < a.size() ? a[i] : 0;
      const auto eb = i < b.size() ? b[i] : 0;
      if (ea != eb)
        return ea < eb;
    }
    return false;
  }
};

namespace detail {
inline void trim(Monomial &m) {
  while (!m.empty() && m.back() == 0)
    m.pop_back();
}
inline Monomial mono_mul(const Monomial &a, const Monomial &b) {
  Monomial out(std::max(a.size(), b.size()), 0);
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = static_cast<std::uint16_t>((i < a.size() ? a[i] : 0) +
                                        (i < b.size() ? b[i] : 0));
  return out;
}
} // namespace detail

/// Sparse multivariate polynomial with exact coefficients. Zero coefficients
/// are never stored.
template <class Coeff> class basic_polynomial {
public:
  using Terms = std::map<Monomial, Coeff, MonomialLess>;

  basic_polynomial() = default;
  basic_polynomial(const Coeff &c) {
    if (c != 0)
      terms_.emplace(Monomial{}, c);
  }
  basic_polynomial(int c)
    requires(!std::is_same_v<Coeff, int>)
      : basic_polynomial(Coeff(c)) {}

  static basic_polynomial variable(std::size_t v, unsigned degree = 1) {
    Monomial m(v + 1, 0);
    m[v] = static_cast<std::uint16_t>(degree);
    detail::trim(m);
    basic_polynomial p;
    p.terms_.emplace(std::move(m), Coeff(1));
    return p;
  }

  static basic_polynomial term(Monomial m, const Coeff &c) {
    detail::trim(m);
    basic_polynomial p;
    if (c != 0)
      p.terms_.emplace(std::move(m), c);
    return p;
  }

  const Terms &terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first.empty());
  }
  Coeff constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Coeff(0) : it->second;
  }

  /// Highest variable occurring, or -1 for constants.
  int main_variable() const {
    if (terms_.empty())
      return -1;
    return static_cast<int>(terms_.rbegin()->first.size()) - 1;
  }

  unsigned degree(std::size_t v) const {
    unsigned d = 0;
    for (const auto &[m, c] : terms_)
      if (v < m.size())
        d = std::max<unsigned>(d, m[v]);
    return d;
  }

  /// Coefficient of v^k, as a polynomial in the other variables.
  basic_polynomial coefficient(std::size_t v, unsigned k) const {
    basic_polynomial out;
    for (const auto &[m, c] : terms_) {
      const unsigned e = v < m.size() ? m[v] : 0;
      if (e != k)
        continue;
      Monomial r = m;
      if (v < r.size())
        r[v] = 0;
      detail::trim(r);
      out.terms_.emplace(std::move(r), c);
    }
    return out;
  }

  basic_polynomial leading_coefficient(std::size_t v) const {
    return coefficient(v, degree(v));
  }

  /// Leading coefficient in the main variable.
  basic_polynomial initial() const {
    const int mv = main_variable();
    return mv < 0 ? *this : leading_coefficient(static_cast<std::size_t>(mv));
  }

  std::pair<Monomial, Coeff> leading_term() const {
    if (terms_.empty())
      return {Monomial{}, Coeff(0)};
    return *terms_.rbegin();
  }

  Coeff evaluate(const std::vector<Coeff> &values) const {
    Coeff sum = 0;
    for (const auto &[m, c] : terms_) {
      Coeff t = c;
      for (std::size_t i = 0; i < m.size(); ++i)
        for (unsigned e = 0; e < m[i]; ++e)
          t *= values.at(i);
      sum += t;
    }
    return sum;
  }

  basic_polynomial &operator+=(const basic_polynomial &o) {
    for (const auto &[m, c] : o.terms_)
      add_term(m, c);
    return *this;
  }
  basic_polynomial &operator-=(const basic_polynomial &o) {
    for (const auto &[m, c] : o.terms_)
      add_term(m, -c);
    return *this;
  }
  basic_polynomial &operator*=(const basic_polynomial &o) {
    *this = *this * o;
    return *this;
  }

  friend basic_polynomial operator+(basic_polynomial a,
                                    const basic_polynomial &b) {
    return a += b;
  }
  friend basic_polynomial operator-(basic_polynomial a,
                                    const basic_polynomial &b) {
    return a -= b;
  }
  friend basic_polynomial operator-(basic_polynomial a) {
    for (auto &[m, c] : a.terms_)
      c = -c;
    return a;
  }
  friend basic_polynomial operator*(const basic_polynomial &a,
                                    const basic_polynomial &b) {
    basic_polynomial out;
    for (const auto &[ma, ca] : a.terms_)
      for (const auto &[mb, cb] : b.terms_)
        out.add_term(detail::mono_mul(ma, mb), ca * cb);
    return out;
  }

  bool operator==(const basic_polynomial &o) const { return terms_ == o.terms_; }
  bool operator!=(const basic_polynomial &o) const { return !(*this == o); }

  /// Human-readable form, highest term first. `names[i]` names variable i.
  std::string to_string(const std::vector<std::string> &names) const {
    if (terms_.empty())
      return "0";
    std::string out;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
      const auto &[m, c] = *it;
      Coeff a = c < 0 ? Coeff(-c) : c;
      if (out.empty())
        out += c < 0 ? "-" : "";
      else
        out += c < 0 ? " - " : " + ";
      bool first = true;
      if (a != 1 || m.empty()) {
        out += coeff_string(a);
        first = false;
      }
      for (std::size_t i = m.size(); i-- > 0;) {
        if (!m[i])
          continue;
        out += first ? "" : "*";
        first = false;
        out += i < names.size() ? names[i] : "v" + std::to_string(i);
        if (m[i] > 1)
          out += "^" + std::to_string(m[i]);
      }
    }
    return out;
  }

private:
  Terms terms_;

  void add_term(const Monomial &m, const Coeff &c) {
    if (c == 0)
      return;
    auto [it, inserted] = terms_.try_emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0)
        terms_.erase(it);
    }
  }

  static std::string coeff_string(const Coeff &c) {
    if constexpr (std::is_same_v<Coeff, mpq_class>)
      return c.get_str();
    else
      return std::to_string(c);
  }
};

using Polynomial = basic_polynomial<mpq_class>;

template <class Coeff> struct PseudoDivision {
  basic_polynomial<Coeff> quotient;
  basic_polynomial<Coeff> remainder;
  unsigned k = 0; // power of the divisor's initial
};

/// init(g)^k * f = q * g + r with deg_x(r) < deg_x(g), k as small as the
/// elimination allows. Throws std::invalid_argument if g is free of x.
template <class Coeff>
PseudoDivision<Coeff> pseudo_division(const basic_polynomial<Coeff> &f,
                                      const basic_polynomial<Coeff> &g,
                                      std::size_t x) {
  using P = basic_polynomial<Coeff>;
  const unsigned dg = g.degree(x);
  if (dg == 0)
    throw std::invalid_argument("pseudo-division by a polynomial free of "
                                "the division variable");
  const P init = g.leading_coefficient(x);
  PseudoDivision<Coeff> out{P{}, f, 0};
  while (!out.remainder.is_zero()) {
    const unsigned dr = out.remainder.degree(x);
    if (dr < dg)
      break;
    const P lead = out.remainder.leading_coefficient(x) * P::variable(x, dr - dg);
    out.remainder = init * out.remainder - lead * g;
    out.quotient = init * out.quotient + lead;
    ++out.k;
  }
  return out;
}

template <class Coeff>
basic_polynomial<Coeff> prem(const basic_polynomial<Coeff> &f,
                             const basic_polynomial<Coeff> &g, std::size_t x) {
  return pseudo_division(f, g, x).remainder;
}

} // namespace gddx
