#pragma once
#include <algorithm>
#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/errors.hpp"
#include "gddx/i18n.hpp"
#include "gddx/polynomial.hpp"

namespace gddx {

/// Polynomial form of a construction and goal. Variables 0..parameter_count-1
/// are free parameters; the rest are dependent coordinates of constructed
/// points in construction order, x before y.
struct Translation {
  std::vector<std::string> variables;
  std::size_t parameter_count = 0;
  std::map<std::string, std::pair<Polynomial, Polynomial>> coordinates;
  std::vector<Polynomial> hypotheses;
  std::vector<Polynomial> conclusions;

  const std::pair<Polynomial, Polynomial> &at(const std::string &p) const {
    return coordinates.at(p);
  }
};

namespace poly {

inline Polynomial det3(const Polynomial &a, const Polynomial &b,
                       const Polynomial &c, const Polynomial &d,
                       const Polynomial &e, const Polynomial &f,
                       const Polynomial &g, const Polynomial &h,
                       const Polynomial &i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

using Point = std::pair<Polynomial, Polynomial>;

inline Polynomial collinear(const Point &a, const Point &b, const Point &c) {
  const Polynomial one(1);
  return det3(a.first, a.second, one, b.first, b.second, one, c.first,
              c.second, one);
}
inline Polynomial cross(const Point &a, const Point &b, const Point &c,
                        const Point &d) {
  return (b.first - a.first) * (d.second - c.second) -
         (b.second - a.second) * (d.first - c.first);
}
inline Polynomial dot(const Point &a, const Point &b, const Point &c,
                      const Point &d) {
  return (b.first - a.first) * (d.first - c.first) +
         (b.second - a.second) * (d.second - c.second);
}
inline Polynomial dist2(const Point &a, const Point &b) {
  const auto dx = b.first - a.first, dy = b.second - a.second;
  return dx * dx + dy * dy;
}
inline Polynomial concyclic(const Point &a, const Point &b, const Point &c,
                            const Point &d) {
  // rows (x, y, x^2 + y^2, 1); subtracting the first row reduces it to 3x3
  auto row = [&](const Point &p) {
    const auto dx = p.first - a.first, dy = p.second - a.second;
    return std::array<Polynomial, 3>{dx, dy, dx * dx + dy * dy};
  };
  const auto r1 = row(b), r2 = row(c), r3 = row(d);
  return det3(r1[0], r1[1], r1[2], r2[0], r2[1], r2[2], r3[0], r3[1], r3[2]);
}

} // namespace poly

/// Polynomials whose vanishing states `f` over the given coordinates.
inline std::vector<Polynomial>
fact_polynomials(const Fact &f, const Translation &t) {
  std::vector<poly::Point> p;
  for (const auto &l : f.points)
    p.push_back(t.at(l));
  switch (f.predicate) {
  case Predicate::coll:
    return {poly::collinear(p[0], p[1], p[2])};
  case Predicate::para:
    return {poly::cross(p[0], p[1], p[2], p[3])};
  case Predicate::perp:
    return {poly::dot(p[0], p[1], p[2], p[3])};
  case Predicate::cong:
    return {poly::dist2(p[0], p[1]) - poly::dist2(p[2], p[3])};
  case Predicate::midp:
    return {Polynomial(2) * p[0].first - p[1].first - p[2].first,
            Polynomial(2) * p[0].second - p[1].second - p[2].second};
  case Predicate::cyclic:
    return {poly::concyclic(p[0], p[1], p[2], p[3])};
  case Predicate::eqangle:
    throw UnsupportedByBackend(
        "the algebraic backend does not handle eqangle goals");
  }
  return {};
}

/// The first free point is placed at the origin and the second on the
/// x-axis.
inline Translation translate(const Construction &c,
                             const std::optional<Goal> &g = std::nullopt) {
  validate(c);
  Translation t;
  auto new_var = [&](std::string name) {
    t.variables.push_back(std::move(name));
    return Polynomial::variable(t.variables.size() - 1);
  };

  int free_seen = 0;
  for (const auto &s : c.steps) {
    if (s.kind == StepKind::free_point) {
      Polynomial x, y;
      if (free_seen == 1)
        x = new_var("x_" + s.defined);
      else if (free_seen >= 2) {
        x = new_var("x_" + s.defined);
        y = new_var("y_" + s.defined);
      }
      ++free_seen;
      t.coordinates[s.defined] = {x, y};
    } else if (s.kind == StepKind::point_on_line) {
      t.coordinates[s.defined].first = new_var("x_" + s.defined);
    }
  }
  t.parameter_count = t.variables.size();

  for (const auto &s : c.steps) {
    if (s.kind == StepKind::free_point)
      continue;
    auto &pt = t.coordinates[s.defined];
    if (s.kind != StepKind::point_on_line)
      pt.first = new_var("x_" + s.defined);
    pt.second = new_var("y_" + s.defined);

    auto P = [&](std::size_t i) { return t.coordinates.at(s.args[i]); };
    std::vector<Polynomial> hs;
    switch (s.kind) {
    case StepKind::midpoint:
      hs = {Polynomial(2) * pt.first - P(0).first - P(1).first,
            Polynomial(2) * pt.second - P(0).second - P(1).second};
      break;
    case StepKind::foot:
      hs = {poly::dot(P(0), pt, P(1), P(2)), poly::collinear(P(1), P(2), pt)};
      break;
    case StepKind::intersect_ll:
      hs = {poly::collinear(P(0), P(1), pt), poly::collinear(P(2), P(3), pt)};
      break;
    case StepKind::point_on_line:
      hs = {poly::collinear(P(0), P(1), pt)};
      break;
    case StepKind::free_point:
      break;
    }
    for (auto &h : hs)
      if (!h.is_zero())
        t.hypotheses.push_back(std::move(h));
  }

  if (g) {
    const auto goal = canonical_fact(g->fact);
    for (const auto &p : goal.points)
      if (!t.coordinates.count(p))
        throw ConstructionError("goal uses undefined point '" + p + "'");
    t.conclusions = fact_polynomials(goal, t);
  }
  return t;
}

/// Polynomials with strictly increasing main variables, plus their initials.
struct TriangularSet {
  std::vector<Polynomial> polynomials;

  std::vector<Polynomial> initials() const {
    std::vector<Polynomial> out;
    for (const auto &p : polynomials)
      out.push_back(p.initial());
    return out;
  }
  std::vector<int> main_variables() const {
    std::vector<int> out;
    for (const auto &p : polynomials)
      out.push_back(p.main_variable());
    return out;
  }
  std::size_t size() const { return polynomials.size(); }
};

class InconsistentHypotheses : public Error {
public:
  using Error::Error;
};

struct WuOptions {
  std::size_t max_monomials = 200000;
};

namespace detail {

using Rank = std::pair<int, unsigned>;

inline Rank rank_of(const Polynomial &p) {
  const int mv = p.main_variable();
  return {mv, mv < 0 ? 0u : p.degree(static_cast<std::size_t>(mv))};
}

// Negative when chain a ranks lower than chain b.
inline int compare_chains(const std::vector<Polynomial> &a,
                          const std::vector<Polynomial> &b) {
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    const auto ra = rank_of(a[i]), rb = rank_of(b[i]);
    if (ra != rb)
      return ra < rb ? -1 : 1;
  }
  if (a.size() == b.size())
    return 0;
  return a.size() > b.size() ? -1 : 1;
}

inline bool reduced_wrt(const Polynomial &p, const Polynomial &f) {
  const auto mv = static_cast<std::size_t>(f.main_variable());
  return p.degree(mv) < f.degree(mv);
}

inline std::vector<Polynomial> basic_set(const std::vector<Polynomial> &ps) {
  std::vector<const Polynomial *> sorted;
  for (const auto &p : ps)
    sorted.push_back(&p);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto *a, auto *b) {
    const auto ra = rank_of(*a), rb = rank_of(*b);
    if (ra != rb)
      return ra < rb;
    return a->term_count() < b->term_count();
  });
  std::vector<Polynomial> chain;
  for (const auto *p : sorted) {
    if (!chain.empty() && p->main_variable() <= chain.back().main_variable())
      continue;
    if (std::all_of(chain.begin(), chain.end(),
                    [&](const Polynomial &f) { return reduced_wrt(*p, f); }))
      chain.push_back(*p);
  }
  return chain;
}

inline void check_size(const Polynomial &p, const WuOptions &opt) {
  if (p.term_count() > opt.max_monomials)
    throw ResourceExceeded("polynomial exceeds " +
                           std::to_string(opt.max_monomials) + " monomials");
}

} // namespace detail

/// Successive pseudo-remainder of `p` by the set, from the top down.
inline Polynomial prem(const Polynomial &p, const TriangularSet &ts,
                       const WuOptions &opt = {}) {
  Polynomial r = p;
  for (auto it = ts.polynomials.rbegin(); it != ts.polynomials.rend(); ++it) {
    r = prem(r, *it, static_cast<std::size_t>(it->main_variable()));
    detail::check_size(r, opt);
  }
  return r;
}

/// Ritt-Wu characteristic set. Throws InconsistentHypotheses when a nonzero
/// constant appears.
inline TriangularSet triangularize(std::vector<Polynomial> hyps,
                                   const WuOptions &opt = {}) {
  std::vector<Polynomial> ps;
  for (auto &h : hyps) {
    if (h.is_zero())
      continue;
    if (h.is_constant())
      throw InconsistentHypotheses("hypotheses contain a nonzero constant");
    if (std::find(ps.begin(), ps.end(), h) == ps.end())
      ps.push_back(std::move(h));
  }
  std::optional<std::vector<Polynomial>> previous;
  while (true) {
    auto chain = detail::basic_set(ps);
    if (previous && detail::compare_chains(chain, *previous) >= 0)
      throw std::logic_error("characteristic set rank did not decrease");
    TriangularSet ts{chain};
    std::vector<Polynomial> remainders;
    for (const auto &p : ps) {
      if (std::find(chain.begin(), chain.end(), p) != chain.end())
        continue;
      auto r = prem(p, ts, opt);
      if (r.is_zero())
        continue;
      if (r.is_constant())
        throw InconsistentHypotheses("hypotheses are inconsistent");
      if (std::find(ps.begin(), ps.end(), r) == ps.end() &&
          std::find(remainders.begin(), remainders.end(), r) ==
              remainders.end())
        remainders.push_back(std::move(r));
    }
    if (remainders.empty())
      return ts;
    previous = std::move(chain);
    ps.insert(ps.end(), remainders.begin(), remainders.end());
  }
}

/// `polynomial` != 0, with a geometric reading when one is recognised. The
/// reading is a catalog key whose slots take `reading_args`.
struct NdgCondition {
  Polynomial polynomial;
  std::string text;
  std::optional<std::string> reading_key;
  std::vector<std::string> reading_args;

  std::string to_string(const CatalogChain &chain = {}) const {
    if (!reading_key)
      return text + " != 0";
    return format_phrase(lookup(chain, *reading_key), reading_args) + " [" +
           text + " != 0]";
  }
};

namespace detail {

// p == c * q for some nonzero constant c.
inline bool proportional(const Polynomial &p, const Polynomial &q) {
  if (p.is_zero() || q.is_zero() || p.term_count() != q.term_count())
    return false;
  const auto [mp, cp] = p.leading_term();
  const auto [mq, cq] = q.leading_term();
  if (mp != mq)
    return false;
  const mpq_class ratio = cp / cq;
  auto ip = p.terms().begin();
  for (auto iq = q.terms().begin(); iq != q.terms().end(); ++iq, ++ip)
    if (ip->first != iq->first || ip->second != ratio * iq->second)
      return false;
  return true;
}

using Reading = std::pair<std::string, std::vector<std::string>>;

inline std::optional<Reading> read_ndg(const Polynomial &p,
                                       const Translation &t) {
  if (p.is_constant())
    return Reading{"trivially nonzero", {}};
  std::vector<std::string> pts;
  for (const auto &[l, c] : t.coordinates)
    pts.push_back(l);
  const auto n = pts.size();
  auto at = [&](std::size_t i) { return t.at(pts[i]); };
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::vector<std::string> ij{pts[i], pts[j]};
      if (proportional(p, at(i).first - at(j).first))
        return Reading{"line {0}{1} is not vertical", ij};
      if (proportional(p, at(i).second - at(j).second))
        return Reading{"line {0}{1} is not horizontal", ij};
      if (proportional(p, poly::dist2(at(i), at(j))))
        return Reading{"points {0} and {1} do not coincide", ij};
    }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        if (proportional(p, poly::collinear(at(i), at(j), at(k))))
          return Reading{"points {0}, {1}, {2} are not collinear",
                         {pts[i], pts[j], pts[k]}};
  std::vector<std::pair<std::size_t, std::size_t>> segs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      segs.emplace_back(i, j);
  for (std::size_t a = 0; a < segs.size(); ++a)
    for (std::size_t b = a + 1; b < segs.size(); ++b) {
      const auto [i, j] = segs[a];
      const auto [k, l] = segs[b];
      const std::vector<std::string> args{pts[i], pts[j], pts[k], pts[l]};
      if (proportional(p, poly::cross(at(i), at(j), at(k), at(l))))
        return Reading{"lines {0}{1} and {2}{3} are not parallel", args};
      if (proportional(p, poly::dot(at(i), at(j), at(k), at(l))))
        return Reading{"lines {0}{1} and {2}{3} are not perpendicular", args};
    }
  return std::nullopt;
}

} // namespace detail

struct WuResult {
  bool proved = false;
  std::vector<NdgCondition> ndgs;
  Polynomial final_remainder;
  std::vector<Polynomial> remainders; // one per conclusion
  Translation translation;
  TriangularSet triangular;
};

/// Proves `g` under the initials of the characteristic set of the
/// construction's hypotheses.
inline WuResult wu_prove(const Construction &c, const Goal &g,
                         const WuOptions &opt = {}) {
  WuResult res;
  res.translation = translate(c, g);
  res.triangular = triangularize(res.translation.hypotheses, opt);
  res.proved = true;
  for (const auto &concl : res.translation.conclusions) {
    auto r = prem(concl, res.triangular, opt);
    if (!r.is_zero() && res.proved) {
      res.proved = false;
      res.final_remainder = r;
    }
    res.remainders.push_back(std::move(r));
  }
  for (const auto &init : res.triangular.initials()) {
    const bool seen = std::any_of(
        res.ndgs.begin(), res.ndgs.end(), [&](const NdgCondition &n) {
          return detail::proportional(n.polynomial, init);
        });
    if (seen)
      continue;
    NdgCondition ndg{init, init.to_string(res.translation.variables), {}, {}};
    if (auto r = detail::read_ndg(init, res.translation)) {
      ndg.reading_key = r->first;
      ndg.reading_args = r->second;
    }
    res.ndgs.push_back(std::move(ndg));
  }
  return res;
}

} // namespace gddx
