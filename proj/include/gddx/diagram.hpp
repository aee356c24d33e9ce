#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gddx/core.hpp"

namespace gddx {

/// A numeric witness for a construction: one position per point label, in
/// construction order.
struct Diagram {
  std::vector<std::string> labels;
  std::vector<Coordinates> positions;
  std::uint64_t seed = 0;
  double construction_tolerance = 1e-9;
  double fact_tolerance = 1e-6;

  bool has(std::string_view label) const {
    return std::find(labels.begin(), labels.end(), label) != labels.end();
  }

  const Coordinates &at(std::string_view label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end())
      throw Error("diagram has no point '" + std::string(label) + "'");
    return positions[static_cast<std::size_t>(it - labels.begin())];
  }

  /// Diameter of the bounding box; tolerances scale with it.
  double scale() const {
    if (positions.empty())
      return 1.0;
    double x0 = positions[0].x, x1 = x0, y0 = positions[0].y, y1 = y0;
    for (const auto &p : positions) {
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
    }
    const double d = std::hypot(x1 - x0, y1 - y0);
    return d > 0 ? d : 1.0;
  }
};

struct RealizeOptions {
  bool use_hints = true;
  int max_attempts = 100;
  double min_separation = 1e-4;
};

namespace geom {

inline Coordinates operator-(Coordinates a, Coordinates b) {
  return {a.x - b.x, a.y - b.y};
}
inline Coordinates operator+(Coordinates a, Coordinates b) {
  return {a.x + b.x, a.y + b.y};
}
inline Coordinates operator*(double s, Coordinates a) {
  return {s * a.x, s * a.y};
}
inline double dot(Coordinates a, Coordinates b) { return a.x * b.x + a.y * b.y; }
inline double cross(Coordinates a, Coordinates b) {
  return a.x * b.y - a.y * b.x;
}
inline double norm(Coordinates a) { return std::hypot(a.x, a.y); }

/// Direction of the line through a and b, in [0, pi).
inline double direction(Coordinates a, Coordinates b) {
  double t = std::atan2(b.y - a.y, b.x - a.x);
  if (t < 0)
    t += std::numbers::pi;
  if (t >= std::numbers::pi)
    t -= std::numbers::pi;
  return t;
}

/// Wraps an angle difference into (-pi/2, pi/2].
inline double wrap_half_pi(double t) {
  const double pi = std::numbers::pi;
  t = std::fmod(t, pi);
  if (t > pi / 2)
    t -= pi;
  if (t <= -pi / 2)
    t += pi;
  return t;
}

inline Coordinates foot(Coordinates p, Coordinates a, Coordinates b) {
  const auto ab = b - a;
  return a + (dot(p - a, ab) / dot(ab, ab)) * ab;
}

inline double det3(double a, double b, double c, double d, double e, double f,
                   double g, double h, double i) {
  return a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g);
}

} // namespace geom

/// The defining residual of predicate `p` on concrete positions, already
/// normalised by `scale` so it can be compared against a relative tolerance.
inline double residual(Predicate p, std::span<const Coordinates> v,
                       double scale) {
  using namespace geom;
  const double inf = std::numeric_limits<double>::infinity();
  switch (p) {
  case Predicate::coll:
    return std::abs(cross(v[1] - v[0], v[2] - v[0])) / (scale * scale);
  case Predicate::para:
  case Predicate::perp: {
    const auto u = v[1] - v[0], w = v[3] - v[2];
    const double n = norm(u) * norm(w);
    if (n == 0)
      return inf;
    return std::abs(p == Predicate::para ? cross(u, w) : dot(u, w)) / n;
  }
  case Predicate::cong: {
    const auto u = v[1] - v[0], w = v[3] - v[2];
    return std::abs(dot(u, u) - dot(w, w)) / (scale * scale);
  }
  case Predicate::midp:
    return norm(v[0] - 0.5 * (v[1] + v[2])) / scale;
  case Predicate::eqangle: {
    for (int i = 0; i < 8; i += 2)
      if (norm(v[i + 1] - v[i]) == 0)
        return inf;
    const double a1 = direction(v[2], v[3]) - direction(v[0], v[1]);
    const double a2 = direction(v[6], v[7]) - direction(v[4], v[5]);
    return std::abs(wrap_half_pi(a1 - a2));
  }
  case Predicate::cyclic: {
    // rows (x, y, x^2 + y^2, 1) relative to the first point, so the 4x4
    // determinant collapses to a 3x3 one
    std::array<Coordinates, 3> q;
    for (int i = 0; i < 3; ++i)
      q[i] = (1.0 / scale) * (v[i + 1] - v[0]);
    auto sq = [](Coordinates c) { return dot(c, c); };
    return std::abs(det3(q[0].x, q[0].y, sq(q[0]), q[1].x, q[1].y, sq(q[1]),
                         q[2].x, q[2].y, sq(q[2])));
  }
  }
  return inf;
}

inline bool holds_numerically(Predicate p, std::span<const Coordinates> v,
                              double scale, double tol) {
  return residual(p, v, scale) <= tol;
}

inline bool holds_numerically(const Fact &f, const Diagram &d) {
  std::vector<Coordinates> v;
  v.reserve(f.points.size());
  for (const auto &p : f.points)
    v.push_back(d.at(p));
  if (v.size() != arity(f.predicate))
    return false;
  return holds_numerically(f.predicate, v, d.scale(), d.fact_tolerance);
}

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; platform independent,
// unlike std::uniform_real_distribution.
inline double unit_double(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

} // namespace detail

/// Computes positions for every point of `c`. Free points are sampled in the
/// unit square (or taken from hints); constructed points are computed from
/// their definitions. Degenerate draws are resampled.
inline Diagram realize(const Construction &c, std::uint64_t seed,
                       const RealizeOptions &opt = {}) {
  using namespace geom;
  validate(c);
  std::mt19937_64 rng(seed);
  bool random = false;
  for (const auto &s : c.steps)
    if ((s.kind == StepKind::free_point && !(opt.use_hints && s.hint)) ||
        s.kind == StepKind::point_on_line)
      random = true;

  Diagram d;
  d.seed = seed;
  d.labels = c.point_names();
  std::string failed_step;
  std::string why;

  for (int attempt = 0; attempt < opt.max_attempts; ++attempt) {
    d.positions.assign(c.steps.size(), {});
    auto pos = [&](const std::string &l) -> Coordinates & {
      auto it = std::find(d.labels.begin(), d.labels.end(), l);
      return d.positions[static_cast<std::size_t>(it - d.labels.begin())];
    };
    bool ok = true;
    for (std::size_t i = 0; i < c.steps.size() && ok; ++i) {
      const auto &s = c.steps[i];
      auto &out = d.positions[i];
      switch (s.kind) {
      case StepKind::free_point:
        if (opt.use_hints && s.hint) {
          out = *s.hint;
        } else {
          out.x = detail::unit_double(rng);
          out.y = detail::unit_double(rng);
        }
        break;
      case StepKind::midpoint:
        out = 0.5 * (pos(s.args[0]) + pos(s.args[1]));
        break;
      case StepKind::foot: {
        const auto a = pos(s.args[0]), b = pos(s.args[1]), cc = pos(s.args[2]);
        if (norm(cc - b) == 0) {
          ok = false;
          why = "the base line points coincide";
          break;
        }
        out = foot(a, b, cc);
        break;
      }
      case StepKind::intersect_ll: {
        const auto a = pos(s.args[0]), b = pos(s.args[1]);
        const auto p = pos(s.args[2]), q = pos(s.args[3]);
        const auto u = b - a, w = q - p;
        const double den = cross(u, w);
        if (std::abs(den) <= 1e-6 * norm(u) * norm(w) || norm(u) == 0 ||
            norm(w) == 0) {
          ok = false;
          why = "the lines are parallel";
          break;
        }
        out = a + (cross(p - a, w) / den) * u;
        break;
      }
      case StepKind::point_on_line: {
        const auto a = pos(s.args[0]), b = pos(s.args[1]);
        const double t = -0.5 + 2.0 * detail::unit_double(rng);
        out = a + t * (b - a);
        break;
      }
      }
      if (!ok)
        failed_step = s.defined;
    }
    if (ok) {
      // minimum separation in max-norm after normalising to the unit box
      double x0 = 0, x1 = 0, y0 = 0, y1 = 0;
      if (!d.positions.empty()) {
        x0 = x1 = d.positions[0].x;
        y0 = y1 = d.positions[0].y;
      }
      for (const auto &p : d.positions) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
      }
      const double extent = std::max({x1 - x0, y1 - y0, 1e-300});
      for (std::size_t i = 0; i < d.positions.size() && ok; ++i) {
        if (!std::isfinite(d.positions[i].x) ||
            !std::isfinite(d.positions[i].y)) {
          ok = false;
          failed_step = d.labels[i];
          why = "non-finite coordinates";
          break;
        }
        for (std::size_t j = 0; j < i; ++j) {
          const auto dd = d.positions[i] - d.positions[j];
          if (std::max(std::abs(dd.x), std::abs(dd.y)) / extent <
              opt.min_separation) {
            ok = false;
            failed_step = d.labels[i];
            why = "coincides with " + d.labels[j];
            break;
          }
        }
      }
    }
    if (ok)
      return d;
    if (!random)
      break;
  }
  throw DegenerateDiagram(failed_step, why);
}

/// Candidate properties that hold on `d` and on an independent realization,
/// minus the construction's own hypotheses; sorted.
inline std::vector<Fact> detect_properties(const Diagram &d,
                                           const Construction &c) {
  RealizeOptions other;
  other.use_hints = false;
  const Diagram d2 = realize(c, detail::mix_seed(d.seed ^ 0xD1A6u), other);
  const auto hyps = hypothesis_facts(c);

  auto labels = c.point_names();
  std::sort(labels.begin(), labels.end());
  const std::size_t n = labels.size();

  std::vector<Fact> out;
  auto consider = [&](Predicate p, std::vector<std::string> pts) {
    Fact f = canonical_fact(Fact{p, std::move(pts)});
    if (!holds_numerically(f, d) || !holds_numerically(f, d2))
      return;
    if (std::find(hyps.begin(), hyps.end(), f) != hyps.end())
      return;
    out.push_back(std::move(f));
  };
  auto collinear = [&](const std::string &a, const std::string &b,
                       const std::string &c3) {
    return holds_numerically(Fact{Predicate::coll, {a, b, c3}}, d) &&
           holds_numerically(Fact{Predicate::coll, {a, b, c3}}, d2);
  };

  std::vector<std::pair<std::string, std::string>> segs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      segs.emplace_back(labels[i], labels[j]);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        consider(Predicate::coll, {labels[i], labels[j], labels[k]});

  for (std::size_t m = 0; m < n; ++m)
    for (const auto &[a, b] : segs)
      if (a != labels[m] && b != labels[m])
        consider(Predicate::midp, {labels[m], a, b});

  for (std::size_t i = 0; i < segs.size(); ++i) {
    for (std::size_t j = i + 1; j < segs.size(); ++j) {
      const auto &[a, b] = segs[i];
      const auto &[p, q] = segs[j];
      const bool same_line = collinear(a, b, p) && collinear(a, b, q);
      if (!same_line)
        consider(Predicate::para, {a, b, p, q});
      consider(Predicate::perp, {a, b, p, q});
      consider(Predicate::cong, {a, b, p, q});
    }
  }

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k)
        for (std::size_t l = k + 1; l < n; ++l) {
          const auto &A = labels[i], &B = labels[j], &C = labels[k],
                     &D = labels[l];
          if (collinear(A, B, C) || collinear(A, B, D) || collinear(A, C, D) ||
              collinear(B, C, D))
            continue;
          consider(Predicate::cyclic, {A, B, C, D});
        }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

} // namespace gddx
