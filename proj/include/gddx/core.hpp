#pragma once
#include <algorithm>
#include <array>
#include <cctype>
#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gddx/errors.hpp"

namespace gddx {

//==============================================================================
// Predicates

enum class Predicate { coll, para, perp, midp, cong, eqangle, cyclic };

inline constexpr std::array<Predicate, 7> all_predicates{
    Predicate::coll, Predicate::para, Predicate::perp, Predicate::midp,
    Predicate::cong, Predicate::eqangle, Predicate::cyclic};

constexpr std::size_t arity(Predicate p) {
  switch (p) {
  case Predicate::coll:
  case Predicate::midp:
    return 3;
  case Predicate::para:
  case Predicate::perp:
  case Predicate::cong:
  case Predicate::cyclic:
    return 4;
  case Predicate::eqangle:
    return 8;
  }
  return 0;
}

constexpr std::string_view name_of(Predicate p) {
  switch (p) {
  case Predicate::coll:
    return "coll";
  case Predicate::para:
    return "para";
  case Predicate::perp:
    return "perp";
  case Predicate::midp:
    return "midp";
  case Predicate::cong:
    return "cong";
  case Predicate::eqangle:
    return "eqangle";
  case Predicate::cyclic:
    return "cyclic";
  }
  return "?";
}

inline std::optional<Predicate> predicate_from_name(std::string_view s) {
  for (auto p : all_predicates)
    if (name_of(p) == s)
      return p;
  return std::nullopt;
}

//==============================================================================
// Canonical forms
//
// Each predicate has a symmetry group acting on argument positions; the
// canonical representative is the lexicographic minimum of the orbit. The
// functions below compute it directly and are templated over the point type
// so the engine can use them on interned ids.

namespace detail {

template <class T> void sort_pair(std::span<T> s) {
  if (s[1] < s[0])
    std::swap(s[0], s[1]);
}

template <class T> void sort_two_pairs(std::span<T> s) {
  sort_pair(s.subspan(0, 2));
  sort_pair(s.subspan(2, 2));
  if (std::lexicographical_compare(s.begin() + 2, s.end(), s.begin(),
                                   s.begin() + 2)) {
    std::swap(s[0], s[2]);
    std::swap(s[1], s[3]);
  }
}

template <class T> void canonical_eqangle(std::span<T> s) {
  for (std::size_t i = 0; i < 8; i += 2)
    sort_pair(s.subspan(i, 2));
  // Four arrangements of the (already sorted) lines: identity, swap the
  // angles, swap lines inside both angles, and both.
  constexpr std::array<std::array<int, 4>, 4> arrangements{
      {{0, 1, 2, 3}, {2, 3, 0, 1}, {1, 0, 3, 2}, {3, 2, 1, 0}}};
  std::array<T, 8> best{};
  bool have = false;
  for (const auto &arr : arrangements) {
    std::array<T, 8> cand{};
    for (int l = 0; l < 4; ++l) {
      cand[2 * l] = s[2 * arr[l]];
      cand[2 * l + 1] = s[2 * arr[l] + 1];
    }
    if (!have || cand < best) {
      best = cand;
      have = true;
    }
  }
  std::copy(best.begin(), best.end(), s.begin());
}

} // namespace detail

/// Rewrites `pts` in place into the canonical representative of its symmetry
/// class under predicate `p`. `pts.size()` must equal `arity(p)`.
template <class T> void canonicalize(Predicate p, std::span<T> pts) {
  switch (p) {
  case Predicate::coll:
  case Predicate::cyclic:
    std::sort(pts.begin(), pts.end());
    break;
  case Predicate::midp:
    detail::sort_pair(pts.subspan(1, 2));
    break;
  case Predicate::para:
  case Predicate::perp:
  case Predicate::cong:
    detail::sort_two_pairs(pts);
    break;
  case Predicate::eqangle:
    detail::canonical_eqangle(pts);
    break;
  }
}

/// Generators of each predicate's symmetry group, as position permutations:
/// the permuted tuple is `out[i] = in[perm[i]]`.
inline std::vector<std::vector<int>> symmetry_generators(Predicate p) {
  switch (p) {
  case Predicate::coll:
    return {{1, 0, 2}, {0, 2, 1}};
  case Predicate::cyclic:
    return {{1, 0, 2, 3}, {0, 2, 1, 3}, {0, 1, 3, 2}};
  case Predicate::midp:
    return {{0, 2, 1}};
  case Predicate::para:
  case Predicate::perp:
  case Predicate::cong:
    return {{1, 0, 2, 3}, {0, 1, 3, 2}, {2, 3, 0, 1}};
  case Predicate::eqangle:
    return {{1, 0, 2, 3, 4, 5, 6, 7}, {0, 1, 3, 2, 4, 5, 6, 7},
            {0, 1, 2, 3, 5, 4, 6, 7}, {0, 1, 2, 3, 4, 5, 7, 6},
            {4, 5, 6, 7, 0, 1, 2, 3}, {2, 3, 0, 1, 6, 7, 4, 5}};
  }
  return {};
}

/// The full symmetry group generated by `symmetry_generators(p)`.
inline const std::vector<std::vector<int>> &symmetry_group(Predicate p) {
  static const auto groups = [] {
    std::array<std::vector<std::vector<int>>, 7> out;
    for (auto pred : all_predicates) {
      const auto n = arity(pred);
      std::vector<int> id(n);
      for (std::size_t i = 0; i < n; ++i)
        id[i] = static_cast<int>(i);
      std::vector<std::vector<int>> group{id};
      const auto gens = symmetry_generators(pred);
      for (std::size_t k = 0; k < group.size(); ++k) {
        for (const auto &g : gens) {
          std::vector<int> next(n);
          for (std::size_t i = 0; i < n; ++i)
            next[i] = group[k][g[i]];
          if (std::find(group.begin(), group.end(), next) == group.end())
            group.push_back(next);
        }
      }
      out[static_cast<std::size_t>(pred)] = std::move(group);
    }
    return out;
  }();
  return groups[static_cast<std::size_t>(p)];
}

//==============================================================================
// Facts

struct Fact {
  Predicate predicate{};
  std::vector<std::string> points;

  auto operator<=>(const Fact &) const = default;
  bool operator==(const Fact &) const = default;
};

/// `cyclic(D,E,F,G)`
inline std::string to_string(const Fact &f) {
  std::string out(name_of(f.predicate));
  out += '(';
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    if (i)
      out += ',';
    out += f.points[i];
  }
  out += ')';
  return out;
}

/// `cyclic D E F G`, the form used on goal lines and the command line.
inline std::string to_statement(const Fact &f) {
  std::string out(name_of(f.predicate));
  for (const auto &p : f.points)
    out += ' ' + p;
  return out;
}

inline Fact canonical_fact(Fact raw) {
  if (raw.points.size() != arity(raw.predicate))
    throw MalformedFact(std::string(name_of(raw.predicate)) + " takes " +
                        std::to_string(arity(raw.predicate)) +
                        " points, got " + std::to_string(raw.points.size()));
  canonicalize(raw.predicate, std::span<std::string>(raw.points));
  return raw;
}

inline bool is_point_label(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0])))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
  });
}

/// Parses `cyclic D E F G`, `cyclic(D,E,F,G)` or `cyclic(D, E, F, G)` into a
/// canonical fact. Throws MalformedFact on anything else.
inline Fact parse_fact(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char c : text) {
    if (c == '(' || c == ')' || c == ',' ||
        std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty())
        words.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty())
    words.push_back(std::move(cur));
  if (words.empty())
    throw MalformedFact("empty fact");
  auto pred = predicate_from_name(words.front());
  if (!pred)
    throw MalformedFact("unknown predicate '" + words.front() + "'");
  Fact f{*pred, {words.begin() + 1, words.end()}};
  for (const auto &p : f.points)
    if (!is_point_label(p))
      throw MalformedFact("invalid point label '" + p + "'");
  return canonical_fact(std::move(f));
}

//==============================================================================
// Constructions

enum class StepKind { free_point, midpoint, foot, intersect_ll, point_on_line };

constexpr std::size_t arity(StepKind k) {
  switch (k) {
  case StepKind::free_point:
    return 0;
  case StepKind::midpoint:
  case StepKind::point_on_line:
    return 2;
  case StepKind::foot:
    return 3;
  case StepKind::intersect_ll:
    return 4;
  }
  return 0;
}

struct Coordinates {
  double x = 0;
  double y = 0;
  bool operator==(const Coordinates &) const = default;
};

struct ConstructionStep {
  StepKind kind{};
  std::string defined;
  std::vector<std::string> args;
  /// Only meaningful for free points: a position to use instead of sampling.
  std::optional<Coordinates> hint;

  bool operator==(const ConstructionStep &) const = default;
};

enum class GoalSource { declared_in_script, user_selected };

struct Goal {
  Fact fact;
  GoalSource source = GoalSource::declared_in_script;
  bool operator==(const Goal &) const = default;
};

struct Construction {
  std::vector<ConstructionStep> steps;
  std::vector<Goal> goals;

  bool operator==(const Construction &) const = default;

  bool defines(std::string_view label) const {
    return std::any_of(steps.begin(), steps.end(),
                       [&](const auto &s) { return s.defined == label; });
  }
  std::vector<std::string> point_names() const {
    std::vector<std::string> out;
    out.reserve(steps.size());
    for (const auto &s : steps)
      out.push_back(s.defined);
    return out;
  }
};

/// Checks the structural invariants of a single step against the labels
/// defined before it; returns an error message or an empty string.
inline std::string check_step(const ConstructionStep &s,
                              std::span<const std::string> earlier) {
  auto known = [&](const std::string &l) {
    return std::find(earlier.begin(), earlier.end(), l) != earlier.end();
  };
  if (!is_point_label(s.defined))
    return "invalid point label '" + s.defined + "'";
  if (known(s.defined))
    return "duplicate label '" + s.defined + "'";
  if (s.args.size() != arity(s.kind))
    return "wrong number of arguments";
  for (const auto &a : s.args)
    if (!known(a))
      return "point '" + a + "' used before definition";
  switch (s.kind) {
  case StepKind::midpoint:
  case StepKind::point_on_line:
    if (s.args[0] == s.args[1])
      return "segment endpoints must differ";
    break;
  case StepKind::foot:
    if (s.args[1] == s.args[2])
      return "foot needs two distinct line points";
    break;
  case StepKind::intersect_ll: {
    if (s.args[0] == s.args[1] || s.args[2] == s.args[3])
      return "line points must differ";
    std::array<std::string, 2> l1{s.args[0], s.args[1]};
    std::array<std::string, 2> l2{s.args[2], s.args[3]};
    std::sort(l1.begin(), l1.end());
    std::sort(l2.begin(), l2.end());
    if (l1 == l2)
      return "intersect needs two different lines";
    break;
  }
  case StepKind::free_point:
    break;
  }
  return {};
}

/// Throws ConstructionError if `c` violates an ordering or arity invariant.
inline void validate(const Construction &c) {
  std::vector<std::string> seen;
  for (const auto &s : c.steps) {
    if (auto msg = check_step(s, seen); !msg.empty())
      throw ConstructionError(s.defined + ": " + msg);
    seen.push_back(s.defined);
  }
  for (const auto &g : c.goals) {
    if (g.fact.points.size() != arity(g.fact.predicate))
      throw MalformedFact("goal " + to_string(g.fact) + " has wrong arity");
    for (const auto &p : g.fact.points)
      if (std::find(seen.begin(), seen.end(), p) == seen.end())
        throw ConstructionError("goal references undefined point '" + p +
                                "'");
  }
}

/// The facts asserted by the construction steps themselves, in step order.
inline std::vector<Fact> hypothesis_facts(const Construction &c) {
  std::vector<Fact> out;
  auto emit = [&](Predicate p, std::vector<std::string> pts) {
    auto f = canonical_fact(Fact{p, std::move(pts)});
    if (std::find(out.begin(), out.end(), f) == out.end())
      out.push_back(std::move(f));
  };
  for (const auto &s : c.steps) {
    const auto &a = s.args;
    const auto &p = s.defined;
    switch (s.kind) {
    case StepKind::free_point:
      break;
    case StepKind::midpoint:
      emit(Predicate::midp, {p, a[0], a[1]});
      break;
    case StepKind::foot:
      emit(Predicate::perp, {a[0], p, a[1], a[2]});
      emit(Predicate::coll, {p, a[1], a[2]});
      break;
    case StepKind::intersect_ll:
      emit(Predicate::coll, {p, a[0], a[1]});
      emit(Predicate::coll, {p, a[2], a[3]});
      break;
    case StepKind::point_on_line:
      emit(Predicate::coll, {p, a[0], a[1]});
      break;
    }
  }
  return out;
}

} // namespace gddx
