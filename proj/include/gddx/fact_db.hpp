#pragma once
#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/union_find.hpp"

namespace gddx {

inline constexpr std::string_view hypothesis_rule_id = "hypothesis";
inline constexpr std::string_view hypothesis_phrase = "by HYP";

/// Why one fact holds: the rule applied, the instantiated antecedents and the
/// produced fact. Hypotheses use rule id "hypothesis" and no antecedents.
struct Justification {
  std::string rule_id;
  std::string phrase_key;
  std::vector<Fact> antecedents;
  Fact produced;

  bool is_hypothesis() const { return rule_id == hypothesis_rule_id; }
  bool operator==(const Justification &) const = default;
};

using PointId = std::uint8_t;

/// A fact over interned point ids. Ids are assigned in label order, so the
/// canonical form of an atom matches the canonical form of its Fact.
struct Atom {
  Predicate pred{};
  std::array<PointId, 8> p{};

  std::size_t size() const { return arity(pred); }
  std::span<PointId> points() { return {p.data(), size()}; }
  std::span<const PointId> points() const { return {p.data(), size()}; }
  bool operator==(const Atom &) const = default;
};

struct AtomHash {
  std::size_t operator()(const Atom &a) const noexcept {
    std::uint64_t h = static_cast<std::uint64_t>(a.pred) + 1;
    for (auto x : a.p)
      h = h * 1099511628211ull ^ x;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

using SegmentKey = std::uint16_t;
using AngleKey = std::uint32_t;

inline SegmentKey segment_key(PointId a, PointId b) {
  if (b < a)
    std::swap(a, b);
  return static_cast<SegmentKey>(a << 8 | b);
}
inline AngleKey angle_key(SegmentKey a, SegmentKey b) {
  return static_cast<AngleKey>(a) << 16 | b;
}

/// The saturated (or saturating) fact database.
///
/// Every atomic fact is stored once, in insertion order, with exactly one
/// justification whose antecedents have smaller indices. Congruent segments,
/// parallel segments and equal angles additionally live in merge structures
/// with an explanation forest; when a rule base declares a transitivity rule
/// for one of those predicates, the database closes the class on every merge
/// and labels the implied facts with that rule.
class FactDb {
public:
  static constexpr int hypothesis = -1;

  struct RuleLabel {
    std::string id;
    std::string phrase_key;
  };

  struct Entry {
    Atom atom;
    int rule = hypothesis;
    std::vector<std::size_t> antecedents;
  };

  FactDb() = default;
  FactDb(std::vector<std::string> labels, std::vector<RuleLabel> rules,
         std::array<std::optional<int>, 7> transitivity = {})
      : labels_(std::move(labels)), rules_(std::move(rules)),
        transitivity_(transitivity) {
    std::sort(labels_.begin(), labels_.end());
    labels_.erase(std::unique(labels_.begin(), labels_.end()), labels_.end());
    if (labels_.size() > 255)
      throw Error("too many points (at most 255 supported)");
    by_point_.resize(7);
    for (auto &v : by_point_)
      v.resize(labels_.size());
  }

  //--------------------------------------------------------------------------
  // Public queries

  std::size_t size() const { return entries_.size(); }
  const std::vector<std::string> &labels() const { return labels_; }
  int rounds() const { return rounds_; }

  bool contains(const Fact &f) const { return index_of(f).has_value(); }

  std::optional<std::size_t> index_of(const Fact &f) const {
    auto a = to_atom(f);
    if (!a)
      return std::nullopt;
    return index_of(*a);
  }

  Fact fact(std::size_t i) const { return to_fact(entries_.at(i).atom); }

  std::vector<Fact> facts() const {
    std::vector<Fact> out;
    out.reserve(entries_.size());
    for (const auto &e : entries_)
      out.push_back(to_fact(e.atom));
    return out;
  }

  Justification justification(std::size_t i) const {
    const auto &e = entries_.at(i);
    Justification j;
    if (e.rule == hypothesis) {
      j.rule_id = hypothesis_rule_id;
      j.phrase_key = hypothesis_phrase;
    } else {
      j.rule_id = rules_.at(static_cast<std::size_t>(e.rule)).id;
      j.phrase_key = rules_.at(static_cast<std::size_t>(e.rule)).phrase_key;
    }
    for (auto a : e.antecedents)
      j.antecedents.push_back(to_fact(entries_[a].atom));
    j.produced = to_fact(e.atom);
    return j;
  }

  /// True when fact `i` was produced by closing a merge class.
  bool is_transitive_closure(std::size_t i) const {
    const auto &e = entries_.at(i);
    if (e.rule == hypothesis)
      return false;
    const auto &t = transitivity_[static_cast<std::size_t>(e.atom.pred)];
    return t && *t == e.rule;
  }

  /// Maximal sets of pairwise collinear points (lines with >= 3 points).
  std::vector<std::vector<std::string>> lines() const {
    return point_sets(Predicate::coll, 2);
  }
  /// Maximal sets of concyclic points (circles with >= 4 points).
  std::vector<std::vector<std::string>> circles() const {
    return point_sets(Predicate::cyclic, 3);
  }
  /// Segment classes under parallelism (directions).
  std::vector<std::vector<std::string>> directions() const {
    return segment_classes(para_);
  }
  /// Segment classes under congruence.
  std::vector<std::vector<std::string>> congruence_classes() const {
    return segment_classes(cong_);
  }

  //--------------------------------------------------------------------------
  // Atom-level interface used by the saturation engine

  const Entry &entry(std::size_t i) const { return entries_[i]; }
  const std::vector<std::size_t> &with_predicate(Predicate p) const {
    return by_pred_[static_cast<std::size_t>(p)];
  }
  const std::vector<std::size_t> &with_point(Predicate p, PointId x) const {
    return by_point_[static_cast<std::size_t>(p)][x];
  }
  std::optional<std::size_t> index_of(const Atom &a) const {
    auto it = index_.find(a);
    if (it == index_.end())
      return std::nullopt;
    return it->second;
  }
  const std::optional<int> &transitivity_rule(Predicate p) const {
    return transitivity_[static_cast<std::size_t>(p)];
  }
  void set_rounds(int r) { rounds_ = r; }

  /// Adds a canonical atom. Returns false if already present. Merges and
  /// class closure happen immediately.
  bool admit(const Atom &a, int rule, std::vector<std::size_t> antecedents) {
    if (index_.count(a))
      return false;
    const auto id = push(a, rule, std::move(antecedents));
    close_classes(id);
    return true;
  }

  std::optional<Atom> to_atom(const Fact &f) const {
    if (f.points.size() != arity(f.predicate))
      return std::nullopt;
    Atom a;
    a.pred = f.predicate;
    for (std::size_t i = 0; i < f.points.size(); ++i) {
      auto it = std::lower_bound(labels_.begin(), labels_.end(), f.points[i]);
      if (it == labels_.end() || *it != f.points[i])
        return std::nullopt;
      a.p[i] = static_cast<PointId>(it - labels_.begin());
    }
    canonicalize(a.pred, a.points());
    return a;
  }

  Fact to_fact(const Atom &a) const {
    Fact f{a.pred, {}};
    for (auto x : a.points())
      f.points.push_back(labels_[x]);
    return f;
  }

private:
  using Classes = ExplainedClasses<std::uint32_t, std::size_t>;

  std::vector<std::string> labels_;
  std::vector<RuleLabel> rules_;
  std::array<std::optional<int>, 7> transitivity_{};
  std::vector<Entry> entries_;
  std::unordered_map<Atom, std::size_t, AtomHash> index_;
  std::array<std::vector<std::size_t>, 7> by_pred_;
  std::vector<std::vector<std::vector<std::size_t>>> by_point_;
  Classes cong_, para_, angles_;
  int rounds_ = 0;

  std::size_t push(const Atom &a, int rule, std::vector<std::size_t> ants) {
    const auto id = entries_.size();
    entries_.push_back(Entry{a, rule, std::move(ants)});
    index_.emplace(a, id);
    const auto pi = static_cast<std::size_t>(a.pred);
    by_pred_[pi].push_back(id);
    std::array<bool, 256> seen{};
    for (auto x : a.points()) {
      if (seen[x])
        continue;
      seen[x] = true;
      by_point_[pi][x].push_back(id);
    }
    return id;
  }

  // Merges the two halves of a binary-relation fact and materialises every
  // fact the merge implies, labelled with the predicate's transitivity rule.
  void close_classes(std::size_t first) {
    std::vector<std::size_t> work{first};
    while (!work.empty()) {
      const auto id = work.back();
      work.pop_back();
      const Atom a = entries_[id].atom;
      const auto &trans = transitivity_[static_cast<std::size_t>(a.pred)];
      if (!trans)
        continue;
      switch (a.pred) {
      case Predicate::cong:
      case Predicate::para: {
        auto &cls = a.pred == Predicate::cong ? cong_ : para_;
        const auto s1 = segment_key(a.p[0], a.p[1]);
        const auto s2 = segment_key(a.p[2], a.p[3]);
        for (auto [u, v] : cls.merge(s1, s2, id)) {
          if (u == s1 && v == s2)
            continue;
          Atom b{a.pred, {}};
          b.p = {PointId(u >> 8), PointId(u & 0xff), PointId(v >> 8),
                 PointId(v & 0xff)};
          canonicalize(b.pred, b.points());
          if (index_.count(b))
            continue;
          work.push_back(push(b, *trans, cls.explain(u, v)));
        }
        break;
      }
      case Predicate::eqangle: {
        const auto l = [&](int i) { return segment_key(a.p[i], a.p[i + 1]); };
        const auto x = angle_key(l(0), l(2)), y = angle_key(l(4), l(6));
        const auto rx = angle_key(l(2), l(0)), ry = angle_key(l(6), l(4));
        auto fresh = angles_.merge(x, y, id);
        auto fresh_rev = angles_.merge(rx, ry, id);
        fresh.insert(fresh.end(), fresh_rev.begin(), fresh_rev.end());
        for (auto [u, v] : fresh) {
          if ((u == x && v == y) || (u == rx && v == ry))
            continue;
          Atom b{a.pred, {}};
          const std::array<SegmentKey, 4> segs{
              SegmentKey(u >> 16), SegmentKey(u & 0xffff),
              SegmentKey(v >> 16), SegmentKey(v & 0xffff)};
          for (int i = 0; i < 4; ++i) {
            b.p[2 * i] = PointId(segs[i] >> 8);
            b.p[2 * i + 1] = PointId(segs[i] & 0xff);
          }
          canonicalize(b.pred, b.points());
          if (index_.count(b) || trivial_angle_pair(b))
            continue;
          work.push_back(push(b, *trans, angles_.explain(u, v)));
        }
        break;
      }
      default:
        break;
      }
    }
  }

  static bool trivial_angle_pair(const Atom &b) {
    const auto l = [&](int i) { return segment_key(b.p[i], b.p[i + 1]); };
    return (l(0) == l(4) && l(2) == l(6)) || (l(0) == l(6) && l(2) == l(4)) ||
           l(0) == l(2) || l(4) == l(6);
  }

  std::vector<std::vector<std::string>> point_sets(Predicate p,
                                                   std::size_t shared) const {
    std::vector<std::vector<PointId>> sets;
    for (auto id : by_pred_[static_cast<std::size_t>(p)]) {
      const auto pts = entries_[id].atom.points();
      std::vector<PointId> cur(pts.begin(), pts.end());
      bool merged = true;
      while (merged) {
        merged = false;
        for (auto it = sets.begin(); it != sets.end(); ++it) {
          std::size_t common = 0;
          for (auto x : cur)
            common += std::count(it->begin(), it->end(), x);
          if (common >= shared) {
            for (auto x : *it)
              if (std::find(cur.begin(), cur.end(), x) == cur.end())
                cur.push_back(x);
            sets.erase(it);
            merged = true;
            break;
          }
        }
      }
      sets.push_back(std::move(cur));
    }
    std::vector<std::vector<std::string>> out;
    for (auto &s : sets) {
      std::sort(s.begin(), s.end());
      std::vector<std::string> names;
      for (auto x : s)
        names.push_back(labels_[x]);
      out.push_back(std::move(names));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<std::vector<std::string>>
  segment_classes(const Classes &cls) const {
    std::vector<std::vector<std::string>> out;
    for (const auto &c : cls.classes()) {
      std::vector<std::string> names;
      for (auto k : c)
        names.push_back(labels_[k >> 8] + labels_[k & 0xff]);
      std::sort(names.begin(), names.end());
      out.push_back(std::move(names));
    }
    std::sort(out.begin(), out.end());
    return out;
  }
};

} // namespace gddx
