#pragma once
#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/diagram.hpp"
#include "gddx/fact_db.hpp"
#include "gddx/proof.hpp"
#include "gddx/rules.hpp"

namespace gddx {

struct SaturationLimits {
  std::size_t max_facts = 100000;
  int max_rounds = 64;
  std::chrono::milliseconds wall_clock{10000};
};

enum class LimitKind { facts, rounds, wall_clock };

inline const char *to_string(LimitKind k) {
  switch (k) {
  case LimitKind::facts:
    return "max_facts";
  case LimitKind::rounds:
    return "max_rounds";
  case LimitKind::wall_clock:
    return "wall_clock";
  }
  return "?";
}

/// A saturation limit tripped. Carries the database as it stood.
class LimitExceeded : public ResourceExceeded {
public:
  LimitExceeded(LimitKind kind, std::shared_ptr<const FactDb> partial)
      : ResourceExceeded(std::string("saturation limit exceeded: ") +
                         to_string(kind) + " (" +
                         std::to_string(partial->size()) + " facts)"),
        kind_(kind), partial_(std::move(partial)) {}
  LimitKind kind() const noexcept { return kind_; }
  const FactDb &partial() const noexcept { return *partial_; }

private:
  LimitKind kind_;
  std::shared_ptr<const FactDb> partial_;
};

/// Goal not in the saturated database.
struct NotProved {
  std::size_t fact_count = 0;
  bool numerically_true = false;
  bool false_on_diagram() const { return !numerically_true; }
};

namespace detail {

struct CompiledPattern {
  Predicate pred{};
  std::array<std::int8_t, 8> var{};
  std::size_t size() const { return arity(pred); }
};

struct CompiledRule {
  int index = 0;
  std::vector<CompiledPattern> antecedents;
  CompiledPattern consequent;
  std::vector<std::pair<int, int>> distinct;
};

using Binding = std::array<std::int16_t, 32>;

inline CompiledPattern compile(const Pattern &p,
                               std::vector<std::string> &vars) {
  CompiledPattern out{p.predicate, {}};
  for (std::size_t i = 0; i < p.vars.size(); ++i) {
    auto it = std::find(vars.begin(), vars.end(), p.vars[i]);
    if (it == vars.end()) {
      vars.push_back(p.vars[i]);
      it = vars.end() - 1;
    }
    out.var[i] = static_cast<std::int8_t>(it - vars.begin());
  }
  return out;
}

// P(X,Y), P(Y,Z) => P(X,Z) where X, Y, Z are disjoint variable groups of
// half the predicate's arity.
inline bool is_transitivity_rule(const Rule &r) {
  const auto p = r.consequent.predicate;
  if (p != Predicate::cong && p != Predicate::para && p != Predicate::eqangle)
    return false;
  if (r.antecedents.size() != 2 || r.antecedents[0].predicate != p ||
      r.antecedents[1].predicate != p || !r.distinct.empty())
    return false;
  const auto h = arity(p) / 2;
  const auto &a = r.antecedents[0].vars, &b = r.antecedents[1].vars,
             &c = r.consequent.vars;
  std::vector<std::string> all(a);
  all.insert(all.end(), b.begin() + static_cast<long>(h), b.end());
  auto sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    return false;
  for (std::size_t i = 0; i < h; ++i)
    if (b[i] != a[h + i] || c[i] != a[i] || c[h + i] != b[h + i])
      return false;
  return true;
}

class Saturator {
public:
  Saturator(const std::vector<Fact> &hyps, const RuleBase &rb,
            const Diagram &d, const SaturationLimits &lim,
            std::optional<Fact> stop_at)
      : lim_(lim), start_(std::chrono::steady_clock::now()) {
    std::vector<std::string> labels = d.labels;
    for (const auto &h : hyps)
      labels.insert(labels.end(), h.points.begin(), h.points.end());
    std::vector<FactDb::RuleLabel> rule_labels;
    std::array<std::optional<int>, 7> trans{};
    for (std::size_t i = 0; i < rb.rules.size(); ++i) {
      const auto &r = rb.rules[i];
      rule_labels.push_back({r.id, r.phrase_key});
      const auto pi = static_cast<std::size_t>(r.consequent.predicate);
      if (is_transitivity_rule(r) && !trans[pi]) {
        trans[pi] = static_cast<int>(i);
        continue;
      }
      std::vector<std::string> vars;
      CompiledRule cr;
      cr.index = static_cast<int>(i);
      for (const auto &a : r.antecedents)
        cr.antecedents.push_back(compile(a, vars));
      cr.consequent = compile(r.consequent, vars);
      if (vars.size() > std::tuple_size_v<Binding>)
        throw Error("rule '" + r.id + "' uses too many variables");
      for (const auto &[v, w] : r.distinct) {
        auto iv = std::find(vars.begin(), vars.end(), v) - vars.begin();
        auto iw = std::find(vars.begin(), vars.end(), w) - vars.begin();
        cr.distinct.emplace_back(static_cast<int>(iv), static_cast<int>(iw));
      }
      rules_.push_back(std::move(cr));
    }
    db_ = std::make_shared<FactDb>(labels, std::move(rule_labels), trans);

    positions_.resize(db_->labels().size());
    known_.resize(db_->labels().size(), false);
    for (std::size_t i = 0; i < db_->labels().size(); ++i) {
      if (d.has(db_->labels()[i])) {
        positions_[i] = d.at(db_->labels()[i]);
        known_[i] = true;
      }
    }
    scale_ = d.scale();
    tol_ = d.fact_tolerance;
    if (stop_at)
      goal_ = db_->to_atom(*stop_at);

    for (const auto &h : hyps) {
      auto a = db_->to_atom(canonical_fact(h));
      if (!a)
        throw MalformedFact("bad hypothesis " + to_string(h));
      db_->admit(*a, FactDb::hypothesis, {});
    }
  }

  std::shared_ptr<FactDb> run() {
    std::size_t delta_begin = 0;
    int round = 0;
    while (!goal_reached()) {
      const std::size_t delta_end = db_->size();
      if (delta_begin == delta_end)
        break;
      if (round >= lim_.max_rounds)
        trip(LimitKind::rounds);
      ++round;
      db_->set_rounds(round);
      for (const auto &r : rules_) {
        for (std::size_t i = 0; i < r.antecedents.size(); ++i) {
          apply(r, i, delta_begin, delta_end);
          if (goal_reached())
            break;
        }
        if (goal_reached())
          break;
      }
      delta_begin = delta_end;
    }
    return db_;
  }

private:
  SaturationLimits lim_;
  std::chrono::steady_clock::time_point start_;
  std::vector<CompiledRule> rules_;
  std::shared_ptr<FactDb> db_;
  std::vector<Coordinates> positions_;
  std::vector<bool> known_;
  double scale_ = 1, tol_ = 1e-6;
  std::optional<Atom> goal_;
  std::size_t ticks_ = 0;

  bool goal_reached() const { return goal_ && db_->index_of(*goal_); }

  [[noreturn]] void trip(LimitKind k) {
    throw LimitExceeded(k, std::shared_ptr<const FactDb>(db_));
  }

  void tick() {
    if ((++ticks_ & 0xfff) == 0 &&
        std::chrono::steady_clock::now() - start_ > lim_.wall_clock)
      trip(LimitKind::wall_clock);
  }

  // All extensions of `b` that map pattern `p` onto atom `a`, modulo the
  // predicate's symmetries. Duplicates are removed.
  static void unify(const CompiledPattern &p, const Atom &a, const Binding &b,
                    std::vector<Binding> &out) {
    out.clear();
    for (const auto &perm : symmetry_group(p.pred)) {
      Binding nb = b;
      bool ok = true;
      for (std::size_t i = 0; i < p.size() && ok; ++i) {
        const auto v = p.var[i];
        const auto x = static_cast<std::int16_t>(a.p[perm[i]]);
        if (nb[v] < 0)
          nb[v] = x;
        else
          ok = nb[v] == x;
      }
      if (ok && std::find(out.begin(), out.end(), nb) == out.end())
        out.push_back(nb);
    }
  }

  void apply(const CompiledRule &r, std::size_t pivot, std::size_t delta_begin,
             std::size_t delta_end) {
    Binding empty;
    empty.fill(-1);
    std::vector<std::size_t> used(r.antecedents.size());
    std::vector<Binding> found;
    const auto &pivot_pattern = r.antecedents[pivot];
    const auto &candidates = db_->with_predicate(pivot_pattern.pred);
    // Admissions append to the candidate lists, so walk them by position.
    auto j = static_cast<std::size_t>(
        std::lower_bound(candidates.begin(), candidates.end(), delta_begin) -
        candidates.begin());
    for (; j < candidates.size() && candidates[j] < delta_end; ++j) {
      tick();
      const auto idx = candidates[j];
      used[pivot] = idx;
      unify(pivot_pattern, db_->entry(idx).atom, empty, found);
      for (const auto &b : found)
        join(r, pivot, 0, b, used, delta_begin, delta_end);
    }
  }

  // Matches the remaining antecedents. Antecedents before the pivot range
  // over facts older than the delta; those after it over everything up to
  // the end of the delta, so each instantiation is tried exactly once.
  void join(const CompiledRule &r, std::size_t pivot, std::size_t k,
            const Binding &b, std::vector<std::size_t> &used,
            std::size_t delta_begin, std::size_t delta_end) {
    if (k == pivot)
      return join(r, pivot, k + 1, b, used, delta_begin, delta_end);
    if (k == r.antecedents.size())
      return fire(r, b, used);
    const auto &p = r.antecedents[k];
    const std::size_t limit = k < pivot ? delta_begin : delta_end;

    const std::vector<std::size_t> *cands = &db_->with_predicate(p.pred);
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (b[p.var[i]] < 0)
        continue;
      const auto &c =
          db_->with_point(p.pred, static_cast<PointId>(b[p.var[i]]));
      if (c.size() < cands->size())
        cands = &c;
    }
    std::vector<Binding> found;
    for (std::size_t j = 0; j < cands->size(); ++j) {
      const auto idx = (*cands)[j];
      if (idx >= limit)
        break;
      tick();
      unify(p, db_->entry(idx).atom, b, found);
      if (found.empty())
        continue;
      used[k] = idx;
      const auto local = found;
      for (const auto &nb : local)
        join(r, pivot, k + 1, nb, used, delta_begin, delta_end);
    }
  }

  void fire(const CompiledRule &r, const Binding &b,
            const std::vector<std::size_t> &used) {
    for (auto [v, w] : r.distinct)
      if (b[v] == b[w])
        return;
    Atom a{r.consequent.pred, {}};
    for (std::size_t i = 0; i < r.consequent.size(); ++i)
      a.p[i] = static_cast<PointId>(b[r.consequent.var[i]]);
    canonicalize(a.pred, a.points());
    if (db_->index_of(a) || degenerate(a) || !holds(a))
      return;
    db_->admit(a, r.index, used);
    if (db_->size() > lim_.max_facts)
      trip(LimitKind::facts);
  }

  bool holds(const Atom &a) const {
    std::array<Coordinates, 8> v;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!known_[a.p[i]])
        return false;
      v[i] = positions_[a.p[i]];
    }
    return holds_numerically(a.pred, std::span<const Coordinates>(v.data(), a.size()),
                             scale_, tol_);
  }

  bool collinear(PointId x, PointId y, PointId z) const {
    const std::array<Coordinates, 3> v{positions_[x], positions_[y],
                                       positions_[z]};
    return residual(Predicate::coll, v, scale_) <= tol_;
  }

  bool parallel_lines(PointId a, PointId b, PointId c, PointId d) const {
    const std::array<Coordinates, 4> v{positions_[a], positions_[b],
                                       positions_[c], positions_[d]};
    return residual(Predicate::para, v, scale_) <= tol_;
  }

  // Instantiations that are syntactically degenerate or say nothing.
  bool degenerate(const Atom &a) const {
    const auto &p = a.p;
    auto repeated = [&] {
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j)
          if (p[i] == p[j])
            return true;
      return false;
    };
    switch (a.pred) {
    case Predicate::coll:
    case Predicate::midp:
      return repeated();
    case Predicate::cyclic:
      return repeated() || collinear(p[0], p[1], p[2]) ||
             collinear(p[0], p[1], p[3]) || collinear(p[0], p[2], p[3]) ||
             collinear(p[1], p[2], p[3]);
    case Predicate::para:
    case Predicate::perp:
    case Predicate::cong:
      return p[0] == p[1] || p[2] == p[3] ||
             segment_key(p[0], p[1]) == segment_key(p[2], p[3]);
    case Predicate::eqangle: {
      for (int i = 0; i < 8; i += 2)
        if (p[i] == p[i + 1])
          return true;
      const auto l = [&](int i) { return segment_key(p[i], p[i + 1]); };
      if ((l(0) == l(4) && l(2) == l(6)) || (l(0) == l(6) && l(2) == l(4)))
        return true;
      return parallel_lines(p[0], p[1], p[2], p[3]) ||
             parallel_lines(p[4], p[5], p[6], p[7]);
    }
    }
    return false;
  }
};

} // namespace detail

/// Saturates `hyps` under `rb` with diagram filtering on `d`. Throws
/// LimitExceeded when a limit trips.
inline std::shared_ptr<FactDb> saturate(const std::vector<Fact> &hyps,
                                        const RuleBase &rb, const Diagram &d,
                                        const SaturationLimits &lim = {}) {
  return detail::Saturator(hyps, rb, d, lim, std::nullopt).run();
}

/// Justifications establishing `f`: for a fact obtained by closing a merge
/// class, the merges on the explanation path followed by the transitivity
/// step; otherwise the single step that produced `f`.
inline std::vector<Justification> explain(const FactDb &db, const Fact &f) {
  const auto idx = db.index_of(canonical_fact(f));
  if (!idx)
    throw FactNotDerived("fact not derived: " + to_string(f));
  std::vector<Justification> out;
  if (db.is_transitive_closure(*idx))
    for (auto a : db.entry(*idx).antecedents)
      out.push_back(db.justification(a));
  out.push_back(db.justification(*idx));
  return out;
}

/// All justifications needed to establish `f`, keyed by produced fact.
inline std::map<Fact, Justification> explain_all(const FactDb &db,
                                                 const Fact &f) {
  std::map<Fact, Justification> out;
  std::vector<Fact> todo{canonical_fact(f)};
  while (!todo.empty()) {
    auto cur = std::move(todo.back());
    todo.pop_back();
    if (out.count(cur))
      continue;
    for (auto &j : explain(db, cur)) {
      for (const auto &a : j.antecedents)
        if (!out.count(a))
          todo.push_back(a);
      out.emplace(j.produced, std::move(j));
    }
  }
  return out;
}

struct ProveOptions {
  SaturationLimits limits;
  RealizeOptions realize;
  /// Stop saturating as soon as the goal is derived.
  bool stop_at_goal = true;
};

using ProveOutcome = std::variant<ProofDag, NotProved>;

struct ProveRun {
  Diagram diagram;
  std::shared_ptr<const FactDb> db;
  ProveOutcome outcome;
};

/// Realizes, saturates and extracts. Keeps the diagram and database for
/// callers that want to inspect them.
inline ProveRun prove_run(const Construction &c, const Goal &g,
                          const RuleBase &rb, std::uint64_t seed,
                          const ProveOptions &opt = {}) {
  validate(c);
  const auto goal = canonical_fact(g.fact);
  for (const auto &p : goal.points)
    if (!c.defines(p))
      throw ConstructionError("goal uses undefined point '" + p + "'");
  auto d = realize(c, seed, opt.realize);
  auto db = detail::Saturator(hypothesis_facts(c), rb, d, opt.limits,
                              opt.stop_at_goal ? std::optional(goal)
                                               : std::nullopt)
                .run();
  ProveRun run{std::move(d), db, NotProved{}};
  if (db->contains(goal)) {
    const auto just = explain_all(*db, goal);
    run.outcome = extract(goal, [&](const Fact &f) -> const Justification & {
      return just.at(f);
    });
  } else {
    run.outcome = NotProved{db->size(), holds_numerically(goal, run.diagram)};
  }
  return run;
}

inline ProveOutcome prove(const Construction &c, const Goal &g,
                          const RuleBase &rb, std::uint64_t seed,
                          const SaturationLimits &lim = {}) {
  ProveOptions opt;
  opt.limits = lim;
  return prove_run(c, g, rb, seed, opt).outcome;
}

} // namespace gddx
