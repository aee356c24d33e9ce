#include <gtest/gtest.h>

#include <map>
#include <queue>
#include <random>
#include <set>

#include "gddx/engine.hpp"
#include "gddx/union_find.hpp"
#include "support.hpp"

using namespace gddx;

namespace {

Fact F(const char *s) { return parse_fact(s); }

std::shared_ptr<FactDb> saturate_fixture(const std::string &name,
                                         std::uint64_t seed,
                                         const SaturationLimits &lim = {}) {
  const auto c = test::construction(name);
  return saturate(hypothesis_facts(c), test::baseline(), realize(c, seed), lim);
}

// O at the origin and P0..P{n-1} on the unit circle, so every segment OPi
// has the same length.
Construction spokes(int n) {
  std::string text = "point O 0 0\n";
  for (int i = 0; i < n; ++i) {
    const double t = 0.3 + i * 0.7;
    text += "point P" + std::to_string(i) + " " + detail::format_double(std::cos(t)) +
            " " + detail::format_double(std::sin(t)) + "\n";
  }
  return parse_gcs(text);
}

Fact spoke_cong(int i, int j) {
  return canonical_fact(Fact{Predicate::cong,
                             {"O", "P" + std::to_string(i), "O",
                              "P" + std::to_string(j)}});
}

std::vector<std::string> segment_of(const Fact &f, int half) {
  return {f.points[2 * half], f.points[2 * half + 1]};
}

// Shortest number of hypothesis edges between two spokes, by BFS.
int bfs_distance(const std::vector<std::pair<int, int>> &edges, int n, int a,
                 int b) {
  std::vector<int> dist(n, -1);
  std::queue<int> q;
  dist[a] = 0;
  q.push(a);
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (auto [x, y] : edges)
      for (auto [s, t] : {std::pair{x, y}, std::pair{y, x}})
        if (s == u && dist[t] < 0) {
          dist[t] = dist[u] + 1;
          q.push(t);
        }
  }
  return dist[b];
}

const char *cong_only_rules = "rule cong_trans\n"
                              "given cong(a,b,c,d), cong(c,d,e,f)\n"
                              "conclude cong(a,b,e,f)\n"
                              "phrase equal segments are transitive\n";

} // namespace

TEST(Saturate, MidpointConsequences) {
  const auto c = parse_gcs("point A\npoint B\nmidpoint M A B\n");
  const auto db =
      saturate(hypothesis_facts(c), test::baseline(), realize(c, 0));
  for (const auto *f : {"cong M A M B", "coll M A B"}) {
    ASSERT_TRUE(db->contains(F(f))) << f;
    const auto chain = explain(*db, F(f));
    ASSERT_EQ(chain.size(), 1u);
    EXPECT_FALSE(chain[0].is_hypothesis());
    EXPECT_EQ(chain[0].antecedents, std::vector<Fact>{F("midp M A B")});
    EXPECT_EQ(chain[0].produced, F(f));
  }
  EXPECT_EQ(explain(*db, F("cong M A M B"))[0].rule_id, "midp_cong");
  EXPECT_EQ(explain(*db, F("coll M A B"))[0].rule_id, "midp_coll");
}

TEST(Saturate, NinePointReachesCyclic) {
  EXPECT_TRUE(saturate_fixture("ninepoint.gcs", 0)->contains(F("cyclic D E F G")));
}

TEST(Saturate, GenericTriangleNeverGetsIsoscelesSides) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    EXPECT_FALSE(saturate_fixture("scalene.gcs", seed)->contains(F("cong A B A C")));
    EXPECT_FALSE(
        saturate_fixture("ninepoint.gcs", seed)->contains(F("cong A B A C")));
  }
}

// Every fact in the saturated database holds on the witness diagram.
TEST(Saturate, DiagramSoundnessOverSeeds) {
  for (const auto *name : {"ninepoint.gcs", "midline.gcs", "right_median.gcs",
                           "isosceles.gcs", "varignon.gcs"}) {
    const auto c = test::construction(name);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto d = realize(c, seed);
      const auto db = saturate(hypothesis_facts(c), test::baseline(), d);
      for (const auto &f : db->facts())
        ASSERT_TRUE(holds_numerically(f, d)) << name << " " << to_string(f);
    }
  }
}

TEST(Saturate, JustificationsAreWellFounded) {
  for (const auto *name : {"ninepoint.gcs", "varignon.gcs", "isosceles.gcs"}) {
    const auto db = saturate_fixture(name, 3);
    for (std::size_t i = 0; i < db->size(); ++i) {
      const auto j = db->justification(i);
      ASSERT_EQ(j.produced, db->fact(i));
      if (j.is_hypothesis()) {
        ASSERT_TRUE(j.antecedents.empty());
        ASSERT_EQ(j.phrase_key, "by HYP");
      }
      for (const auto &a : j.antecedents) {
        const auto ai = db->index_of(a);
        ASSERT_TRUE(ai.has_value()) << to_string(a);
        ASSERT_LT(*ai, i) << to_string(j.produced);
      }
    }
  }
}

TEST(Saturate, FactsAreCanonicalAndUnique) {
  const auto db = saturate_fixture("ninepoint.gcs", 1);
  const auto facts = db->facts();
  std::set<Fact> seen;
  for (const auto &f : facts) {
    ASSERT_EQ(canonical_fact(f), f);
    ASSERT_TRUE(seen.insert(f).second) << to_string(f);
  }
}

TEST(Saturate, Deterministic) {
  for (const auto *name : {"ninepoint.gcs", "varignon.gcs"}) {
    const auto a = saturate_fixture(name, 4), b = saturate_fixture(name, 4);
    ASSERT_EQ(a->size(), b->size());
    for (std::size_t i = 0; i < a->size(); ++i) {
      const auto ja = a->justification(i), jb = b->justification(i);
      ASSERT_EQ(ja.produced, jb.produced);
      ASSERT_EQ(ja.rule_id, jb.rule_id);
      ASSERT_EQ(ja.antecedents, jb.antecedents);
    }
  }
}

// Re-saturating a fixed point with its own facts as input adds nothing.
TEST(Saturate, FixedPointAddsNothing) {
  const auto c = test::construction("ninepoint.gcs");
  const auto d = realize(c, 2);
  const auto db = saturate(hypothesis_facts(c), test::baseline(), d);
  const auto again = saturate(db->facts(), test::baseline(), d);
  EXPECT_EQ(again->size(), db->size());
  std::set<Fact> a, b;
  for (const auto &f : db->facts())
    a.insert(f);
  for (const auto &f : again->facts())
    b.insert(f);
  EXPECT_EQ(a, b);
}

TEST(Saturate, StructuresAreClosureConsistent) {
  const auto db = saturate_fixture("ninepoint.gcs", 0);
  ASSERT_FALSE(db->lines().empty());
  for (const auto &line : db->lines())
    for (std::size_t i = 0; i < line.size(); ++i)
      for (std::size_t j = i + 1; j < line.size(); ++j)
        for (std::size_t k = j + 1; k < line.size(); ++k)
          ASSERT_TRUE(db->contains(canonical_fact(
              Fact{Predicate::coll, {line[i], line[j], line[k]}})));
  for (const auto &circle : db->circles())
    ASSERT_GE(circle.size(), 4u);
  for (const auto &cls : db->congruence_classes())
    for (std::size_t i = 0; i < cls.size(); ++i)
      for (std::size_t j = i + 1; j < cls.size(); ++j) {
        // fixture labels are single letters, so segment names split evenly
        std::vector<std::string> p;
        for (const auto &seg : {cls[i], cls[j]})
          for (char ch : seg)
            p.emplace_back(1, ch);
        ASSERT_TRUE(db->contains(canonical_fact(Fact{Predicate::cong, p})));
      }
}

TEST(Saturate, FactLimit) {
  SaturationLimits lim;
  lim.max_facts = 10;
  try {
    saturate_fixture("ninepoint.gcs", 0, lim);
    FAIL() << "no limit";
  } catch (const LimitExceeded &e) {
    EXPECT_EQ(e.kind(), LimitKind::facts);
    EXPECT_GT(e.partial().size(), 5u);
    EXPECT_NE(std::string(e.what()).find("max_facts"), std::string::npos);
  }
}

TEST(Saturate, RoundLimit) {
  SaturationLimits lim;
  lim.max_rounds = 1;
  try {
    saturate_fixture("ninepoint.gcs", 0, lim);
    FAIL() << "no limit";
  } catch (const LimitExceeded &e) {
    EXPECT_EQ(e.kind(), LimitKind::rounds);
    EXPECT_EQ(e.partial().rounds(), 1);
  }
}

TEST(Saturate, WallClockLimit) {
  SaturationLimits lim;
  lim.wall_clock = std::chrono::milliseconds(0);
  try {
    saturate_fixture("ninepoint.gcs", 0, lim);
    FAIL() << "no limit";
  } catch (const LimitExceeded &e) {
    EXPECT_EQ(e.kind(), LimitKind::wall_clock);
  }
}

TEST(Explain, HypothesisIsSingleStep) {
  const auto db = saturate_fixture("ninepoint.gcs", 0);
  const auto chain = explain(*db, F("midp E B C"));
  ASSERT_EQ(chain.size(), 1u);
  EXPECT_TRUE(chain[0].is_hypothesis());
  EXPECT_EQ(chain[0].rule_id, "hypothesis");
}

TEST(Explain, UnknownFactThrows) {
  const auto db = saturate_fixture("ninepoint.gcs", 0);
  EXPECT_THROW(explain(*db, F("cong A B A C")), FactNotDerived);
}

TEST(Explain, TwoMergesAndTransitivity) {
  const auto c = spokes(3);
  const auto d = realize(c, 0);
  const auto db = saturate({spoke_cong(0, 1), spoke_cong(1, 2)},
                           test::baseline(), d);
  const auto chain = explain(*db, spoke_cong(0, 2));
  ASSERT_EQ(chain.size(), 3u);
  EXPECT_TRUE(chain[0].is_hypothesis());
  EXPECT_TRUE(chain[1].is_hypothesis());
  const std::set<Fact> merges{chain[0].produced, chain[1].produced};
  EXPECT_EQ(merges, (std::set<Fact>{spoke_cong(0, 1), spoke_cong(1, 2)}));
  EXPECT_EQ(chain[2].rule_id, "cong_trans");
  EXPECT_EQ(chain[2].phrase_key, test::baseline().find("cong_trans")->phrase_key);
  EXPECT_EQ(chain[2].produced, spoke_cong(0, 2));
}

// Random merges: the antecedents of an implied cong fact form a path of
// merges joining its two segments; the path is never shorter than the BFS
// distance over all asserted merges.
TEST(Explain, MergePathsAgainstBreadthFirstSearch) {
  const int n = 9;
  const auto c = spokes(n);
  const auto d = realize(c, 0);
  const auto rb = load_rules(cong_only_rules);
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<std::pair<int, int>> edges;
    std::vector<Fact> hyps;
    const int m = 1 + static_cast<int>(rng() % 12);
    for (int e = 0; e < m; ++e) {
      int a = pick(rng), b = pick(rng);
      if (a == b)
        continue;
      edges.push_back({a, b});
      hyps.push_back(spoke_cong(a, b));
    }
    const auto db = saturate(hyps, rb, d);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        const int dist = bfs_distance(edges, n, a, b);
        const auto f = spoke_cong(a, b);
        ASSERT_EQ(db->contains(f), dist > 0) << a << " " << b;
        if (dist <= 0)
          continue;
        const auto chain = explain(*db, f);
        if (chain.size() == 1) {
          ASSERT_TRUE(chain[0].is_hypothesis());
          continue;
        }
        // walk the path; it may run from either end
        const std::vector<std::string> oa{"O", "P" + std::to_string(a)},
            ob{"O", "P" + std::to_string(b)};
        const auto first0 = segment_of(chain[0].produced, 0),
                   first1 = segment_of(chain[0].produced, 1);
        const bool from_a = first0 == oa || first1 == oa;
        auto at = from_a ? oa : ob;
        std::set<Fact> used;
        for (std::size_t k = 0; k + 1 < chain.size(); ++k) {
          const auto &step = chain[k];
          ASSERT_TRUE(step.is_hypothesis());
          ASSERT_TRUE(used.insert(step.produced).second);
          const auto s0 = segment_of(step.produced, 0),
                     s1 = segment_of(step.produced, 1);
          ASSERT_TRUE(s0 == at || s1 == at);
          at = s0 == at ? s1 : s0;
        }
        ASSERT_EQ(at, from_a ? ob : oa);
        ASSERT_GE(static_cast<int>(chain.size()) - 1, dist);
        ASSERT_EQ(chain.back().rule_id, "cong_trans");
      }
  }
}

// The explanation forest against a brute-force path search over the merges
// that actually joined classes.
TEST(ExplainedClasses, PathEqualsForestPath) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 30);
    ExplainedClasses<int, int> uf;
    std::vector<std::pair<int, int>> tree;
    std::map<int, std::pair<int, int>> edge_of;
    for (int e = 0; e < 3 * n; ++e) {
      const int a = static_cast<int>(rng() % n), b = static_cast<int>(rng() % n);
      if (!uf.merge(a, b, e).empty()) {
        tree.push_back({a, b});
        edge_of[e] = {a, b};
      }
    }
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        const int dist = a == b ? 0 : bfs_distance(tree, n, a, b);
        ASSERT_EQ(uf.same(a, b), dist >= 0 || a == b);
        if (dist < 0)
          continue;
        const auto path = uf.explain(a, b);
        ASSERT_EQ(static_cast<int>(path.size()), dist);
        int at = a;
        for (int label : path) {
          const auto [x, y] = edge_of.at(label);
          ASSERT_TRUE(x == at || y == at);
          at = x == at ? y : x;
        }
        ASSERT_EQ(at, b);
      }
  }
}

TEST(ExplainedClasses, MergeReportsNewPairs) {
  ExplainedClasses<int, int> uf;
  EXPECT_EQ(uf.merge(1, 2, 0).size(), 1u);
  EXPECT_EQ(uf.merge(3, 4, 1).size(), 1u);
  EXPECT_EQ(uf.merge(2, 3, 2).size(), 4u);
  EXPECT_TRUE(uf.merge(1, 4, 3).empty());
  EXPECT_THROW(uf.explain(1, 9), std::out_of_range);
  EXPECT_EQ(uf.classes().size(), 1u);
}

TEST(Prove, GoalThatIsAHypothesis) {
  const auto c = test::construction("ninepoint.gcs");
  const auto out =
      prove(c, Goal{F("midp G A B"), GoalSource::user_selected}, test::baseline(), 0);
  const auto *dag = std::get_if<ProofDag>(&out);
  ASSERT_NE(dag, nullptr);
  ASSERT_EQ(dag->size(), 1u);
  EXPECT_TRUE(dag->root_node().is_hypothesis());
}

TEST(Prove, FalseGoalIsFalseOnDiagram) {
  const auto c = test::construction("scalene.gcs");
  const auto out =
      prove(c, Goal{F("cong A B A C"), GoalSource::user_selected}, test::baseline(), 0);
  const auto *np = std::get_if<NotProved>(&out);
  ASSERT_NE(np, nullptr);
  EXPECT_TRUE(np->false_on_diagram());
}

TEST(Prove, TrueButNotDerived) {
  const auto c = test::construction("ninepoint.gcs");
  const auto out = prove(c, c.goals[0], RuleBase{}, 0);
  const auto *np = std::get_if<NotProved>(&out);
  ASSERT_NE(np, nullptr);
  EXPECT_FALSE(np->false_on_diagram());
  EXPECT_EQ(np->fact_count, 5u);
}

TEST(Prove, UndefinedGoalPoint) {
  const auto c = test::construction("scalene.gcs");
  EXPECT_THROW(prove(c, Goal{F("coll A B Z"), GoalSource::user_selected},
                     test::baseline(), 0),
               ConstructionError);
}

TEST(Prove, StopAtGoalAgreesWithFullSaturation) {
  const auto c = test::construction("ninepoint.gcs");
  ProveOptions early, full;
  full.stop_at_goal = false;
  const auto a = prove_run(c, c.goals[0], test::baseline(), 0, early);
  const auto b = prove_run(c, c.goals[0], test::baseline(), 0, full);
  EXPECT_LE(a.db->size(), b.db->size());
  EXPECT_TRUE(std::holds_alternative<ProofDag>(a.outcome));
  EXPECT_TRUE(std::holds_alternative<ProofDag>(b.outcome));
}

TEST(Prove, FixturesProvedOverSeeds) {
  for (const auto *name : {"ninepoint.gcs", "midline.gcs", "right_median.gcs",
                           "isosceles.gcs", "varignon.gcs"}) {
    const auto c = test::construction(name);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto out = prove(c, c.goals[0], test::baseline(), seed);
      const auto *dag = std::get_if<ProofDag>(&out);
      ASSERT_NE(dag, nullptr) << name << " seed " << seed;
      EXPECT_EQ(dag->root_node().fact, c.goals[0].fact);
    }
  }
}
