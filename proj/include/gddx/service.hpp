#pragma once
#include <json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "gddx/diagram.hpp"
#include "gddx/engine.hpp"
#include "gddx/gcs.hpp"
#include "gddx/ggb.hpp"
#include "gddx/i18n.hpp"
#include "gddx/proof.hpp"
#include "gddx/rules.hpp"
#include "gddx/wu.hpp"

// Request handling shared by the command line and the HTTP service.

namespace gddx {

using json = nlohmann::json;

inline std::string read_file(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw Error("cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Rule base and catalogs, loaded once and shared read-only.
class Resources {
public:
  RuleBase rules;
  std::map<std::string, std::shared_ptr<const Catalog>> catalogs;
  SaturationLimits limits;

  static Resources load(const std::filesystem::path &rules_file,
                        const std::filesystem::path &catalog_dir) {
    Resources r;
    r.rules = load_rules(read_file(rules_file));
    std::vector<std::filesystem::path> files;
    if (std::filesystem::is_directory(catalog_dir))
      for (const auto &e : std::filesystem::directory_iterator(catalog_dir))
        if (e.path().extension() == ".csv")
          files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto &f : files) {
      const auto lang = f.stem().string();
      r.catalogs[lang] =
          std::make_shared<const Catalog>(load_catalog(read_file(f), lang));
    }
    return r;
  }

  bool has_language(const std::string &lang) const {
    return catalogs.count(lang) != 0;
  }

  /// "de-AT" resolves to de-AT, de, en (whichever exist).
  CatalogChain chain(const std::string &lang) const {
    CatalogChain ch;
    std::string tag = lang;
    while (!tag.empty()) {
      if (tag != "en")
        if (auto it = catalogs.find(tag); it != catalogs.end())
          ch.catalogs.push_back(it->second);
      const auto dash = tag.rfind('-');
      tag = dash == std::string::npos ? std::string{} : tag.substr(0, dash);
    }
    if (auto it = catalogs.find("en"); it != catalogs.end())
      ch.catalogs.push_back(it->second);
    return ch;
  }
};

enum class SourceFormat { gcs, ggb };
enum class RenderMode { flat, tree, dot };
enum class Backend { gdd, wu };

struct ProveRequest {
  std::string source;
  SourceFormat format = SourceFormat::gcs;
  std::string goal; // fact text, "auto:<n>", or empty for the file's goal
  std::string lang = "en";
  RenderMode mode = RenderMode::tree;
  bool structure = true;
  Backend backend = Backend::gdd;
  std::uint64_t seed = 0;
};

enum class ProveStatus { proved, not_proved, error };

inline const char *to_string(ProveStatus s) {
  switch (s) {
  case ProveStatus::proved:
    return "proved";
  case ProveStatus::not_proved:
    return "not_proved";
  case ProveStatus::error:
    return "error";
  }
  return "?";
}

struct ProveResponse {
  ProveStatus status = ProveStatus::error;
  int exit_code = 2;
  std::string rendering;
  std::optional<ProofDag> dag;
  std::vector<std::string> ndgs;
  std::vector<std::string> diagnostics;
  std::optional<Diagnostic> diagnostic;
  std::size_t fact_count = 0;
};

inline Construction parse_source(const std::string &text, SourceFormat f) {
  return f == SourceFormat::gcs ? parse_gcs(text) : import_ggb_subset(text);
}

/// Candidate goals: properties seen on the witness diagram for `seed`.
inline std::vector<Fact> detect(const Construction &c, std::uint64_t seed) {
  return detect_properties(realize(c, seed), c);
}

inline Fact resolve_goal(const Construction &c, const std::string &goal,
                         std::uint64_t seed) {
  if (goal.rfind("auto:", 0) == 0) {
    std::size_t n = 0;
    const auto digits = goal.substr(5);
    auto [end, ec] =
        std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (digits.empty() || ec != std::errc{} ||
        end != digits.data() + digits.size() || n == 0)
      throw MalformedFact("invalid goal reference '" + goal +
                          "' (expected auto:<n>, n >= 1)");
    const auto found = detect(c, seed);
    if (n > found.size())
      throw MalformedFact("goal reference '" + goal + "' out of range (" +
                          std::to_string(found.size()) + " candidates)");
    return found[n - 1];
  }
  if (goal.empty()) {
    if (c.goals.empty())
      throw MalformedFact("no goal given and none declared in the input");
    return canonical_fact(c.goals.front().fact);
  }
  return canonical_fact(parse_fact(goal));
}

namespace detail {

inline std::string render_gdd(const ProofDag &dag, const CatalogChain &ch,
                              const ProveRequest &req) {
  switch (req.mode) {
  case RenderMode::dot:
    return export_dot(dag, ch);
  case RenderMode::flat:
    return render_tree(dag, ch, false);
  case RenderMode::tree:
    return render_tree(dag, ch, req.structure);
  }
  return {};
}

inline ProveResponse prove_gdd(const Resources &res, const Construction &c,
                               const Fact &goal, const ProveRequest &req,
                               const CatalogChain &ch) {
  ProveOptions opt;
  opt.limits = res.limits;
  opt.stop_at_goal = false;
  auto run = prove_run(c, Goal{goal, GoalSource::user_selected}, res.rules,
                       req.seed, opt);
  ProveResponse out;
  out.fact_count = run.db->size();
  if (auto *dag = std::get_if<ProofDag>(&run.outcome)) {
    out.status = ProveStatus::proved;
    out.exit_code = 0;
    out.rendering = render_gdd(*dag, ch, req);
    out.dag = std::move(*dag);
    return out;
  }
  const auto &np = std::get<NotProved>(run.outcome);
  out.status = ProveStatus::not_proved;
  out.exit_code = 1;
  out.rendering = localize_fact(ch, goal) + ": " + lookup(ch, "not proved") +
                  " (" +
                  lookup(ch, np.false_on_diagram()
                                 ? "the goal is false on the diagram"
                                 : "the goal holds on the diagram but was "
                                   "not derived") +
                  "; " + std::to_string(np.fact_count) + " " +
                  lookup(ch, "facts derived") + ")\n";
  return out;
}

inline ProveResponse prove_wu(const Construction &c, const Fact &goal,
                              const CatalogChain &ch) {
  const auto r = wu_prove(c, Goal{goal, GoalSource::user_selected});
  ProveResponse out;
  out.status = r.proved ? ProveStatus::proved : ProveStatus::not_proved;
  out.exit_code = r.proved ? 0 : 1;
  out.rendering = localize_fact(ch, goal) + ": " +
                  lookup(ch, r.proved ? "proved" : "not proved") + '\n';
  out.rendering += lookup(ch, "final remainder") + ": " +
                   r.final_remainder.to_string(r.translation.variables) + '\n';
  out.rendering += lookup(ch, "non-degeneracy conditions") + ":\n";
  int n = 0;
  for (const auto &ndg : r.ndgs) {
    out.ndgs.push_back(ndg.to_string(ch));
    out.rendering += "  " + std::to_string(++n) + ". " + out.ndgs.back() + '\n';
  }
  return out;
}

} // namespace detail

/// The whole prove pipeline. Never throws; failures become an error status
/// with exit code 2 (input problems) or 3 (degenerate or over budget).
inline ProveResponse run_prove(const Resources &res, const ProveRequest &req) {
  const auto ch = res.chain(req.lang);
  auto fail = [](int code, std::string msg) {
    ProveResponse out;
    out.exit_code = code;
    out.diagnostics.push_back(std::move(msg));
    return out;
  };
  try {
    const auto c = parse_source(req.source, req.format);
    const auto goal = resolve_goal(c, req.goal, req.seed);
    for (const auto &p : goal.points)
      if (!c.defines(p))
        throw ConstructionError("goal uses undefined point '" + p + "'");
    return req.backend == Backend::gdd
               ? detail::prove_gdd(res, c, goal, req, ch)
               : detail::prove_wu(c, goal, ch);
  } catch (const ParseError &e) {
    auto out = fail(2, e.what());
    out.diagnostic = e.diagnostic();
    return out;
  } catch (const MalformedFact &e) {
    return fail(2, e.what());
  } catch (const ConstructionError &e) {
    return fail(2, e.what());
  } catch (const UnsupportedByBackend &e) {
    return fail(2, e.what());
  } catch (const DegenerateDiagram &e) {
    return fail(3, e.what());
  } catch (const ResourceExceeded &e) {
    return fail(3, e.what());
  } catch (const InconsistentHypotheses &e) {
    return fail(3, e.what());
  } catch (const Error &e) {
    return fail(2, e.what());
  } catch (const std::exception &e) {
    return fail(3, std::string("internal error: ") + e.what());
  }
}

//==============================================================================
// JSON views

inline json to_json(const Diagnostic &d) {
  return {{"line", d.line},
          {"token", d.token},
          {"message", d.message},
          {"expected", d.expected}};
}

inline json to_json(const ProofDag &dag) {
  json nodes = json::array();
  for (const auto &n : dag.nodes)
    nodes.push_back({{"index", n.index},
                     {"fact", to_string(n.fact)},
                     {"reason", n.reason},
                     {"rule", n.rule},
                     {"antecedents", n.antecedents}});
  return {{"root", dag.root}, {"nodes", std::move(nodes)}};
}

inline json to_json(const ProveResponse &r) {
  json out{{"status", to_string(r.status)},
           {"exit_code", r.exit_code},
           {"rendering", r.rendering},
           {"dag", r.dag ? to_json(*r.dag) : json(nullptr)},
           {"ndgs", r.ndgs},
           {"diagnostics", r.diagnostics},
           {"fact_count", r.fact_count}};
  if (r.diagnostic)
    out["diagnostic"] = to_json(*r.diagnostic);
  return out;
}

inline std::string to_string(StepKind k) {
  return std::string(detail::keyword_info(k).keyword);
}

inline json to_json(const Construction &c) {
  json steps = json::array();
  for (const auto &s : c.steps)
    steps.push_back(
        {{"kind", to_string(s.kind)}, {"defined", s.defined}, {"args", s.args}});
  json goals = json::array();
  for (const auto &g : c.goals)
    goals.push_back(to_statement(g.fact));
  return {{"steps", std::move(steps)}, {"goals", std::move(goals)}};
}

inline json to_json(const Diagram &d) {
  json pts = json::array();
  for (std::size_t i = 0; i < d.labels.size(); ++i)
    pts.push_back({{"label", d.labels[i]},
                   {"x", d.positions[i].x},
                   {"y", d.positions[i].y}});
  return {{"seed", d.seed}, {"points", std::move(pts)}};
}

inline json to_json(const Catalog &c) {
  json entries = json::array();
  for (const auto &[k, e] : c.entries)
    entries.push_back({{"id", e.id},
                       {"key", e.key},
                       {"text", e.text},
                       {"tooltip", e.tooltip ? json(*e.tooltip) : json()}});
  return {{"language", c.language}, {"entries", std::move(entries)}};
}

inline json to_json(const RuleBase &rb) {
  json rules = json::array();
  for (const auto &r : rb.rules) {
    json given = json::array();
    for (const auto &a : r.antecedents)
      given.push_back(to_string(a));
    json distinct = json::array();
    for (const auto &[v, w] : r.distinct)
      distinct.push_back({v, w});
    rules.push_back({{"id", r.id},
                     {"given", std::move(given)},
                     {"conclude", to_string(r.consequent)},
                     {"phrase", r.phrase_key},
                     {"distinct", std::move(distinct)}});
  }
  return {{"name", rb.name},
          {"version", rb.version},
          {"count", rb.rules.size()},
          {"rules", std::move(rules)}};
}

/// Reads a request body; throws json::exception or Error on bad input.
inline ProveRequest prove_request_from_json(const json &j) {
  ProveRequest r;
  r.source = j.at("source").get<std::string>();
  const auto fmt = j.value("format", std::string("gcs"));
  if (fmt == "gcs")
    r.format = SourceFormat::gcs;
  else if (fmt == "ggb")
    r.format = SourceFormat::ggb;
  else
    throw Error("unknown format '" + fmt + "' (expected gcs or ggb)");
  r.goal = j.value("goal", std::string());
  r.lang = j.value("lang", std::string("en"));
  const auto mode = j.value("mode", std::string("tree"));
  if (mode == "flat")
    r.mode = RenderMode::flat;
  else if (mode == "tree")
    r.mode = RenderMode::tree;
  else if (mode == "dot")
    r.mode = RenderMode::dot;
  else
    throw Error("unknown mode '" + mode + "' (expected flat, tree or dot)");
  r.structure = j.value("structure", true);
  const auto backend = j.value("backend", std::string("gdd"));
  if (backend == "gdd")
    r.backend = Backend::gdd;
  else if (backend == "wu")
    r.backend = Backend::wu;
  else
    throw Error("unknown backend '" + backend + "' (expected gdd or wu)");
  r.seed = j.value("seed", std::uint64_t{0});
  return r;
}

} // namespace gddx
