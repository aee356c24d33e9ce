#pragma once
#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "gddx/core.hpp"

// Text construction scripts (.gcs):
//
//   # nine-point circle, part
//   point A
//   point B 4 0          <- optional coordinate hint
//   midpoint E B C
//   foot D A B C
//   intersect P A B C D
//   online P A B
//   goal cyclic D E F G

namespace gddx {

namespace detail {

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos)
      nl = text.size();
    auto line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r')
      line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  if (!out.empty() && out.back().empty())
    out.pop_back();
  return out;
}

inline std::vector<std::string> split_words(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t'))
      ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t')
      ++j;
    if (j > i)
      out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string_view strip_bom(std::string_view text) {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF")
    text.remove_prefix(3);
  return text;
}

inline bool parse_double(const std::string &s, double &out) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size() && std::isfinite(out);
}

inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

struct KeywordInfo {
  std::string_view keyword;
  StepKind kind;
  std::string_view usage;
};

inline constexpr std::array<KeywordInfo, 5> step_keywords{{
    {"point", StepKind::free_point, "point <P> [x y]"},
    {"midpoint", StepKind::midpoint, "midpoint <M> <A> <B>"},
    {"foot", StepKind::foot, "foot <D> <A> <B> <C>"},
    {"intersect", StepKind::intersect_ll, "intersect <P> <A> <B> <C> <D>"},
    {"online", StepKind::point_on_line, "online <P> <A> <B>"},
}};

inline const KeywordInfo &keyword_info(StepKind k) {
  for (const auto &info : step_keywords)
    if (info.kind == k)
      return info;
  return step_keywords[0];
}

} // namespace detail

/// Parses a construction script. Every failure is a ParseError carrying the
/// 1-based line number, the offending token and the expected form.
inline Construction parse_gcs(std::string_view text) {
  using detail::step_keywords;
  Construction c;
  std::vector<std::string> defined;
  std::vector<int> goal_lines;

  auto fail = [](int line, std::string token, std::string msg,
                 std::string expected = {}) {
    throw ParseError(
        Diagnostic{line, std::move(token), std::move(msg), std::move(expected)});
  };

  const auto lines = detail::split_lines(detail::strip_bom(text));
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n) + 1;
    auto line = lines[n];
    if (auto hash = line.find('#'); hash != std::string_view::npos)
      line = line.substr(0, hash);
    auto words = detail::split_words(line);
    if (words.empty())
      continue;
    const auto &kw = words[0];

    if (kw == "goal") {
      if (words.size() < 2)
        fail(line_no, kw, "goal without a fact", "goal <predicate> <points...>");
      auto pred = predicate_from_name(words[1]);
      if (!pred)
        fail(line_no, words[1], "unknown predicate",
             "one of coll, para, perp, midp, cong, eqangle, cyclic");
      if (words.size() - 2 != arity(*pred))
        fail(line_no, words[1], "wrong number of points for predicate",
             std::to_string(arity(*pred)) + " points");
      Fact f{*pred, {words.begin() + 2, words.end()}};
      for (const auto &p : f.points)
        if (!is_point_label(p))
          fail(line_no, p, "invalid point label", "[A-Za-z][A-Za-z0-9_]*");
      c.goals.push_back(Goal{canonical_fact(std::move(f)),
                             GoalSource::declared_in_script});
      goal_lines.push_back(line_no);
      continue;
    }

    const detail::KeywordInfo *info = nullptr;
    for (const auto &k : step_keywords)
      if (k.keyword == kw)
        info = &k;
    if (!info)
      fail(line_no, kw, "unknown keyword",
           "point, midpoint, foot, intersect, online or goal");

    ConstructionStep step{info->kind, {}, {}, std::nullopt};
    const auto want = arity(info->kind);
    if (info->kind == StepKind::free_point) {
      if (words.size() != 2 && words.size() != 4)
        fail(line_no, kw, "wrong number of arguments",
             std::string(info->usage));
      if (words.size() == 4) {
        Coordinates xy;
        if (!detail::parse_double(words[2], xy.x))
          fail(line_no, words[2], "invalid coordinate", "a number");
        if (!detail::parse_double(words[3], xy.y))
          fail(line_no, words[3], "invalid coordinate", "a number");
        step.hint = xy;
      }
    } else if (words.size() != want + 2) {
      fail(line_no, kw, "wrong number of arguments", std::string(info->usage));
    }
    step.defined = words[1];
    if (info->kind != StepKind::free_point)
      step.args.assign(words.begin() + 2, words.end());

    if (!is_point_label(step.defined))
      fail(line_no, step.defined, "invalid point label",
           "[A-Za-z][A-Za-z0-9_]*");
    if (std::find(defined.begin(), defined.end(), step.defined) !=
        defined.end())
      fail(line_no, step.defined, "duplicate label", "a fresh point label");
    for (const auto &a : step.args) {
      if (!is_point_label(a))
        fail(line_no, a, "invalid point label", "[A-Za-z][A-Za-z0-9_]*");
      if (std::find(defined.begin(), defined.end(), a) == defined.end())
        fail(line_no, a, "point used before definition",
             "a point defined on an earlier line");
    }
    if (auto msg = check_step(step, defined); !msg.empty())
      fail(line_no, step.defined, msg, std::string(info->usage));
    defined.push_back(step.defined);
    c.steps.push_back(std::move(step));
  }

  for (std::size_t g = 0; g < c.goals.size(); ++g)
    for (const auto &p : c.goals[g].fact.points)
      if (std::find(defined.begin(), defined.end(), p) == defined.end())
        fail(goal_lines[g], p, "goal references an undefined point",
             "a point defined in this script");
  return c;
}

/// Inverse of parse_gcs: parse_gcs(serialize_gcs(c)) == c.
inline std::string serialize_gcs(const Construction &c) {
  std::string out;
  for (const auto &s : c.steps) {
    out += detail::keyword_info(s.kind).keyword;
    out += ' ' + s.defined;
    for (const auto &a : s.args)
      out += ' ' + a;
    if (s.kind == StepKind::free_point && s.hint)
      out += ' ' + detail::format_double(s.hint->x) + ' ' +
             detail::format_double(s.hint->y);
    out += '\n';
  }
  for (const auto &g : c.goals)
    out += "goal " + to_statement(g.fact) + '\n';
  return out;
}

} // namespace gddx
