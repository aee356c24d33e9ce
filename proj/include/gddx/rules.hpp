#pragma once
#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/gcs.hpp"

// Rule files:
//
//   name baseline
//   version 1
//
//   rule midp_cong
//   given midp(m,a,b)
//   conclude cong(m,a,m,b)
//   phrase midpoint splits a segment into equal halves
//   distinct a b

namespace gddx {

struct Pattern {
  Predicate predicate{};
  std::vector<std::string> vars;
  bool operator==(const Pattern &) const = default;
};

inline std::string to_string(const Pattern &p) {
  std::string out(name_of(p.predicate));
  out += '(';
  for (std::size_t i = 0; i < p.vars.size(); ++i)
    out += (i ? "," : "") + p.vars[i];
  return out + ')';
}

struct Rule {
  std::string id;
  std::vector<Pattern> antecedents;
  Pattern consequent;
  std::vector<std::pair<std::string, std::string>> distinct;
  std::string phrase_key;
};

struct RuleBase {
  std::string name;
  std::string version;
  std::vector<Rule> rules;

  const Rule *find(std::string_view id) const {
    for (const auto &r : rules)
      if (r.id == id)
        return &r;
    return nullptr;
  }
};

namespace detail {

inline bool is_pattern_var(std::string_view s) {
  if (s.empty() || !std::islower(static_cast<unsigned char>(s[0])))
    return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::islower(static_cast<unsigned char>(c)) ||
           std::isdigit(static_cast<unsigned char>(c)) || c == '_';
  });
}

class PatternListParser {
public:
  PatternListParser(std::string_view text, int line) : s_(text), line_(line) {}

  std::vector<Pattern> parse_list() {
    std::vector<Pattern> out;
    out.push_back(parse_one());
    skip_ws();
    while (pos_ < s_.size() && s_[pos_] == ',') {
      ++pos_;
      out.push_back(parse_one());
      skip_ws();
    }
    if (pos_ != s_.size())
      fail(std::string(s_.substr(pos_)), "unexpected text after fact",
           "pred(v1,...,vk)[, pred(...)]");
    return out;
  }

private:
  std::string_view s_;
  int line_;
  std::size_t pos_ = 0;

  [[noreturn]] void fail(std::string token, std::string msg,
                         std::string expected) const {
    throw ParseError(
        Diagnostic{line_, std::move(token), std::move(msg), std::move(expected)});
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t'))
      ++pos_;
  }

  std::string word() {
    skip_ws();
    const auto start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) ||
            s_[pos_] == '_'))
      ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= s_.size() || s_[pos_] != c)
      fail(pos_ < s_.size() ? std::string(1, s_[pos_]) : std::string("<end>"),
           std::string("expected '") + c + "'", "pred(v1,...,vk)");
    ++pos_;
  }

  Pattern parse_one() {
    auto name = word();
    auto pred = predicate_from_name(name);
    if (!pred)
      fail(name, "unknown predicate",
           "one of coll, para, perp, midp, cong, eqangle, cyclic");
    Pattern p{*pred, {}};
    expect('(');
    while (true) {
      auto v = word();
      if (!is_pattern_var(v))
        fail(v, "invalid pattern variable", "a lowercase identifier");
      p.vars.push_back(v);
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == ',') {
        ++pos_;
        continue;
      }
      break;
    }
    expect(')');
    if (p.vars.size() != arity(*pred))
      fail(name, "wrong number of variables",
           std::to_string(arity(*pred)) + " variables");
    return p;
  }
};

} // namespace detail

/// Parses a rule file. Failures carry the 1-based line they refer to.
inline RuleBase load_rules(std::string_view text) {
  RuleBase rb;
  auto fail = [](int line, std::string token, std::string msg,
                 std::string expected = {}) {
    throw ParseError(
        Diagnostic{line, std::move(token), std::move(msg), std::move(expected)});
  };

  struct Building {
    Rule rule;
    int line = 0;
    int given_line = 0, conclude_line = 0, phrase_line = 0;
    std::vector<int> distinct_lines;
  };
  std::optional<Building> cur;

  auto finish = [&] {
    if (!cur)
      return;
    auto &b = *cur;
    if (!b.given_line)
      fail(b.line, b.rule.id, "rule has no 'given' line", "given <facts>");
    if (!b.conclude_line)
      fail(b.line, b.rule.id, "rule has no 'conclude' line", "conclude <fact>");
    if (!b.phrase_line)
      fail(b.line, b.rule.id, "rule has no 'phrase' line", "phrase <key>");
    std::vector<std::string> bound;
    for (const auto &a : b.rule.antecedents)
      bound.insert(bound.end(), a.vars.begin(), a.vars.end());
    auto is_bound = [&](const std::string &v) {
      return std::find(bound.begin(), bound.end(), v) != bound.end();
    };
    for (const auto &v : b.rule.consequent.vars)
      if (!is_bound(v))
        fail(b.conclude_line, v, "unbound variable in conclusion",
             "a variable that occurs in a 'given' fact");
    for (std::size_t i = 0; i < b.rule.distinct.size(); ++i) {
      const auto &[v, w] = b.rule.distinct[i];
      for (const auto &x : {v, w})
        if (!is_bound(x))
          fail(b.distinct_lines[i], x, "unknown variable in 'distinct'",
               "a variable that occurs in a 'given' fact");
    }
    if (rb.find(b.rule.id))
      fail(b.line, b.rule.id, "duplicate rule id", "a unique rule id");
    rb.rules.push_back(std::move(b.rule));
    cur.reset();
  };

  const auto lines = detail::split_lines(detail::strip_bom(text));
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const int line_no = static_cast<int>(n) + 1;
    auto line = lines[n];
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t'))
      line.remove_prefix(1);
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t'))
      line.remove_suffix(1);
    if (line.empty() || line.front() == '#')
      continue;
    auto sp = line.find_first_of(" \t");
    const std::string kw(line.substr(0, sp));
    std::string_view rest =
        sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
    while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
      rest.remove_prefix(1);

    if (kw == "name" || kw == "version") {
      if (cur)
        fail(line_no, kw, "metadata must precede the first rule");
      (kw == "name" ? rb.name : rb.version) = std::string(rest);
      continue;
    }
    if (kw == "rule") {
      finish();
      if (rest.empty() || rest.find_first_of(" \t") != std::string_view::npos)
        fail(line_no, std::string(rest), "invalid rule id", "rule <id>");
      cur = Building{};
      cur->rule.id = std::string(rest);
      cur->line = line_no;
      continue;
    }
    if (!cur)
      fail(line_no, kw, "statement outside a rule", "rule <id>");
    if (kw == "given") {
      if (cur->given_line)
        fail(line_no, kw, "second 'given' line", "one given line per rule");
      cur->rule.antecedents =
          detail::PatternListParser(rest, line_no).parse_list();
      cur->given_line = line_no;
    } else if (kw == "conclude") {
      if (cur->conclude_line)
        fail(line_no, kw, "second 'conclude' line", "one conclusion per rule");
      auto list = detail::PatternListParser(rest, line_no).parse_list();
      if (list.size() != 1)
        fail(line_no, std::string(rest), "a rule concludes exactly one fact",
             "conclude <fact>");
      cur->rule.consequent = list.front();
      cur->conclude_line = line_no;
    } else if (kw == "phrase") {
      if (cur->phrase_line)
        fail(line_no, kw, "second 'phrase' line", "one phrase per rule");
      if (rest.empty())
        fail(line_no, kw, "empty phrase key", "phrase <key>");
      cur->rule.phrase_key = std::string(rest);
      cur->phrase_line = line_no;
    } else if (kw == "distinct") {
      auto words = detail::split_words(rest);
      if (words.size() != 2 || !detail::is_pattern_var(words[0]) ||
          !detail::is_pattern_var(words[1]))
        fail(line_no, std::string(rest), "malformed distinct constraint",
             "distinct <v> <w>");
      cur->rule.distinct.emplace_back(words[0], words[1]);
      cur->distinct_lines.push_back(line_no);
    } else {
      fail(line_no, kw, "unknown keyword",
           "rule, given, conclude, phrase, distinct, name or version");
    }
  }
  finish();
  return rb;
}

} // namespace gddx
