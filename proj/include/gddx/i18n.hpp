#pragma once
#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/errors.hpp"
#include "gddx/gcs.hpp"

// Phrase catalogs: one CSV file per language, records `id,key,text[,tooltip]`.
// Lookup is by key; the id is kept but never consulted.

namespace gddx {

struct CatalogEntry {
  long id = 0;
  std::string key;
  std::string text;
  std::optional<std::string> tooltip;
  int line = 0;

  bool operator==(const CatalogEntry &o) const {
    return id == o.id && key == o.key && text == o.text &&
           tooltip == o.tooltip;
  }
};

struct Catalog {
  std::string language;
  std::map<std::string, CatalogEntry> entries;

  const CatalogEntry *find(std::string_view key) const {
    auto it = entries.find(std::string(key));
    return it == entries.end() ? nullptr : &it->second;
  }
};

/// Most specific catalog first, English last.
struct CatalogChain {
  std::vector<std::shared_ptr<const Catalog>> catalogs;
};

namespace detail {

// One CSV record per call. Quoted fields may contain commas, doubled quotes
// and line breaks. Returns false at end of input.
class CsvReader {
public:
  explicit CsvReader(std::string_view text) : s_(text) {}

  int line() const { return line_; }

  bool next(std::vector<std::string> &fields, int &record_line) {
    fields.clear();
    if (pos_ >= s_.size())
      return false;
    record_line = line_;
    std::string cur;
    bool quoted = false, was_quoted = false;
    while (pos_ < s_.size()) {
      const char c = s_[pos_++];
      if (quoted) {
        if (c == '"') {
          if (pos_ < s_.size() && s_[pos_] == '"') {
            cur += '"';
            ++pos_;
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n')
            ++line_;
          cur += c;
        }
        continue;
      }
      if (c == '"' && cur.empty() && !was_quoted) {
        quoted = was_quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(cur));
        cur.clear();
        was_quoted = false;
      } else if (c == '\n') {
        ++line_;
        break;
      } else if (c == '\r' && pos_ < s_.size() && s_[pos_] == '\n') {
        continue;
      } else {
        cur += c;
      }
    }
    if (quoted)
      throw ParseError(Diagnostic{record_line, "\"", "unterminated quoted field",
                                  "a closing '\"'"});
    fields.push_back(std::move(cur));
    return true;
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

inline std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos &&
      (s.empty() || (s.front() != ' ' && s.front() != '#')))
    return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"')
      out += '"';
    out += c;
  }
  return out + '"';
}

inline std::string normalize_key(std::string_view k) {
  std::string out;
  bool space = false;
  for (char c : k) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space)
      out += ' ';
    space = false;
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

} // namespace detail

/// Parses one catalog file. Blank lines and lines starting with '#' are
/// skipped; a leading BOM is tolerated.
inline Catalog load_catalog(std::string_view csv_text, std::string language) {
  Catalog cat{std::move(language), {}};
  detail::CsvReader reader(detail::strip_bom(csv_text));
  std::vector<std::string> f;
  int line = 0;
  while (reader.next(f, line)) {
    if (f.size() == 1 && f[0].find_first_not_of(" \t\r") == std::string::npos)
      continue;
    if (!f[0].empty() && f[0][0] == '#')
      continue;
    if (f.size() < 3)
      throw ParseError(Diagnostic{line, f[0], "too few fields",
                                  "id,key,text[,tooltip]"});
    if (f.size() > 4)
      throw ParseError(Diagnostic{line, f[4], "too many fields",
                                  "id,key,text[,tooltip]"});
    CatalogEntry e;
    const auto &id = f[0];
    auto [end, ec] = std::from_chars(id.data(), id.data() + id.size(), e.id);
    if (id.empty() || ec != std::errc{} || end != id.data() + id.size() ||
        e.id < 0)
      throw ParseError(
          Diagnostic{line, id, "invalid id", "a non-negative integer"});
    if (f[1].empty())
      throw ParseError(Diagnostic{line, "", "empty key", "a phrase key"});
    e.key = f[1];
    e.text = f[2];
    if (f.size() == 4)
      e.tooltip = f[3];
    e.line = line;
    if (auto *prev = cat.find(e.key))
      throw ParseError(Diagnostic{
          line, e.key,
          "duplicate key (lines " + std::to_string(prev->line) + " and " +
              std::to_string(line) + ")",
          "unique keys"});
    cat.entries.emplace(e.key, std::move(e));
  }
  return cat;
}

/// Writes entries in id order (then key order).
inline std::string serialize_catalog(const Catalog &c) {
  std::vector<const CatalogEntry *> sorted;
  for (const auto &[k, e] : c.entries)
    sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](auto *a, auto *b) { return a->id < b->id; });
  std::string out;
  for (const auto *e : sorted) {
    out += std::to_string(e->id) + ',' + detail::csv_field(e->key) + ',' +
           detail::csv_field(e->text);
    if (e->tooltip)
      out += ',' + detail::csv_field(*e->tooltip);
    out += '\n';
  }
  return out;
}

/// First catalog with a non-empty text for `key` wins; otherwise the key.
inline std::string lookup(const CatalogChain &chain, std::string_view key) {
  for (const auto &c : chain.catalogs)
    if (c)
      if (auto *e = c->find(key); e && !e->text.empty())
        return e->text;
  return std::string(key);
}

inline std::optional<std::string> lookup_tooltip(const CatalogChain &chain,
                                                 std::string_view key) {
  for (const auto &c : chain.catalogs)
    if (c)
      if (auto *e = c->find(key); e && e->tooltip && !e->tooltip->empty())
        return e->tooltip;
  return std::nullopt;
}

/// Substitutes `{0}`, `{1}`, ... Unknown or malformed slots stay verbatim.
inline std::string format_phrase(std::string_view text,
                                 const std::vector<std::string> &args) {
  std::string out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '{') {
      auto close = text.find('}', i);
      if (close != std::string_view::npos && close > i + 1) {
        std::size_t n = 0;
        auto digits = text.substr(i + 1, close - i - 1);
        auto [end, ec] =
            std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec == std::errc{} && end == digits.data() + digits.size() &&
            n < args.size()) {
          out += args[n];
          i = close;
          continue;
        }
      }
    }
    out += text[i];
  }
  return out;
}

/// A fact in the chain's language. The catalog key is the predicate name;
/// a text without slots gets the points appended in parentheses.
inline std::string localize_fact(const CatalogChain &chain, const Fact &f) {
  const auto text = lookup(chain, name_of(f.predicate));
  if (text.find("{0}") != std::string::npos)
    return format_phrase(text, f.points);
  std::string out = text + '(';
  for (std::size_t i = 0; i < f.points.size(); ++i)
    out += (i ? "," : "") + f.points[i];
  return out + ')';
}

enum class LintKind { missing, extra, empty_text, near_miss };

inline const char *to_string(LintKind k) {
  switch (k) {
  case LintKind::missing:
    return "missing";
  case LintKind::extra:
    return "extra";
  case LintKind::empty_text:
    return "empty";
  case LintKind::near_miss:
    return "near-miss";
  }
  return "?";
}

struct LintFinding {
  std::string language;
  LintKind kind{};
  std::string key;
  std::string baseline_key; // near-miss only
};

struct LintReport {
  std::vector<LintFinding> findings;
  bool clean() const { return findings.empty(); }
  int exit_status() const { return clean() ? 0 : 1; }

  std::string to_string() const {
    std::string out;
    for (const auto &f : findings) {
      out += f.language + ": " + gddx::to_string(f.kind) + " \"" + f.key + '"';
      if (f.kind == LintKind::near_miss)
        out += " (baseline \"" + f.baseline_key + "\")";
      out += '\n';
    }
    return out;
  }
};

/// Key drift of each catalog against the English baseline. A key that
/// matches a baseline key only after case folding or whitespace collapsing
/// is reported once as a near miss instead of as missing plus extra.
inline LintReport lint(const std::vector<Catalog> &catalogs,
                       const Catalog &baseline) {
  LintReport r;
  for (const auto &[k, e] : baseline.entries)
    if (e.text.empty())
      r.findings.push_back({baseline.language, LintKind::empty_text, k, {}});
  for (const auto &c : catalogs) {
    std::map<std::string, std::string> near; // catalog key -> baseline key
    std::map<std::string, std::string> base_near;
    for (const auto &[k, e] : c.entries) {
      if (baseline.find(k))
        continue;
      const auto nk = detail::normalize_key(k);
      for (const auto &[bk, be] : baseline.entries) {
        if (c.find(bk) || base_near.count(bk))
          continue;
        if (detail::normalize_key(bk) == nk) {
          near[k] = bk;
          base_near[bk] = k;
          break;
        }
      }
    }
    for (const auto &[bk, be] : baseline.entries)
      if (!c.find(bk) && !base_near.count(bk))
        r.findings.push_back({c.language, LintKind::missing, bk, {}});
    for (const auto &[k, e] : c.entries) {
      if (auto it = near.find(k); it != near.end())
        r.findings.push_back({c.language, LintKind::near_miss, k, it->second});
      else if (!baseline.find(k))
        r.findings.push_back({c.language, LintKind::extra, k, {}});
      if (e.text.empty())
        r.findings.push_back({c.language, LintKind::empty_text, k, {}});
    }
  }
  return r;
}

} // namespace gddx
