#pragma once
#include <expat.h>

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "gddx/core.hpp"
#include "gddx/gcs.hpp"

// Import of a narrow subset of GeoGebra's geogebra.xml:
//
//   <element type="point" label="A"><coords x="1" y="2" z="1"/></element>
//   <command name="Midpoint"><input a0="A" a1="B"/><output a0="M"/></command>
//   <command name="Intersect"><input a0="Line(A,B)" a1="Line(C,D)"/>
//                             <output a0="P"/></command>
//
// Intersect also accepts four point inputs a0..a3. Anything else inside
// <construction> is rejected with UnsupportedFeature.

namespace gddx {

class UnsupportedFeature : public ParseError {
public:
  using ParseError::ParseError;
};

namespace detail {

class GgbReader {
public:
  Construction result;
  std::optional<Diagnostic> error;
  bool unsupported = false;

  void start(XML_Parser parser, std::string_view name,
             const std::map<std::string, std::string> &attrs) {
    const int line = line_of(parser);
    ++depth_;
    if (!in_construction_) {
      if (name == "construction") {
        in_construction_ = true;
        construction_depth_ = depth_;
        seen_construction_ = true;
      }
      return;
    }
    if (depth_ == construction_depth_ + 1) {
      if (name == "element") {
        auto type = get(attrs, "type");
        if (type != "point")
          return reject(parser, line, "element type \"" + type + "\"");
        current_ = Pending{};
        current_->is_element = true;
        current_->line = line;
        current_->label = get(attrs, "label");
      } else if (name == "command") {
        auto cmd = get(attrs, "name");
        if (cmd != "Midpoint" && cmd != "Intersect")
          return reject(parser, line, cmd.empty() ? "command" : cmd);
        current_ = Pending{};
        current_->line = line;
        current_->command = cmd;
      } else {
        return reject(parser, line, std::string(name));
      }
      return;
    }
    if (!current_ || depth_ != construction_depth_ + 2)
      return;
    if (current_->is_element && name == "coords") {
      double x = 0, y = 0, z = 1;
      bool ok = num(attrs, "x", x) && num(attrs, "y", y);
      if (attrs.count("z"))
        ok = ok && num(attrs, "z", z);
      if (!ok || z == 0)
        return fail(parser, line, "coords", "invalid point coordinates",
                    "finite x, y and nonzero z");
      current_->coords = Coordinates{x / z, y / z};
    } else if (!current_->is_element && name == "input") {
      current_->inputs = indexed(attrs);
    } else if (!current_->is_element && name == "output") {
      current_->outputs = indexed(attrs);
    }
  }

  void end(XML_Parser parser, std::string_view name) {
    if (in_construction_ && depth_ == construction_depth_ + 1 && current_) {
      auto pending = std::move(*current_);
      current_.reset();
      if (pending.is_element)
        finish_element(parser, pending);
      else
        finish_command(parser, pending);
    }
    if (in_construction_ && depth_ == construction_depth_ &&
        name == "construction")
      in_construction_ = false;
    --depth_;
  }

  bool saw_construction() const { return seen_construction_; }

private:
  struct Pending {
    bool is_element = false;
    int line = 0;
    std::string label;
    std::string command;
    std::optional<Coordinates> coords;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
  };

  int depth_ = 0;
  int construction_depth_ = 0;
  bool in_construction_ = false;
  bool seen_construction_ = false;
  std::optional<Pending> current_;
  std::vector<std::string> defined_;

  static int line_of(XML_Parser p) {
    return static_cast<int>(XML_GetCurrentLineNumber(p));
  }

  static std::string get(const std::map<std::string, std::string> &attrs,
                         const std::string &key) {
    auto it = attrs.find(key);
    return it == attrs.end() ? std::string{} : it->second;
  }

  static bool num(const std::map<std::string, std::string> &attrs,
                  const std::string &key, double &out) {
    auto it = attrs.find(key);
    return it != attrs.end() && parse_double(it->second, out);
  }

  // a0, a1, ... in index order; stops at the first gap.
  static std::vector<std::string>
  indexed(const std::map<std::string, std::string> &attrs) {
    std::vector<std::string> out;
    for (int i = 0;; ++i) {
      auto it = attrs.find("a" + std::to_string(i));
      if (it == attrs.end())
        break;
      out.push_back(it->second);
    }
    return out;
  }

  void fail(XML_Parser parser, int line, std::string token, std::string msg,
            std::string expected = {}) {
    if (error)
      return;
    error = Diagnostic{line, std::move(token), std::move(msg),
                       std::move(expected)};
    XML_StopParser(parser, XML_FALSE);
  }

  void reject(XML_Parser parser, int line, std::string what) {
    if (error)
      return;
    unsupported = true;
    fail(parser, line, std::move(what), "unsupported feature",
         "point elements, Midpoint or Intersect commands");
  }

  bool is_defined(const std::string &l) const {
    return std::find(defined_.begin(), defined_.end(), l) != defined_.end();
  }

  void add_step(XML_Parser parser, int line, ConstructionStep step,
                std::string_view usage) {
    if (auto msg = check_step(step, defined_); !msg.empty())
      return fail(parser, line, step.defined, msg, std::string(usage));
    defined_.push_back(step.defined);
    result.steps.push_back(std::move(step));
  }

  void finish_element(XML_Parser parser, const Pending &p) {
    if (!is_point_label(p.label))
      return fail(parser, p.line, p.label, "invalid point label",
                  "[A-Za-z][A-Za-z0-9_]*");
    if (is_defined(p.label))
      return; // output of an earlier command; the element only carries style
    add_step(parser, p.line,
             ConstructionStep{StepKind::free_point, p.label, {}, p.coords},
             "a point element");
  }

  // "Line(A, B)" or "Line[A,B]" -> {A, B}
  static std::optional<std::pair<std::string, std::string>>
  line_through(std::string_view s) {
    if (s.substr(0, 5) != "Line(" && s.substr(0, 5) != "Line[")
      return std::nullopt;
    const char close = s[4] == '(' ? ')' : ']';
    if (s.back() != close)
      return std::nullopt;
    auto inner = s.substr(5, s.size() - 6);
    auto comma = inner.find(',');
    if (comma == std::string_view::npos)
      return std::nullopt;
    auto trim = [](std::string_view v) {
      while (!v.empty() && v.front() == ' ')
        v.remove_prefix(1);
      while (!v.empty() && v.back() == ' ')
        v.remove_suffix(1);
      return std::string(v);
    };
    return std::pair{trim(inner.substr(0, comma)),
                     trim(inner.substr(comma + 1))};
  }

  void finish_command(XML_Parser parser, const Pending &p) {
    if (p.outputs.size() != 1)
      return fail(parser, p.line, p.command, "command must have one output",
                  "<output a0=\"label\"/>");
    const auto &out = p.outputs[0];
    if (p.command == "Midpoint") {
      if (p.inputs.size() != 2)
        return reject(parser, p.line, "Midpoint (non two-point form)");
      add_step(parser, p.line,
               ConstructionStep{StepKind::midpoint, out, p.inputs, std::nullopt},
               "Midpoint(A, B)");
      return;
    }
    std::vector<std::string> args;
    if (p.inputs.size() == 4) {
      args = p.inputs;
    } else if (p.inputs.size() == 2) {
      auto l1 = line_through(p.inputs[0]);
      auto l2 = line_through(p.inputs[1]);
      if (!l1 || !l2)
        return reject(parser, p.line, "Intersect (non line-line form)");
      args = {l1->first, l1->second, l2->first, l2->second};
    } else {
      return reject(parser, p.line, "Intersect (non line-line form)");
    }
    for (const auto &a : args)
      if (!is_defined(a))
        return fail(parser, p.line, a, "point used before definition",
                    "a point defined earlier in the document");
    add_step(parser, p.line,
             ConstructionStep{StepKind::intersect_ll, out, args, std::nullopt},
             "Intersect(Line(A,B), Line(C,D))");
  }
};

inline void XMLCALL ggb_start(void *data, const XML_Char *name,
                              const XML_Char **atts) {
  auto *ctx = static_cast<std::pair<GgbReader *, XML_Parser> *>(data);
  std::map<std::string, std::string> attrs;
  for (int i = 0; atts[i] && atts[i + 1]; i += 2)
    attrs[atts[i]] = atts[i + 1];
  ctx->first->start(ctx->second, name, attrs);
}

inline void XMLCALL ggb_end(void *data, const XML_Char *name) {
  auto *ctx = static_cast<std::pair<GgbReader *, XML_Parser> *>(data);
  ctx->first->end(ctx->second, name);
}

} // namespace detail

/// Imports a geogebra.xml document restricted to the accepted subset. Free
/// points keep their coordinates as diagram hints.
inline Construction import_ggb_subset(std::string_view xml_text) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)>
      parser(XML_ParserCreate("UTF-8"), &XML_ParserFree);
  if (!parser)
    throw Error("cannot allocate XML parser");
  detail::GgbReader reader;
  std::pair<detail::GgbReader *, XML_Parser> ctx{&reader, parser.get()};
  XML_SetUserData(parser.get(), &ctx);
  XML_SetElementHandler(parser.get(), detail::ggb_start, detail::ggb_end);

  const auto status = XML_Parse(parser.get(), xml_text.data(),
                                static_cast<int>(xml_text.size()), XML_TRUE);
  if (reader.error) {
    if (reader.unsupported)
      throw UnsupportedFeature(*reader.error);
    throw ParseError(*reader.error);
  }
  if (status != XML_STATUS_OK) {
    const auto line =
        static_cast<int>(XML_GetCurrentLineNumber(parser.get()));
    throw ParseError(Diagnostic{
        line, "", std::string("malformed XML: ") +
                      XML_ErrorString(XML_GetErrorCode(parser.get())),
        "well-formed geogebra.xml"});
  }
  if (!reader.saw_construction())
    throw ParseError(Diagnostic{1, "", "no <construction> element",
                                "a geogebra.xml document"});
  return std::move(reader.result);
}

} // namespace gddx
