#pragma once
#include <memory>
#include <stdexcept>
#include <string>

namespace gddx {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A located problem in some textual input. `line` is 1-based.
struct Diagnostic {
  int line = 0;
  std::string token;
  std::string message;
  std::string expected;

  std::string to_string() const {
    std::string out = "line " + std::to_string(line) + ": " + message;
    if (!token.empty())
      out += " near '" + token + "'";
    if (!expected.empty())
      out += " (expected " + expected + ")";
    return out;
  }
};

class ParseError : public Error {
public:
  explicit ParseError(Diagnostic d)
      : Error(d.to_string()), diagnostic_(std::move(d)) {}
  const Diagnostic &diagnostic() const noexcept { return diagnostic_; }
  int line() const noexcept { return diagnostic_.line; }

private:
  Diagnostic diagnostic_;
};

class MalformedFact : public Error {
public:
  using Error::Error;
};

class ConstructionError : public Error {
public:
  using Error::Error;
};

/// Raised when no non-degenerate numeric witness could be found.
class DegenerateDiagram : public Error {
public:
  DegenerateDiagram(std::string step, const std::string &why)
      : Error("degenerate diagram at step '" + step + "': " + why),
        step_(std::move(step)) {}
  const std::string &step() const noexcept { return step_; }

private:
  std::string step_;
};

class FactNotDerived : public Error {
public:
  using Error::Error;
};

/// Resource budget exhausted (saturation limits, Wu monomial cap).
class ResourceExceeded : public Error {
public:
  using Error::Error;
};

/// Goal predicate has no translation in the selected backend.
class UnsupportedByBackend : public Error {
public:
  using Error::Error;
};

} // namespace gddx
