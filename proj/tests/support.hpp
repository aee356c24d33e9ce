#pragma once
#include <array>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>
#include <sys/wait.h>

#include "gddx/service.hpp"

namespace gddx::test {

inline std::filesystem::path source_dir() { return GDDX_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string &name) {
  return source_dir() / "fixtures" / name;
}
inline std::filesystem::path data_dir() { return source_dir() / "data"; }

inline std::string load_fixture(const std::string &name) {
  return read_file(fixture(name));
}

inline const Resources &resources() {
  static const Resources r = Resources::load(
      data_dir() / "rules" / "baseline.rules", data_dir() / "i18n");
  return r;
}

inline const RuleBase &baseline() { return resources().rules; }

inline Construction construction(const std::string &fixture_name) {
  return parse_gcs(load_fixture(fixture_name));
}

struct CommandResult {
  int status = -1;
  std::string out;
};

/// Runs `gddx <args>` through the shell; stdout captured, stderr folded in
/// only when `with_stderr` is set. `env` is a shell assignment prefix.
inline CommandResult run_cli(const std::string &args, bool with_stderr = false,
                             const std::string &env = "") {
  std::string cmd = env + " '" + GDDX_CLI + "' " + args;
  cmd += with_stderr ? " 2>&1" : " 2>/dev/null";
  CommandResult r;
  std::unique_ptr<FILE, int (*)(FILE *)> pipe(popen(cmd.c_str(), "r"), pclose);
  if (!pipe)
    return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = fread(buf.data(), 1, buf.size(), pipe.get())) > 0)
    r.out.append(buf.data(), n);
  const int raw = pclose(pipe.release());
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

inline std::string quoted(const std::filesystem::path &p) {
  return "'" + p.string() + "'";
}

} // namespace gddx::test
