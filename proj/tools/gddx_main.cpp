#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "gddx/http.hpp"
#include "gddx/service.hpp"

#ifndef GDDX_DATA_DIR
#define GDDX_DATA_DIR "data"
#endif

namespace fs = std::filesystem;
using namespace gddx;

namespace {

struct Paths {
  std::string rules;
  std::string catalogs;

  fs::path rules_file() const {
    if (!rules.empty())
      return rules;
    if (const char *env = std::getenv("GDDX_RULES"); env && *env)
      return env;
    return fs::path(GDDX_DATA_DIR) / "rules" / "baseline.rules";
  }
  fs::path catalog_dir() const {
    return catalogs.empty() ? fs::path(GDDX_DATA_DIR) / "i18n"
                            : fs::path(catalogs);
  }
};

std::optional<Resources> load_resources(const Paths &p) {
  try {
    return Resources::load(p.rules_file(), p.catalog_dir());
  } catch (const ParseError &e) {
    std::cerr << "error: " << p.rules_file().string() << ": " << e.what()
              << '\n';
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return std::nullopt;
}

SourceFormat format_of(const fs::path &file) {
  const auto ext = file.extension().string();
  return ext == ".xml" || ext == ".ggb" ? SourceFormat::ggb : SourceFormat::gcs;
}

int cmd_prove(const Paths &paths, const std::string &file,
              ProveRequest req) {
  try {
    req.source = read_file(file);
  } catch (const Error &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  req.format = format_of(file);
  auto res = load_resources(paths);
  if (!res)
    return 2;
  const auto out = run_prove(*res, req);
  std::cout << out.rendering;
  for (const auto &d : out.diagnostics)
    std::cerr << file << ": " << d << '\n';
  return out.exit_code;
}

int cmd_detect(const std::string &file, std::uint64_t seed) {
  try {
    const auto c = parse_source(read_file(file), format_of(file));
    int n = 0;
    for (const auto &f : detect(c, seed))
      std::cout << ++n << ". " << to_statement(f) << '\n';
    return 0;
  } catch (const ParseError &e) {
    std::cerr << file << ": " << e.what() << '\n';
    return 2;
  } catch (const DegenerateDiagram &e) {
    std::cerr << file << ": " << e.what() << '\n';
    return 3;
  } catch (const Error &e) {
    std::cerr << file << ": " << e.what() << '\n';
    return 2;
  }
}

int cmd_lint(const fs::path &dir) {
  const auto en = dir / "en.csv";
  if (!fs::is_regular_file(en)) {
    std::cerr << "error: " << en.string() << " not found\n";
    return 2;
  }
  try {
    const auto baseline = load_catalog(read_file(en), "en");
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
      if (e.path().extension() == ".csv" && e.path().filename() != "en.csv")
        files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<Catalog> cats;
    for (const auto &f : files) {
      try {
        cats.push_back(load_catalog(read_file(f), f.stem().string()));
      } catch (const ParseError &e) {
        std::cerr << f.string() << ": " << e.what() << '\n';
        return 2;
      }
    }
    const auto report = lint(cats, baseline);
    if (report.clean())
      std::cout << "ok: " << cats.size() + 1 << " catalogs, "
                << baseline.entries.size() << " keys\n";
    else
      std::cout << report.to_string();
    return report.exit_status();
  } catch (const ParseError &e) {
    std::cerr << en.string() << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_serve(const Paths &paths, const std::string &host, int port,
              const std::string &static_dir) {
  auto res = load_resources(paths);
  if (!res)
    return 2;
  httplib::Server srv;
  // no SO_REUSEPORT, so a port already in use is an error
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
               reinterpret_cast<const void *>(&yes), sizeof(yes));
  });
  std::optional<fs::path> root;
  if (!static_dir.empty())
    root = static_dir;
  install_routes(srv, std::make_shared<const Resources>(std::move(*res)), root);
  int bound = port;
  if (port == 0)
    bound = srv.bind_to_any_port(host);
  else if (!srv.bind_to_port(host, port))
    bound = -1;
  if (bound <= 0) {
    std::cerr << "error: cannot listen on " << host << ':' << port << '\n';
    return 3;
  }
  std::cout << "listening on http://" << host << ':' << bound << std::endl;
  return srv.listen_after_bind() ? 0 : 3;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Geometry theorem prover"};
  app.require_subcommand(1);
  Paths paths;
  app.add_option("--rules", paths.rules,
                 "Rule file (default: $GDDX_RULES or the baseline rules)");
  app.add_option("--catalogs", paths.catalogs, "Directory of <lang>.csv files");

  auto *prove = app.add_subcommand("prove", "Prove a goal");
  std::string prove_file, format = "tree", backend = "gdd";
  ProveRequest req;
  bool no_structure = false;
  prove->add_option("file", prove_file, "Construction (.gcs or geogebra .xml)")
      ->required();
  prove->add_option("--goal", req.goal,
                    "Goal fact, e.g. \"cyclic D E F G\", or auto:<n>");
  prove->add_option("--lang", req.lang, "Language tag")->capture_default_str();
  prove->add_option("--format", format, "Rendering")
      ->check(CLI::IsMember({"flat", "tree", "dot"}))
      ->capture_default_str();
  prove->add_flag("--no-structure", no_structure, "Flat list instead of tree");
  prove->add_option("--backend", backend, "Prover")
      ->check(CLI::IsMember({"gdd", "wu"}))
      ->capture_default_str();
  prove->add_option("--seed", req.seed, "Diagram seed")->capture_default_str();

  auto *det = app.add_subcommand("detect", "List candidate goals");
  std::string detect_file;
  std::uint64_t detect_seed = 0;
  det->add_option("file", detect_file, "Construction")->required();
  det->add_option("--seed", detect_seed, "Diagram seed")->capture_default_str();

  auto *lint_cmd = app.add_subcommand("i18n-lint", "Check catalogs for drift");
  std::string lint_dir;
  lint_cmd->add_option("dir", lint_dir, "Directory holding en.csv")
      ->required();

  auto *serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  serve->add_option("--port", port, "Port (0 picks a free one)")
      ->capture_default_str();
  serve->add_option("--host", host, "Bind address")->capture_default_str();
  serve->add_option("--static", static_dir, "Directory of web UI files");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  if (*prove) {
    req.mode = format == "flat"  ? RenderMode::flat
               : format == "dot" ? RenderMode::dot
                                 : RenderMode::tree;
    req.structure = !no_structure;
    req.backend = backend == "wu" ? Backend::wu : Backend::gdd;
    return cmd_prove(paths, prove_file, req);
  }
  if (*det)
    return cmd_detect(detect_file, detect_seed);
  if (*lint_cmd)
    return cmd_lint(lint_dir);
  return cmd_serve(paths, host, port, static_dir);
}
