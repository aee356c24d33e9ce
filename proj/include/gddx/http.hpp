#pragma once
#include <httplib.h>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "gddx/service.hpp"

namespace gddx {

namespace detail {

inline void send_json(httplib::Response &res, int status, const json &body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json; charset=utf-8");
}

inline void send_error(httplib::Response &res, int status,
                       const std::string &msg,
                       const std::optional<Diagnostic> &d = std::nullopt) {
  json body{{"error", msg}};
  if (d)
    body["diagnostic"] = to_json(*d);
  send_json(res, status, body);
}

struct SourceBody {
  std::string source;
  SourceFormat format = SourceFormat::gcs;
  std::uint64_t seed = 0;
};

inline SourceBody source_body(const json &j) {
  SourceBody b;
  b.source = j.at("source").get<std::string>();
  const auto fmt = j.value("format", std::string("gcs"));
  if (fmt != "gcs" && fmt != "ggb")
    throw Error("unknown format '" + fmt + "' (expected gcs or ggb)");
  b.format = fmt == "gcs" ? SourceFormat::gcs : SourceFormat::ggb;
  b.seed = j.value("seed", std::uint64_t{0});
  return b;
}

// Runs `f` on the parsed body; malformed JSON is a 400, input errors a 422.
template <class F>
void with_body(const httplib::Request &req, httplib::Response &res, F &&f) {
  json j;
  try {
    j = json::parse(req.body);
  } catch (const json::exception &e) {
    return send_error(res, 400, std::string("malformed JSON: ") + e.what());
  }
  try {
    f(j);
  } catch (const ParseError &e) {
    send_error(res, 422, e.what(), e.diagnostic());
  } catch (const json::exception &e) {
    send_error(res, 400, std::string("bad request: ") + e.what());
  } catch (const DegenerateDiagram &e) {
    send_error(res, 422, e.what());
  } catch (const Error &e) {
    send_error(res, 422, e.what());
  }
}

} // namespace detail

/// Registers the API (and optionally a static file root) on `srv`. Handlers
/// only read `res`, so requests can run concurrently.
inline void install_routes(httplib::Server &srv,
                           std::shared_ptr<const Resources> res,
                           const std::optional<std::filesystem::path>
                               &static_dir = std::nullopt) {
  srv.Post("/api/parse", [res](const httplib::Request &rq,
                               httplib::Response &rs) {
    detail::with_body(rq, rs, [&](const json &j) {
      const auto b = detail::source_body(j);
      const auto c = parse_source(b.source, b.format);
      json hyps = json::array();
      for (const auto &f : hypothesis_facts(c))
        hyps.push_back(to_string(f));
      json out{{"construction", to_json(c)}, {"hypotheses", hyps}};
      out["diagram"] = to_json(realize(c, b.seed));
      detail::send_json(rs, 200, out);
    });
  });

  srv.Post("/api/detect", [res](const httplib::Request &rq,
                                httplib::Response &rs) {
    detail::with_body(rq, rs, [&](const json &j) {
      const auto b = detail::source_body(j);
      const auto c = parse_source(b.source, b.format);
      json list = json::array();
      int n = 0;
      for (const auto &f : detect(c, b.seed))
        list.push_back({{"index", ++n},
                        {"fact", to_string(f)},
                        {"statement", to_statement(f)},
                        {"goal", "auto:" + std::to_string(n)}});
      detail::send_json(rs, 200, {{"candidates", list}});
    });
  });

  srv.Post("/api/prove", [res](const httplib::Request &rq,
                               httplib::Response &rs) {
    detail::with_body(rq, rs, [&](const json &j) {
      const auto out = run_prove(*res, prove_request_from_json(j));
      detail::send_json(rs, out.status == ProveStatus::error ? 422 : 200,
                        to_json(out));
    });
  });

  srv.Get(R"(/api/i18n/([A-Za-z0-9_-]+))",
          [res](const httplib::Request &rq, httplib::Response &rs) {
            const std::string lang = rq.matches[1];
            auto it = res->catalogs.find(lang);
            if (it == res->catalogs.end())
              return detail::send_error(rs, 404,
                                        "unknown language '" + lang + "'");
            detail::send_json(rs, 200, to_json(*it->second));
          });

  srv.Get("/api/rules", [res](const httplib::Request &, httplib::Response &rs) {
    detail::send_json(rs, 200, to_json(res->rules));
  });

  if (static_dir)
    srv.set_mount_point("/", static_dir->string());
}

} // namespace gddx
