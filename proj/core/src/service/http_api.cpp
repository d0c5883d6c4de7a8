// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/http_api.hpp"

#include <httplib.h>

#include "copygen/error.hpp"
#include "json_values.hpp"

namespace copygen::service {

using nlohmann::json;

struct HttpServer::Impl {
  GenerationService& service;
  httplib::Server server;

  explicit Impl(GenerationService& s) : service(s) { routes(); }

  static void reply(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(detail::dump(body), "application/json");
  }

  static void fail(httplib::Response& res, const std::string& code, const std::string& detail) {
    reply(res, status_for(code), {{"error", code}, {"detail", detail}});
  }

  static json body_of(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
      auto v = json::parse(req.body);
      if (!v.is_object()) throw Error("bad_request", "body must be a JSON object");
      return v;
    } catch (const json::exception& e) {
      throw Error("bad_request", e.what());
    }
  }

  // Runs a handler and turns failures into JSON error bodies.
  template <typename Fn>
  static auto guard(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
      try {
        fn(req, res);
      } catch (const Error& e) {
        fail(res, e.code(), e.what());
      } catch (const json::exception& e) {
        fail(res, "bad_request", e.what());
      } catch (const std::exception& e) {
        fail(res, "internal", e.what());
      }
    };
  }

  static json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

  void routes() {
    server.Post("/v1/generate", guard([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = body_of(req);
      GenerateRequest r;
      if (auto it = body.find("sku"); it != body.end() && !it->is_null()) r.sku = it->get<std::string>();
      if (auto it = body.find("record"); it != body.end() && !it->is_null()) {
        try {
          r.record = corpus::record_from_json_line(it->dump());
        } catch (const Error& e) {
          throw Error("bad_request", e.what());
        }
      }
      if (auto it = body.find("beam_size"); it != body.end()) r.beam_size = it->get<std::size_t>();
      if (auto it = body.find("max_len"); it != body.end()) r.max_len = it->get<std::size_t>();
      reply(res, 200, detail::artifact_value(service.generate(r)));
    }));

    server.Get(R"(/v1/descriptions/([^/]+))", guard([this](const httplib::Request& req, httplib::Response& res) {
      const auto sku = req.matches[1].str();
      auto a = service.approved_description(sku);
      if (!a) throw Error("not_found", "no approved description for sku " + sku);
      reply(res, 200, detail::artifact_value(*a));
    }));

    server.Post(R"(/v1/screening/([^/]+)/verdict)", guard([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = body_of(req);
      if (!body.contains("verdict")) throw Error("bad_request", "missing verdict");
      const auto verdict = parse_review_verdict(body.at("verdict").get<std::string>());
      std::optional<std::string> edited;
      if (auto it = body.find("edited_text"); it != body.end() && !it->is_null()) edited = it->get<std::string>();
      const auto result = service.board().review(req.matches[1].str(), verdict, edited);
      auto out = detail::artifact_value(result.artifact);
      out["acceptance_rate_today"] = optional_number(result.acceptance_rate_today);
      reply(res, 200, out);
    }));

    server.Get("/v1/screening/pending", guard([this](const httplib::Request& req, httplib::Response& res) {
      std::size_t limit = 50;
      if (req.has_param("limit")) {
        try {
          limit = std::stoul(req.get_param_value("limit"));
        } catch (const std::exception&) {
          throw Error("bad_request", "limit must be a nonnegative integer");
        }
      }
      json items = json::array();
      for (const auto& a : service.board().pending(limit)) items.push_back(detail::artifact_value(a));
      reply(res, 200, {{"artifacts", items}, {"total", service.board().pending_count()}});
    }));

    server.Get("/v1/stats", guard([this](const httplib::Request&, httplib::Response& res) {
      const auto s = service.stats();
      json buckets = json::object();
      for (const auto& [name, f] : service.events().funnel_by_bucket()) {
        buckets[name] = {{"pv", f.pv},
                         {"clicks", f.clicks},
                         {"purchases", f.purchases},
                         {"ctr", f.pv ? json(ctr(f)) : json(nullptr)},
                         {"cvr", f.clicks ? json(cvr(f)) : json(nullptr)}};
      }
      reply(res, 200,
            {{"acceptance_rate_today", optional_number(s.acceptance_rate_today)},
             {"ctr", optional_number(s.ctr)},
             {"cvr", optional_number(s.cvr)},
             {"cache_hit_rate", s.cache_hit_rate()},
             {"requests", s.requests},
             {"cache_hits", s.cache_hits},
             {"model_invocations", s.model_invocations},
             {"pending", service.board().pending_count()},
             {"buckets", buckets}});
    }));

    server.Post("/v1/events", guard([this](const httplib::Request& req, httplib::Response& res) {
      const auto body = body_of(req);
      if (!body.contains("records") || !body.at("records").is_array())
        throw Error("bad_request", "records must be an array");
      std::vector<EventRecord> records;
      for (const auto& r : body.at("records")) {
        try {
          records.push_back(detail::event_from_value(r));
        } catch (const Error& e) {
          throw Error("bad_request", e.what());
        }
      }
      reply(res, 200, {{"appended", service.events().append(records)}});
    }));

    server.Get("/v1/healthz", guard([this](const httplib::Request&, httplib::Response& res) {
      const auto version = service.model().version();
      reply(res, 200, {{"status", version.empty() ? "no_model" : "ok"}, {"model_version", version}});
    }));
  }
};

HttpServer::HttpServer(GenerationService& service) : impl_(std::make_unique<Impl>(service)) {}
HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error("bind_failed", "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpServer::serve() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
  if (impl_) impl_->server.stop();
}

int HttpServer::status_for(const std::string& code) {
  if (code == "unknown_product" || code == "unknown_artifact" || code == "not_found") return 404;
  if (code == "already_reviewed" || code == "not_eligible" || code == "not_enqueued" || code == "non_monotone_timestamp")
    return 409;
  if (code == "model_unavailable") return 503;
  if (code == "internal" || code == "io_error") return 500;
  return 400;
}

}  // namespace copygen::service
