#include "remp/service.hpp"

#include "remp/error.hpp"

#include <httplib.h>

#include <chrono>
#include <thread>

namespace remp {

using nlohmann::json;

namespace {

json base_session(const SessionSnapshot& s) {
  return {{"loop", s.loop},
          {"asked", s.asked},
          {"resolved", s.resolved},
          {"remaining", s.remaining},
          {"budget", s.budget ? json(*s.budget) : json(nullptr)},
          {"finished", s.finished}};
}

std::string first_value(const KnowledgeBase& kb, EntityId u, std::optional<AttributeId> a) {
  if (!a) return {};
  const auto ids = kb.attr_value_ids(u, *a);
  return ids.empty() ? std::string() : kb.literal(ids.front()).raw;
}

json neighborhood(const KnowledgeBase& kb, EntityId u, std::optional<AttributeId> label,
                  std::size_t max_neighbors) {
  json out = json::array();
  for (auto r : kb.out_relations(u))
    for (auto w : kb.neighbors(u, r)) {
      if (out.size() >= max_neighbors) return out;
      out.push_back({{"relation", kb.relations().name(r)},
                     {"entity", kb.entities().name(w)},
                     {"label", first_value(kb, w, label)}});
    }
  return out;
}

json values(const KnowledgeBase& kb, EntityId u, AttributeId a) {
  json out = json::array();
  for (auto id : kb.attr_value_ids(u, a)) out.push_back(kb.literal(id).raw);
  return out;
}

json error_body(const std::string& message) { return {{"error", message}}; }

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

} // namespace

json session_json(const SessionSnapshot& s) { return base_session(s); }

json progress_json(const SessionSnapshot& s) {
  json j = base_session(s);
  j["labeled_matches"] = s.labeled_matches;
  j["labeled_non_matches"] = s.labeled_non_matches;
  j["dominated"] = s.dominated;
  j["inferred"] = s.inferred;
  j["hard"] = s.hard;
  j["stop"] = std::string(to_string(s.stop));
  if (s.metrics)
    j["metrics"] = {{"precision", s.metrics->precision},
                    {"recall", s.metrics->recall},
                    {"f1", s.metrics->f1}};
  return j;
}

json question_json(const Engine& engine, VertexId q, std::size_t max_neighbors) {
  const auto& kb1 = engine.kb1();
  const auto& kb2 = engine.kb2();
  const auto& p = engine.graph().vertex(q);
  const auto& pl = engine.pipeline();
  json attrs = json::array();
  for (const auto& m : pl.attribute_matches)
    attrs.push_back({{"attr1", kb1.attributes().name(m.a1)},
                     {"attr2", kb2.attributes().name(m.a2)},
                     {"values1", values(kb1, p.u1, m.a1)},
                     {"values2", values(kb2, p.u2, m.a2)}});
  return {{"question_id", q},
          {"u1", kb1.entities().name(p.u1)},
          {"u2", kb2.entities().name(p.u2)},
          {"label1", first_value(kb1, p.u1, pl.label1)},
          {"label2", first_value(kb2, p.u2, pl.label2)},
          {"attributes", std::move(attrs)},
          {"neighborhood",
           {{"kb1", neighborhood(kb1, p.u1, pl.label1, max_neighbors)},
            {"kb2", neighborhood(kb2, p.u2, pl.label2, max_neighbors)}}}};
}

struct LabelService::Impl {
  const Engine& engine;
  ServiceLabelSource& source;
  httplib::Server server;
  std::thread thread;

  Impl(const Engine& e, ServiceLabelSource& s) : engine(e), source(s) { routes(); }

  void routes() {
    server.Get("/api/session", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, session_json(engine.snapshot()));
    });
    server.Get("/api/progress", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, progress_json(engine.snapshot()));
    });
    server.Get("/api/questions", [this](const httplib::Request& req, httplib::Response& res) {
      const auto worker = req.get_param_value("worker_id");
      if (worker.empty()) return reply(res, 400, error_body("worker_id is required"));
      json out = json::array();
      for (auto q : source.pending_for(worker)) out.push_back(question_json(engine, q));
      reply(res, 200, out);
    });
    server.Post("/api/labels", [this](const httplib::Request& req, httplib::Response& res) {
      const json body = json::parse(req.body, nullptr, false);
      if (body.is_discarded() || !body.is_object())
        return reply(res, 400, error_body("body must be a JSON object"));
      const auto w = body.find("worker_id");
      const auto q = body.find("question_id");
      const auto a = body.find("answer");
      if (w == body.end() || !w->is_string() || w->get<std::string>().empty())
        return reply(res, 400, error_body("worker_id must be a non-empty string"));
      if (q == body.end() || !q->is_number_unsigned())
        return reply(res, 400, error_body("question_id must be a non-negative integer"));
      if (a == body.end() || !a->is_string())
        return reply(res, 400, error_body("answer must be a string"));
      const auto answer = parse_answer(a->get<std::string>());
      if (!answer) return reply(res, 400, error_body("answer must be match, non_match or unsure"));

      const auto question = q->get<std::uint64_t>();
      if (question > std::numeric_limits<VertexId>::max())
        return reply(res, 404, error_body("unknown question"));
      LabelRecord record{static_cast<VertexId>(question), w->get<std::string>(), *answer,
                         std::chrono::duration_cast<std::chrono::seconds>(
                             std::chrono::system_clock::now().time_since_epoch())
                             .count()};
      const auto vid = record.question;
      std::size_t answered = 0;
      switch (source.submit(std::move(record), &answered)) {
      case SubmitResult::Accepted:
        return reply(res, 200,
                     {{"status", "accepted"},
                      {"question_id", vid},
                      {"answered", answered},
                      {"required", source.answers_per_question()}});
      case SubmitResult::Duplicate:
        return reply(res, 409, error_body("duplicate answer for this question"));
      case SubmitResult::BatchFull:
        return reply(res, 409, error_body("question already has all answers"));
      case SubmitResult::UnknownQuestion:
        return reply(res, 404, error_body("question is not in the open batch"));
      }
    });
  }
};

LabelService::LabelService(const Engine& engine, ServiceLabelSource& source)
    : impl_(std::make_unique<Impl>(engine, source)) {}

LabelService::~LabelService() { stop(); }

void LabelService::mount_static(const std::filesystem::path& dir) {
  if (!impl_->server.set_mount_point("/", dir.string()))
    throw IoError("cannot serve static files from " + dir.string());
}

int LabelService::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void LabelService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

} // namespace remp
