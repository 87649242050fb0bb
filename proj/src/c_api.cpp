#include "remp/remp.h"

#include "remp/engine.hpp"
#include "remp/error.hpp"
#include "remp/service.hpp"

#include <future>
#include <memory>
#include <string>

struct remp_config {
  remp::EngineConfig config;
};

struct remp_engine {
  std::unique_ptr<remp::Engine> engine;
  std::unique_ptr<remp::ServiceLabelSource> source;
  std::unique_ptr<remp::LabelService> service;
  std::future<remp::RunReport> session;
  std::string stop_reason;
};

namespace {

thread_local std::string last_error;

remp_status fail(remp_status status, const std::string& message) {
  last_error = message;
  return status;
}

template <class Fn>
remp_status guarded(Fn&& fn) {
  try {
    last_error.clear();
    return fn();
  } catch (const remp::Error& e) {
    return fail(static_cast<remp_status>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(REMP_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(REMP_ERR_INTERNAL, e.what());
  }
}

remp_metrics to_c(const remp::Metrics& m) {
  return {m.precision, m.recall, m.f1, m.predicted, m.gold, m.true_positives};
}

void fill(remp_report* out, const remp::RunReport& r, const remp::Engine& engine) {
  out->metrics = to_c(r.metrics);
  out->has_gold = r.has_gold ? 1 : 0;
  out->reduction_ratio = r.reduction_ratio;
  out->pair_completeness = r.pair_completeness;
  out->candidates = r.candidates;
  out->retained = r.retained;
  out->questions = r.questions;
  out->loops = r.loops;
  out->matches = engine.matches().size();
  out->stop_reason = remp::to_string(r.stop).data();
}

} // namespace

extern "C" {

const char* remp_version(void) { return "0.1.0"; }

const char* remp_last_error(void) { return last_error.c_str(); }

remp_status remp_config_new(remp_config** out) {
  return guarded([&] {
    if (!out) return fail(REMP_ERR_INVALID_ARGUMENT, "null output pointer");
    *out = new remp_config{};
    return REMP_OK;
  });
}

void remp_config_free(remp_config* config) { delete config; }

remp_status remp_config_set(remp_config* config, const char* key, const char* value) {
  return guarded([&] {
    if (!config || !key || !value) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    config->config.set(key, value);
    return REMP_OK;
  });
}

remp_status remp_engine_new(const remp_config* config, remp_engine** out) {
  return guarded([&] {
    if (!config || !out) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    auto handle = std::make_unique<remp_engine>();
    handle->engine = std::make_unique<remp::Engine>(config->config);
    *out = handle.release();
    return REMP_OK;
  });
}

void remp_engine_free(remp_engine* engine) {
  if (!engine) return;
  if (engine->source) engine->source->cancel();
  if (engine->session.valid()) engine->session.wait();
  if (engine->service) engine->service->stop();
  delete engine;
}

remp_status remp_engine_run(remp_engine* engine, remp_report* report) {
  return guarded([&] {
    if (!engine || !report) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    if (engine->session.valid()) return fail(REMP_ERR_STATE, "a served session is active");
    if (engine->engine->config().mode != remp::LabelMode::Simulated)
      return fail(REMP_ERR_STATE, "engine is configured for serve mode");
    auto source = engine->engine->make_simulated_source();
    fill(report, engine->engine->run(*source), *engine->engine);
    return REMP_OK;
  });
}

remp_status remp_engine_serve(remp_engine* engine, const char* host, int port,
                              const char* static_dir, int* bound_port) {
  return guarded([&] {
    if (!engine || !host) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    if (engine->service) return fail(REMP_ERR_STATE, "already serving");
    const auto& cfg = engine->engine->config();
    std::vector<remp::Worker> pool;
    if (!cfg.workers.empty()) pool = remp::load_worker_pool(cfg.workers);
    engine->source = std::make_unique<remp::ServiceLabelSource>(std::move(pool), cfg.assignments);
    engine->service = std::make_unique<remp::LabelService>(*engine->engine, *engine->source);
    if (static_dir && *static_dir) engine->service->mount_static(static_dir);
    const int bound = engine->service->start(host, port);
    if (bound_port) *bound_port = bound;
    engine->session = std::async(std::launch::async, [engine] {
      return engine->engine->run(*engine->source);
    });
    return REMP_OK;
  });
}

remp_status remp_engine_wait(remp_engine* engine, remp_report* report) {
  return guarded([&] {
    if (!engine || !report) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    if (!engine->session.valid()) return fail(REMP_ERR_STATE, "no served session");
    fill(report, engine->session.get(), *engine->engine);
    return REMP_OK;
  });
}

remp_status remp_engine_stop(remp_engine* engine) {
  return guarded([&] {
    if (!engine) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    if (engine->source) engine->source->cancel();
    if (engine->session.valid()) engine->session.wait();
    if (engine->service) engine->service->stop();
    return REMP_OK;
  });
}

remp_status remp_engine_finished(const remp_engine* engine, int* finished) {
  return guarded([&] {
    if (!engine || !finished) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    *finished = engine->engine->snapshot().finished ? 1 : 0;
    return REMP_OK;
  });
}

remp_status remp_engine_write_matches(const remp_engine* engine, const char* path) {
  return guarded([&] {
    if (!engine || !path) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    engine->engine->write_matches(path);
    return REMP_OK;
  });
}

remp_status remp_evaluate_files(const char* predicted, const char* gold, remp_metrics* out) {
  return guarded([&] {
    if (!predicted || !gold || !out) return fail(REMP_ERR_INVALID_ARGUMENT, "null argument");
    *out = to_c(remp::evaluate(remp::load_pair_file(predicted), remp::load_pair_file(gold)));
    return REMP_OK;
  });
}

} // extern "C"
