/// @file service.hpp
/// @brief HTTP/JSON labeling API over a running engine.

#pragma once

#include "remp/engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <memory>
#include <string>

namespace remp {

nlohmann::json session_json(const SessionSnapshot& s);
nlohmann::json progress_json(const SessionSnapshot& s);
/// Side-by-side attribute values for every attribute match, plus up to
/// `max_neighbors` relationship neighbors per side.
nlohmann::json question_json(const Engine& engine, VertexId q, std::size_t max_neighbors = 5);

/// Routes:
///   GET  /api/session
///   GET  /api/questions?worker_id=W
///   POST /api/labels   {worker_id, question_id, answer}
///   GET  /api/progress
/// plus optional static files at /.
class LabelService {
public:
  LabelService(const Engine& engine, ServiceLabelSource& source);
  ~LabelService();
  LabelService(const LabelService&) = delete;
  LabelService& operator=(const LabelService&) = delete;

  /// Serves files from `dir` at `/`. Call before start().
  void mount_static(const std::filesystem::path& dir);
  /// Binds and starts serving on a background thread; port 0 picks a free
  /// port. Returns the bound port.
  int start(const std::string& host, int port);
  void stop();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace remp
