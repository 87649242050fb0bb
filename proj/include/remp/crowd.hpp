/// @file crowd.hpp
/// @brief Workers, simulated answers and assignment bookkeeping.

#pragma once

#include "remp/er_graph.hpp"
#include "remp/truth.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

namespace remp {

enum class WorkerKind : std::uint8_t { Simulated, Human };

inline constexpr double kDefaultHumanQuality = 0.9;

struct Worker {
  std::string id;
  WorkerKind kind = WorkerKind::Simulated;
  double quality = kDefaultHumanQuality; // λ
  double error_rate = 0.0;               // simulated only

  /// λ = 1 - error_rate. Throws InvalidArgument when λ falls outside (0, 1).
  static Worker simulated(std::string id, double error_rate);
  static Worker human(std::string id, double quality = kDefaultHumanQuality);
};

/// Reads `worker_id<TAB>kind<TAB>quality_or_error_rate`; kind is `simulated`
/// or `human`. An empty third field on a human line means the default
/// quality. Lines starting with '#' are skipped.
std::vector<Worker> load_worker_pool(const std::filesystem::path& file);

/// `n` simulated workers named w1..wn sharing one error rate.
std::vector<Worker> simulated_pool(std::size_t n, double error_rate);

/// Ground truth with probability 1 - error_rate, flipped otherwise.
Answer simulate_answer(const Worker& worker, bool is_match, std::mt19937_64& rng);

enum class AssignmentState : std::uint8_t { Pending, Answered };

struct Assignment {
  VertexId question = 0;
  std::string worker;
  AssignmentState state = AssignmentState::Pending;
};

/// Round-robin: the j-th assignment of the whole batch goes to worker
/// (j mod |pool|), so every question gets n distinct workers when
/// |pool| >= n. Throws InvalidArgument otherwise.
std::vector<Assignment> assign(std::span<const VertexId> batch, std::span<const Worker> pool,
                               std::size_t n);

enum class SubmitResult : std::uint8_t { Accepted, Duplicate, UnknownQuestion, BatchFull };

/// Open assignment slots for a batch served to human workers: any worker may
/// answer a question once until it has `per_question` answers. Thread-safe.
class AssignmentTable {
public:
  AssignmentTable() = default;

  void open(std::span<const VertexId> batch, std::size_t per_question);
  void close();

  /// Questions of the open batch that `worker` has not answered and that
  /// still need answers, in batch order.
  std::vector<VertexId> pending_for(const std::string& worker) const;
  /// `answered`, when given, receives the question's answer count after an
  /// accepted submission.
  SubmitResult submit(LabelRecord record, std::size_t* answered = nullptr);

  bool complete() const;
  /// Answers received so far for the open batch, in submission order.
  std::vector<LabelRecord> records() const;
  std::size_t answered(VertexId q) const;
  std::size_t per_question() const;
  std::vector<VertexId> batch() const;

private:
  mutable std::mutex mu_;
  std::vector<VertexId> batch_;
  std::size_t per_question_ = 0;
  std::map<VertexId, std::vector<LabelRecord>> answers_;
  std::vector<LabelRecord> received_;
};

} // namespace remp
