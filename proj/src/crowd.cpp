#include "remp/crowd.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

namespace remp {

Worker Worker::simulated(std::string id, double error_rate) {
  Worker w;
  w.id = std::move(id);
  w.kind = WorkerKind::Simulated;
  w.error_rate = error_rate;
  w.quality = 1.0 - error_rate;
  if (!(w.quality > 0.0 && w.quality < 1.0))
    throw InvalidArgument("worker " + w.id + ": quality must lie in (0, 1)");
  return w;
}

Worker Worker::human(std::string id, double quality) {
  Worker w;
  w.id = std::move(id);
  w.kind = WorkerKind::Human;
  w.quality = quality;
  if (!(quality > 0.0 && quality < 1.0))
    throw InvalidArgument("worker " + w.id + ": quality must lie in (0, 1)");
  return w;
}

std::vector<Worker> load_worker_pool(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open worker pool " + file.string());
  std::vector<Worker> pool;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      f.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    auto bad = [&](const std::string& why) {
      return ConfigError(file.string() + ":" + std::to_string(lineno) + ": " + why);
    };
    if (f.size() < 2 || f.size() > 3 || f[0].empty()) throw bad("expected id, kind, value");
    std::optional<double> value;
    if (f.size() == 3 && !f[2].empty()) {
      double x = 0.0;
      auto [p, ec] = std::from_chars(f[2].data(), f[2].data() + f[2].size(), x);
      if (ec != std::errc{} || p != f[2].data() + f[2].size()) throw bad("bad number");
      value = x;
    }
    try {
      if (f[1] == "simulated") {
        if (!value) throw bad("simulated worker needs an error rate");
        pool.push_back(Worker::simulated(f[0], *value));
      } else if (f[1] == "human") {
        pool.push_back(Worker::human(f[0], value.value_or(kDefaultHumanQuality)));
      } else {
        throw bad("unknown worker kind '" + f[1] + "'");
      }
    } catch (const InvalidArgument& e) {
      throw bad(e.what());
    }
  }
  return pool;
}

std::vector<Worker> simulated_pool(std::size_t n, double error_rate) {
  std::vector<Worker> pool;
  pool.reserve(n);
  // λ must stay inside (0, 1); perfect workers get a quality just below 1.
  const double e = std::clamp(error_rate, 1e-6, 1.0 - 1e-6);
  for (std::size_t i = 0; i < n; ++i) {
    auto w = Worker::simulated("w" + std::to_string(i + 1), e);
    w.error_rate = error_rate;
    pool.push_back(std::move(w));
  }
  return pool;
}

Answer simulate_answer(const Worker& worker, bool is_match, std::mt19937_64& rng) {
  std::bernoulli_distribution flip(std::clamp(worker.error_rate, 0.0, 1.0));
  const bool answer = flip(rng) ? !is_match : is_match;
  return answer ? Answer::Match : Answer::NonMatch;
}

std::vector<Assignment> assign(std::span<const VertexId> batch, std::span<const Worker> pool,
                               std::size_t n) {
  if (pool.size() < n)
    throw InvalidArgument("worker pool has " + std::to_string(pool.size()) + " workers, " +
                          std::to_string(n) + " needed per question");
  std::vector<Assignment> out;
  out.reserve(batch.size() * n);
  std::size_t next = 0;
  for (auto q : batch)
    for (std::size_t i = 0; i < n; ++i) {
      out.push_back({q, pool[next].id, AssignmentState::Pending});
      next = (next + 1) % pool.size();
    }
  return out;
}

void AssignmentTable::open(std::span<const VertexId> batch, std::size_t per_question) {
  std::lock_guard lock(mu_);
  batch_.assign(batch.begin(), batch.end());
  per_question_ = per_question;
  answers_.clear();
  received_.clear();
  for (auto q : batch_) answers_[q];
}

void AssignmentTable::close() {
  std::lock_guard lock(mu_);
  batch_.clear();
  answers_.clear();
  received_.clear();
  per_question_ = 0;
}

std::vector<VertexId> AssignmentTable::pending_for(const std::string& worker) const {
  std::lock_guard lock(mu_);
  std::vector<VertexId> out;
  for (auto q : batch_) {
    const auto& recs = answers_.at(q);
    if (recs.size() >= per_question_) continue;
    if (std::any_of(recs.begin(), recs.end(),
                    [&](const LabelRecord& r) { return r.worker == worker; }))
      continue;
    out.push_back(q);
  }
  return out;
}

SubmitResult AssignmentTable::submit(LabelRecord record, std::size_t* answered) {
  std::lock_guard lock(mu_);
  auto it = answers_.find(record.question);
  if (it == answers_.end()) return SubmitResult::UnknownQuestion;
  auto& recs = it->second;
  if (std::any_of(recs.begin(), recs.end(),
                  [&](const LabelRecord& r) { return r.worker == record.worker; }))
    return SubmitResult::Duplicate;
  if (recs.size() >= per_question_) return SubmitResult::BatchFull;
  recs.push_back(record);
  if (answered) *answered = recs.size();
  received_.push_back(std::move(record));
  return SubmitResult::Accepted;
}

bool AssignmentTable::complete() const {
  std::lock_guard lock(mu_);
  if (batch_.empty()) return false;
  return std::all_of(answers_.begin(), answers_.end(),
                     [&](const auto& kv) { return kv.second.size() >= per_question_; });
}

std::vector<LabelRecord> AssignmentTable::records() const {
  std::lock_guard lock(mu_);
  return received_;
}

std::size_t AssignmentTable::answered(VertexId q) const {
  std::lock_guard lock(mu_);
  auto it = answers_.find(q);
  return it == answers_.end() ? 0 : it->second.size();
}

std::size_t AssignmentTable::per_question() const {
  std::lock_guard lock(mu_);
  return per_question_;
}

std::vector<VertexId> AssignmentTable::batch() const {
  std::lock_guard lock(mu_);
  return batch_;
}

} // namespace remp
