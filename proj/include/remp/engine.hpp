/// @file engine.hpp
/// @brief The human-machine loop: pipeline setup, question rounds, truth
///        inference, final match emission.

#pragma once

#include "remp/candidates.hpp"
#include "remp/crowd.hpp"
#include "remp/er_graph.hpp"
#include "remp/metrics.hpp"
#include "remp/propagation.hpp"
#include "remp/selection.hpp"
#include "remp/truth.hpp"

#include <condition_variable>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace remp {

enum class LabelMode : std::uint8_t { Simulated, Serve };

struct EngineConfig {
  std::filesystem::path kb1_attrs, kb1_rels, kb2_attrs, kb2_rels;
  std::filesystem::path gold;    // empty: none
  std::filesystem::path workers; // empty: simulated pool built from error_rate
  std::filesystem::path out;     // empty: do not write
  std::filesystem::path label_log;
  std::filesystem::path dump_dir; // intermediate TSVs when set

  std::string label_attr1 = "label";
  std::string label_attr2 = "label";
  LabelMode mode = LabelMode::Simulated;

  double t_label = kDefaultLabelThreshold;
  double s_min = kDefaultMinAttributeScore;
  std::size_t k = kDefaultPruneK;
  double tau = 0.9;
  std::size_t mu = 10;
  std::optional<std::size_t> budget; // unlimited when empty
  double error_rate = 0.0;
  std::size_t assignments = 5;
  std::uint64_t seed = 42;
  double psi = 0.9;
  TruthThresholds thresholds;
  PropagationOptions propagation;

  /// Sets one option from its textual form, e.g. ("tau", "0.8").
  /// Throws ConfigError on unknown keys or malformed values.
  void set(std::string_view key, std::string_view value);
  /// Fails fast on inconsistent settings; `need_files` also requires the
  /// KB paths (not needed when KBs are supplied in memory).
  void validate(bool need_files = true) const;
};

/// Everything computed before the first question is asked.
struct Pipeline {
  std::optional<AttributeId> label1, label2;
  MatchSets sets;
  std::vector<AttributeMatch> attribute_matches;
  std::vector<SimilarityVector> candidate_vectors; // aligned with sets.candidates
  std::vector<SimilarityVector> retained_vectors;  // aligned with sets.retained
};

/// Candidate generation, attribute matching, similarity vectors and pruning.
/// Throws ConfigError when the KBs share no exact labels.
Pipeline build_pipeline(const KnowledgeBase& kb1, const KnowledgeBase& kb2,
                        const EngineConfig& config);

/// Dominated marks a non-match implied by a labeled non-match whose
/// similarity vector dominates the pair's.
enum class VertexState : std::uint8_t {
  Unresolved,
  Hard,
  LabeledMatch,
  LabeledNonMatch,
  Inferred,
  Dominated
};

enum class Provenance : std::uint8_t { Labeled, Inferred, Classified };
std::string_view to_string(Provenance p);

struct FinalMatch {
  VertexId vertex = 0;
  EntityId u1 = 0;
  EntityId u2 = 0;
  Provenance provenance = Provenance::Labeled;
  double probability = 0.0;
};

enum class StopReason : std::uint8_t { None, Budget, AllResolved, NoBenefit, Cancelled };
std::string_view to_string(StopReason r);

/// Stop when the budget is spent, no unresolved vertex is left, or the
/// selection came back empty (`selectable` = number of picked questions;
/// pass a nonzero value to test only the first two conditions).
StopReason stop_condition(std::size_t asked, std::optional<std::size_t> budget,
                          std::size_t unresolved, std::size_t selectable);

/// Supplies answers for a batch of questions.
class LabelSource {
public:
  virtual ~LabelSource() = default;
  /// Blocks until every question has its answers; nullopt when cancelled.
  virtual std::optional<std::vector<LabelRecord>> collect(std::span<const VertexId> batch) = 0;
  virtual double quality(const std::string& worker) const = 0;
  virtual std::size_t answers_per_question() const = 0;
};

struct SessionSnapshot {
  std::size_t loop = 0;
  std::size_t asked = 0;
  std::size_t resolved = 0;
  std::size_t remaining = 0;
  std::optional<std::size_t> budget;
  std::size_t labeled_matches = 0;
  std::size_t labeled_non_matches = 0;
  std::size_t dominated = 0;
  std::size_t inferred = 0;
  std::size_t hard = 0;
  bool finished = false;
  StopReason stop = StopReason::None;
  std::optional<Metrics> metrics; // current output vs gold, when gold is loaded
};

struct RunReport {
  Metrics metrics; // zero when no gold
  bool has_gold = false;
  double reduction_ratio = 0.0;
  double pair_completeness = 0.0;
  std::size_t candidates = 0;
  std::size_t retained = 0;
  std::size_t questions = 0;
  std::size_t loops = 0;
  StopReason stop = StopReason::None;
};

class Engine {
public:
  /// Loads the KBs named in the config.
  explicit Engine(EngineConfig config);
  Engine(KnowledgeBase kb1, KnowledgeBase kb2, EngineConfig config);
  ~Engine();
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  /// Label source matching the config: simulated workers answering from
  /// the gold standard, or nullptr in serve mode (see ServiceLabelSource).
  std::unique_ptr<LabelSource> make_simulated_source() const;

  /// Runs the loop to completion with `source` and computes the final match
  /// set. Writes the output and label log files when configured.
  RunReport run(LabelSource& source);

  const EngineConfig& config() const { return config_; }
  const KnowledgeBase& kb1() const { return kb1_; }
  const KnowledgeBase& kb2() const { return kb2_; }
  const Pipeline& pipeline() const { return pipeline_; }
  const ErGraph& graph() const { return graph_; }
  const std::vector<FinalMatch>& matches() const { return matches_; }
  std::span<const VertexState> states() const { return states_; }
  bool has_gold() const { return gold_.has_value(); }
  const NamedPairSet* gold() const { return gold_ ? &*gold_ : nullptr; }
  bool is_gold_match(VertexId v) const;

  /// Thread-safe copy of the session counters.
  SessionSnapshot snapshot() const;

  NamedPairSet match_names() const;
  void write_matches(const std::filesystem::path& file) const;
  /// Appends to the configured label log, if any. Thread-safe.
  void log_labels(std::span<const LabelRecord> records);

private:
  void setup();
  std::vector<double> propagation_priors() const;
  ConsistencyTable estimate_table() const;
  void mark_inferred(const ProbErGraph& pg);
  void mark_dominated();
  void apply_resolutions(std::span<const Resolution> resolutions);
  void finalize();
  void publish(bool finished, StopReason stop);
  std::size_t unresolved_count() const;

  EngineConfig config_;
  KnowledgeBase kb1_, kb2_;
  std::optional<NamedPairSet> gold_;
  Pipeline pipeline_;
  ErGraph graph_;
  std::vector<double> priors_;
  std::vector<double> posteriors_;
  std::vector<VertexState> states_;
  std::vector<double> inferred_prob_;
  std::vector<FinalMatch> matches_;
  std::size_t asked_ = 0;
  std::size_t loops_ = 0;

  mutable std::mutex snapshot_mu_;
  SessionSnapshot snapshot_;
  std::mutex log_mu_;
};

/// Simulated workers answering from the engine's gold standard; a pair
/// missing from the gold file counts as a non-match.
class SimulatedLabelSource : public LabelSource {
public:
  SimulatedLabelSource(const Engine& engine, std::vector<Worker> pool, std::size_t per_question,
                       std::uint64_t seed);
  std::optional<std::vector<LabelRecord>> collect(std::span<const VertexId> batch) override;
  double quality(const std::string& worker) const override;
  std::size_t answers_per_question() const override { return per_question_; }

private:
  const Engine& engine_;
  std::vector<Worker> pool_;
  std::size_t per_question_;
  std::mt19937_64 rng_;
  std::size_t next_worker_ = 0;
};

/// Answers arrive through submit() (the HTTP service). collect() opens the
/// batch and waits for it to fill up or for cancel().
class ServiceLabelSource : public LabelSource {
public:
  ServiceLabelSource(std::vector<Worker> pool, std::size_t per_question);
  std::optional<std::vector<LabelRecord>> collect(std::span<const VertexId> batch) override;
  double quality(const std::string& worker) const override;
  std::size_t answers_per_question() const override { return per_question_; }

  SubmitResult submit(LabelRecord record, std::size_t* answered = nullptr);
  std::vector<VertexId> pending_for(const std::string& worker) const {
    return table_.pending_for(worker);
  }
  const AssignmentTable& table() const { return table_; }
  void cancel();

private:
  std::vector<Worker> pool_;
  std::size_t per_question_;
  AssignmentTable table_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool cancelled_ = false;
};

} // namespace remp
