#include "remp/engine.hpp"

#include "remp/error.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace remp {

namespace {

template <class T>
T parse_number(std::string_view key, std::string_view value) {
  T x{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), x);
  if (ec != std::errc{} || p != value.data() + value.size())
    throw ConfigError("option " + std::string(key) + ": bad value '" + std::string(value) + "'");
  return x;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw ConfigError("option " + std::string(key) + ": expected a boolean");
}

std::int64_t unix_now() {
  return std::chrono::duration_cast<std::chrono::seconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

bool is_open(VertexState s) { return s == VertexState::Unresolved || s == VertexState::Hard; }

} // namespace

void EngineConfig::set(std::string_view key, std::string_view value) {
  if (key == "kb1_attrs") kb1_attrs = std::string(value);
  else if (key == "kb1_rels") kb1_rels = std::string(value);
  else if (key == "kb2_attrs") kb2_attrs = std::string(value);
  else if (key == "kb2_rels") kb2_rels = std::string(value);
  else if (key == "gold") gold = std::string(value);
  else if (key == "workers") workers = std::string(value);
  else if (key == "out") out = std::string(value);
  else if (key == "label_log") label_log = std::string(value);
  else if (key == "dump_dir") dump_dir = std::string(value);
  else if (key == "label_attr1") label_attr1 = std::string(value);
  else if (key == "label_attr2") label_attr2 = std::string(value);
  else if (key == "mode") {
    if (value == "sim") mode = LabelMode::Simulated;
    else if (value == "serve") mode = LabelMode::Serve;
    else throw ConfigError("option mode: expected sim or serve");
  } else if (key == "t_label") t_label = parse_number<double>(key, value);
  else if (key == "s_min") s_min = parse_number<double>(key, value);
  else if (key == "k") k = parse_number<std::size_t>(key, value);
  else if (key == "tau") tau = parse_number<double>(key, value);
  else if (key == "mu") mu = parse_number<std::size_t>(key, value);
  else if (key == "budget") {
    if (value.empty() || value == "unlimited") budget.reset();
    else budget = parse_number<std::size_t>(key, value);
  } else if (key == "error_rate") error_rate = parse_number<double>(key, value);
  else if (key == "assignments") assignments = parse_number<std::size_t>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "psi") psi = parse_number<double>(key, value);
  else if (key == "t_hi") thresholds.high = parse_number<double>(key, value);
  else if (key == "t_lo") thresholds.low = parse_number<double>(key, value);
  else if (key == "all_subsets") propagation.one_to_one = !parse_bool(key, value);
  else if (key == "max_enumerated")
    propagation.max_enumerated = parse_number<std::size_t>(key, value);
  else throw ConfigError("unknown option '" + std::string(key) + "'");
}

void EngineConfig::validate(bool need_files) const {
  if (need_files && (kb1_attrs.empty() || kb1_rels.empty() || kb2_attrs.empty() ||
                     kb2_rels.empty()))
    throw ConfigError("all four KB files are required");
  if (mode == LabelMode::Simulated && gold.empty())
    throw ConfigError("no label source: simulation needs a gold standard");
  if (!(t_label > 0.0 && t_label <= 1.0)) throw ConfigError("t_label must lie in (0, 1]");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  if (k == 0) throw ConfigError("k must be positive");
  if (mu == 0) throw ConfigError("mu must be positive");
  if (assignments == 0) throw ConfigError("assignments must be positive");
  if (!(error_rate >= 0.0 && error_rate < 1.0)) throw ConfigError("error_rate must lie in [0, 1)");
  if (!(psi >= 0.0 && psi <= 1.0)) throw ConfigError("psi must lie in [0, 1]");
  if (!(thresholds.low >= 0.0 && thresholds.low < thresholds.high && thresholds.high <= 1.0))
    throw ConfigError("thresholds must satisfy 0 <= t_lo < t_hi <= 1");
  if (propagation.max_enumerated == 0 || propagation.max_enumerated > 20)
    throw ConfigError("max_enumerated must lie in [1, 20]");
}

Pipeline build_pipeline(const KnowledgeBase& kb1, const KnowledgeBase& kb2,
                        const EngineConfig& config) {
  Pipeline pl;
  pl.label1 = kb1.attributes().find(config.label_attr1);
  pl.label2 = kb2.attributes().find(config.label_attr2);
  if (!pl.label1) throw ConfigError("KB1 has no attribute '" + config.label_attr1 + "'");
  if (!pl.label2) throw ConfigError("KB2 has no attribute '" + config.label_attr2 + "'");
  pl.sets = generate_candidates(kb1, pl.label1, kb2, pl.label2, config.t_label);
  if (pl.sets.initial.empty())
    throw ConfigError("no initial matches: the KBs share no identical labels");

  const LiteralCache c1(kb1), c2(kb2);
  pl.attribute_matches = match_attributes_1to1(pl.sets.initial, kb1, c1, kb2, c2, config.s_min);
  pl.candidate_vectors.reserve(pl.sets.candidates.size());
  for (const auto& p : pl.sets.candidates)
    pl.candidate_vectors.push_back(
        build_similarity_vector(p, pl.attribute_matches, kb1, c1, kb2, c2));
  for (auto i : prune(pl.sets.candidates, pl.candidate_vectors, config.k)) {
    pl.sets.retained.push_back(pl.sets.candidates[i]);
    pl.retained_vectors.push_back(pl.candidate_vectors[i]);
  }
  return pl;
}

std::string_view to_string(Provenance p) {
  switch (p) {
  case Provenance::Labeled: return "labeled";
  case Provenance::Inferred: return "inferred";
  case Provenance::Classified: return "classified";
  }
  return "labeled";
}

std::string_view to_string(StopReason r) {
  switch (r) {
  case StopReason::None: return "none";
  case StopReason::Budget: return "budget";
  case StopReason::AllResolved: return "all_resolved";
  case StopReason::NoBenefit: return "no_benefit";
  case StopReason::Cancelled: return "cancelled";
  }
  return "none";
}

StopReason stop_condition(std::size_t asked, std::optional<std::size_t> budget,
                          std::size_t unresolved, std::size_t selectable) {
  if (budget && asked >= *budget) return StopReason::Budget;
  if (unresolved == 0) return StopReason::AllResolved;
  if (selectable == 0) return StopReason::NoBenefit;
  return StopReason::None;
}

Engine::Engine(EngineConfig config) : config_(std::move(config)) {
  config_.validate(true);
  kb1_ = load_kb(config_.kb1_attrs, config_.kb1_rels);
  kb2_ = load_kb(config_.kb2_attrs, config_.kb2_rels);
  setup();
}

Engine::Engine(KnowledgeBase kb1, KnowledgeBase kb2, EngineConfig config)
    : config_(std::move(config)), kb1_(std::move(kb1)), kb2_(std::move(kb2)) {
  config_.validate(false);
  setup();
}

Engine::~Engine() = default;

void Engine::setup() {
  if (!config_.gold.empty()) gold_ = load_pair_file(config_.gold);
  pipeline_ = build_pipeline(kb1_, kb2_, config_);
  graph_ = ErGraph::build(pipeline_.sets.retained, kb1_, kb2_);
  const auto n = graph_.vertex_count();
  priors_.resize(n);
  for (VertexId v = 0; v < n; ++v) priors_[v] = graph_.vertex(v).prior;
  posteriors_ = priors_;
  states_.assign(n, VertexState::Unresolved);
  inferred_prob_.assign(n, 0.0);
  if (!config_.label_log.empty()) {
    std::ofstream truncate(config_.label_log, std::ios::trunc);
    if (!truncate) throw IoError("cannot write " + config_.label_log.string());
  }
  if (!config_.dump_dir.empty()) {
    std::filesystem::create_directories(config_.dump_dir);
    write_pairs_tsv(config_.dump_dir / "candidates.tsv", pipeline_.sets.candidates, kb1_, kb2_);
    write_pairs_tsv(config_.dump_dir / "initial.tsv", pipeline_.sets.initial, kb1_, kb2_);
    write_pairs_tsv(config_.dump_dir / "retained.tsv", pipeline_.sets.retained, kb1_, kb2_);
    write_attribute_matches_tsv(config_.dump_dir / "attribute_matches.tsv",
                                pipeline_.attribute_matches, kb1_, kb2_);
  }
  publish(false, StopReason::None);
}

bool Engine::is_gold_match(VertexId v) const {
  if (!gold_) return false;
  const auto& p = graph_.vertex(v);
  return gold_->count({kb1_.entities().name(p.u1), kb2_.entities().name(p.u2)}) > 0;
}

std::vector<double> Engine::propagation_priors() const {
  std::vector<double> pri(priors_.size());
  for (std::size_t v = 0; v < pri.size(); ++v) {
    switch (states_[v]) {
    case VertexState::LabeledMatch: pri[v] = 1.0; break;
    case VertexState::LabeledNonMatch:
    case VertexState::Dominated: pri[v] = 0.0; break;
    default: pri[v] = std::clamp(priors_[v], kEpsMin, kEpsMax); break;
    }
  }
  return pri;
}

ConsistencyTable Engine::estimate_table() const {
  std::set<RelationPair> labels;
  for (const auto& e : graph_.edges()) labels.insert({e.r1, e.r2});

  std::vector<EntityPair> seeds;
  for (const auto& p : pipeline_.sets.initial) {
    const auto v = graph_.find(p.u1, p.u2);
    if (v && states_[*v] == VertexState::LabeledNonMatch) continue;
    seeds.push_back(p);
  }
  for (VertexId v = 0; v < graph_.vertex_count(); ++v)
    if (states_[v] == VertexState::LabeledMatch) seeds.push_back(graph_.vertex(v));
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  std::set<std::pair<EntityId, EntityId>> known;
  for (const auto& p : seeds) known.emplace(p.u1, p.u2);
  const PairPredicate in_graph = [this](EntityId a, EntityId b) {
    return graph_.find(a, b).has_value();
  };
  const PairPredicate is_known = [&known](EntityId a, EntityId b) {
    return known.count({a, b}) > 0;
  };
  ConsistencyTable table;
  for (const auto& label : labels)
    table.set(label, estimate_consistency(label.first, label.second, seeds, kb1_, kb2_, in_graph,
                                          is_known));
  return table;
}

void Engine::mark_inferred(const ProbErGraph& pg) {
  std::vector<VertexId> sources;
  for (VertexId v = 0; v < graph_.vertex_count(); ++v)
    if (states_[v] == VertexState::LabeledMatch) sources.push_back(v);
  if (sources.empty()) return;
  const auto dist = distances_from_sources(pg, sources, distance_threshold(config_.tau));
  for (VertexId v = 0; v < graph_.vertex_count(); ++v) {
    if (!std::isfinite(dist[v])) continue;
    if (is_open(states_[v])) states_[v] = VertexState::Inferred;
    if (states_[v] == VertexState::Inferred)
      inferred_prob_[v] = std::max(inferred_prob_[v], std::exp(-dist[v]));
  }
}

void Engine::apply_resolutions(std::span<const Resolution> resolutions) {
  for (const auto& r : resolutions) {
    posteriors_[r.question] = r.posterior;
    switch (r.state) {
    case ResolutionState::Match: states_[r.question] = VertexState::LabeledMatch; break;
    case ResolutionState::NonMatch: states_[r.question] = VertexState::LabeledNonMatch; break;
    case ResolutionState::Hard:
      states_[r.question] = VertexState::Hard;
      priors_[r.question] = r.posterior;
      break;
    case ResolutionState::Unresolved: break;
    }
  }
}

std::size_t Engine::unresolved_count() const {
  std::size_t n = 0;
  for (VertexId v = 0; v < graph_.vertex_count(); ++v)
    n += is_open(states_[v]) && !graph_.isolated(v);
  return n;
}

RunReport Engine::run(LabelSource& source) {
  const double zeta = distance_threshold(config_.tau);
  const auto quality = [&source](const std::string& w) { return source.quality(w); };
  StopReason stop = StopReason::None;
  for (;;) {
    const auto pg = to_probabilistic(graph_, estimate_table(), propagation_priors(), kb1_, kb2_,
                                     config_.propagation);
    mark_inferred(pg);
    mark_dominated();
    if ((stop = stop_condition(asked_, config_.budget, unresolved_count(), 1)) !=
        StopReason::None)
      break;

    std::vector<VertexId> open;
    for (VertexId v = 0; v < graph_.vertex_count(); ++v)
      if (is_open(states_[v]) && !graph_.isolated(v)) open.push_back(v);
    const auto inf = compute_inferred_sets(pg, open, zeta);
    std::vector<double> sel_priors(inf.questions.size());
    for (std::size_t i = 0; i < sel_priors.size(); ++i) sel_priors[i] = priors_[inf.questions[i]];
    std::size_t cap = config_.mu;
    if (config_.budget) cap = std::min(cap, *config_.budget - asked_);
    // Questions that can only settle themselves are left to the final pass.
    std::vector<std::size_t> picked;
    if (can_propagate(inf)) picked = select_questions(inf, sel_priors, cap);
    if ((stop = stop_condition(asked_, config_.budget, open.size(), picked.size())) !=
        StopReason::None)
      break;

    std::vector<VertexId> batch;
    batch.reserve(picked.size());
    for (auto i : picked) batch.push_back(inf.questions[i]);
    auto records = source.collect(batch);
    if (!records) {
      stop = StopReason::Cancelled;
      break;
    }
    log_labels(*records);
    // Exact-label priors of 1 would make every answer irrelevant.
    std::vector<double> truth_priors(priors_.size());
    for (std::size_t v = 0; v < priors_.size(); ++v)
      truth_priors[v] = std::clamp(priors_[v], kEpsMin, kEpsMax);
    apply_resolutions(resolve_labels(*records, truth_priors, quality,
                                     source.answers_per_question(), config_.thresholds));
    asked_ += batch.size();
    ++loops_;
    publish(false, StopReason::None);
  }

  finalize();
  publish(true, stop);
  if (!config_.out.empty()) write_matches(config_.out);

  RunReport report;
  report.candidates = pipeline_.sets.candidates.size();
  report.retained = pipeline_.sets.retained.size();
  report.reduction_ratio = reduction_ratio(report.retained, report.candidates);
  report.questions = asked_;
  report.loops = loops_;
  report.stop = stop;
  if (gold_) {
    report.has_gold = true;
    report.metrics = evaluate(match_names(), *gold_);
    report.pair_completeness = pair_completeness(pipeline_.sets.retained, kb1_, kb2_, *gold_);
  }
  return report;
}
void Engine::mark_dominated() {
  const auto& vec = pipeline_.retained_vectors;
  std::vector<VertexId> negatives;
  for (VertexId v = 0; v < graph_.vertex_count(); ++v)
    if (states_[v] == VertexState::LabeledNonMatch) negatives.push_back(v);
  for (VertexId v = 0; v < graph_.vertex_count(); ++v) {
    if (!is_open(states_[v])) continue;
    for (auto n : negatives) {
      if (dominates(vec[n], vec[v])) {
        states_[v] = VertexState::Dominated;
        break;
      }
    }
  }
}

void Engine::finalize() {
  const auto pg = to_probabilistic(graph_, estimate_table(), propagation_priors(), kb1_, kb2_,
                                   config_.propagation);
  mark_inferred(pg);
  if (!config_.dump_dir.empty())
    write_graph_tsv(config_.dump_dir / "prob_graph.tsv", graph_, pg, kb1_, kb2_);

  std::vector<PairLabel> labels(graph_.vertex_count(), PairLabel::Unknown);
  bool any_match = false;
  for (VertexId v = 0; v < graph_.vertex_count(); ++v) {
    if (states_[v] == VertexState::LabeledMatch || states_[v] == VertexState::Inferred) {
      labels[v] = PairLabel::Match;
      any_match = true;
    } else if (states_[v] == VertexState::LabeledNonMatch ||
               states_[v] == VertexState::Dominated) {
      labels[v] = PairLabel::NonMatch;
    }
  }
  std::vector<double> classified(graph_.vertex_count(), 0.0);
  if (any_match) {
    IsolatedClassifierOptions opts;
    opts.psi = config_.psi;
    opts.forest.seed = config_.seed;
    const IsolatedClassifier clf(pipeline_.retained_vectors, labels, opts);
    for (VertexId v = 0; v < graph_.vertex_count(); ++v)
      if (graph_.isolated(v) && is_open(states_[v])) classified[v] = clf.match_probability(v);
  }

  matches_.clear();
  for (VertexId v = 0; v < graph_.vertex_count(); ++v) {
    const auto& p = graph_.vertex(v);
    if (states_[v] == VertexState::LabeledMatch)
      matches_.push_back({v, p.u1, p.u2, Provenance::Labeled, posteriors_[v]});
    else if (states_[v] == VertexState::Inferred)
      matches_.push_back({v, p.u1, p.u2, Provenance::Inferred, inferred_prob_[v]});
    else if (classified[v] > 0.5)
      matches_.push_back({v, p.u1, p.u2, Provenance::Classified, classified[v]});
  }
}

void Engine::publish(bool finished, StopReason stop) {
  SessionSnapshot s;
  s.loop = loops_;
  s.asked = asked_;
  s.budget = config_.budget;
  s.finished = finished;
  s.stop = stop;
  NamedPairSet current;
  for (VertexId v = 0; v < graph_.vertex_count(); ++v) {
    switch (states_[v]) {
    case VertexState::LabeledMatch: ++s.labeled_matches; break;
    case VertexState::LabeledNonMatch: ++s.labeled_non_matches; break;
    case VertexState::Inferred: ++s.inferred; break;
    case VertexState::Dominated: ++s.dominated; break;
    case VertexState::Hard: ++s.hard; break;
    case VertexState::Unresolved: break;
    }
    if (gold_ && !finished &&
        (states_[v] == VertexState::LabeledMatch || states_[v] == VertexState::Inferred)) {
      const auto& p = graph_.vertex(v);
      current.emplace(kb1_.entities().name(p.u1), kb2_.entities().name(p.u2));
    }
  }
  s.resolved = s.labeled_matches + s.labeled_non_matches + s.inferred + s.dominated;
  s.remaining = graph_.vertex_count() - s.resolved;
  if (gold_) s.metrics = evaluate(finished ? match_names() : current, *gold_);
  std::lock_guard lock(snapshot_mu_);
  snapshot_ = std::move(s);
}

SessionSnapshot Engine::snapshot() const {
  std::lock_guard lock(snapshot_mu_);
  return snapshot_;
}

NamedPairSet Engine::match_names() const {
  NamedPairSet out;
  for (const auto& m : matches_)
    out.emplace(kb1_.entities().name(m.u1), kb2_.entities().name(m.u2));
  return out;
}

void Engine::write_matches(const std::filesystem::path& file) const {
  std::ofstream out(file);
  if (!out) throw IoError("cannot write " + file.string());
  out.precision(6);
  for (const auto& m : matches_)
    out << escape_field(kb1_.entities().name(m.u1)) << '\t'
        << escape_field(kb2_.entities().name(m.u2)) << '\t' << to_string(m.provenance) << '\t'
        << m.probability << '\n';
}

void Engine::log_labels(std::span<const LabelRecord> records) {
  if (config_.label_log.empty() || records.empty()) return;
  std::lock_guard lock(log_mu_);
  append_label_log(config_.label_log, records, graph_, kb1_, kb2_);
}

std::unique_ptr<LabelSource> Engine::make_simulated_source() const {
  if (config_.mode != LabelMode::Simulated) return nullptr;
  if (!gold_) throw ConfigError("no label source: simulation needs a gold standard");
  auto pool = config_.workers.empty() ? simulated_pool(config_.assignments, config_.error_rate)
                                      : load_worker_pool(config_.workers);
  for (const auto& w : pool)
    if (w.kind != WorkerKind::Simulated)
      throw ConfigError("worker " + w.id + " is human; simulation needs simulated workers");
  if (pool.size() < config_.assignments)
    throw ConfigError("worker pool smaller than assignments per question");
  return std::make_unique<SimulatedLabelSource>(*this, std::move(pool), config_.assignments,
                                                config_.seed);
}

SimulatedLabelSource::SimulatedLabelSource(const Engine& engine, std::vector<Worker> pool,
                                           std::size_t per_question, std::uint64_t seed)
    : engine_(engine), pool_(std::move(pool)), per_question_(per_question), rng_(seed) {}

std::optional<std::vector<LabelRecord>>
SimulatedLabelSource::collect(std::span<const VertexId> batch) {
  std::vector<LabelRecord> out;
  const auto now = unix_now();
  for (const auto& a : assign(batch, pool_, per_question_)) {
    const auto it = std::find_if(pool_.begin(), pool_.end(),
                                 [&](const Worker& w) { return w.id == a.worker; });
    out.push_back({a.question, a.worker,
                   simulate_answer(*it, engine_.is_gold_match(a.question), rng_), now});
  }
  return out;
}

double SimulatedLabelSource::quality(const std::string& worker) const {
  for (const auto& w : pool_)
    if (w.id == worker) return w.quality;
  return kDefaultHumanQuality;
}

ServiceLabelSource::ServiceLabelSource(std::vector<Worker> pool, std::size_t per_question)
    : pool_(std::move(pool)), per_question_(per_question) {
  if (per_question_ == 0) throw InvalidArgument("answers per question must be positive");
}

std::optional<std::vector<LabelRecord>>
ServiceLabelSource::collect(std::span<const VertexId> batch) {
  std::unique_lock lock(mu_);
  if (cancelled_) return std::nullopt;
  table_.open(batch, per_question_);
  cv_.wait(lock, [&] { return cancelled_ || table_.complete(); });
  if (cancelled_) {
    table_.close();
    return std::nullopt;
  }
  auto records = table_.records();
  table_.close();
  return records;
}

double ServiceLabelSource::quality(const std::string& worker) const {
  for (const auto& w : pool_)
    if (w.id == worker) return w.quality;
  return kDefaultHumanQuality;
}

SubmitResult ServiceLabelSource::submit(LabelRecord record, std::size_t* answered) {
  const auto result = table_.submit(std::move(record), answered);
  if (result == SubmitResult::Accepted) {
    { std::lock_guard lock(mu_); }
    cv_.notify_all();
  }
  return result;
}

void ServiceLabelSource::cancel() {
  {
    std::lock_guard lock(mu_);
    cancelled_ = true;
  }
  cv_.notify_all();
}

} // namespace remp
