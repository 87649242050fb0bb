// remp: command-line front end over the C API.

#include "remp/remp.h"

#include <CLI11.hpp>

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstdio>
#include <map>
#include <string>
#include <thread>

namespace {

std::atomic<bool> interrupted{false};

void on_signal(int) { interrupted = true; }

struct MatchArgs {
  std::string kb1_attrs, kb1_rels, kb2_attrs, kb2_rels;
  std::string gold, workers, out, label_log, dump_dir;
  std::string label_attr1 = "label", label_attr2 = "label";
  std::string mode = "sim";
  std::size_t k = 4, mu = 10, assignments = 5;
  double tau = 0.9, error_rate = 0.0, t_label = 0.3, psi = 0.9;
  long long budget = -1;
  unsigned long long seed = 42;
  bool all_subsets = false;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string static_dir;
  bool keep_serving = false;
};

void add_match_options(CLI::App* cmd, MatchArgs& a) {
  cmd->add_option("--kb1-attrs", a.kb1_attrs, "KB1 attribute triples (TSV)")->required();
  cmd->add_option("--kb1-rels", a.kb1_rels, "KB1 relationship triples (TSV)")->required();
  cmd->add_option("--kb2-attrs", a.kb2_attrs, "KB2 attribute triples (TSV)")->required();
  cmd->add_option("--kb2-rels", a.kb2_rels, "KB2 relationship triples (TSV)")->required();
  cmd->add_option("--gold", a.gold, "gold matches (TSV)");
  cmd->add_option("--workers", a.workers, "worker pool (TSV)");
  cmd->add_option("--out", a.out, "output matches (TSV)");
  cmd->add_option("--label-log", a.label_log, "label log (TSV)");
  cmd->add_option("--dump-dir", a.dump_dir, "directory for intermediate TSVs");
  cmd->add_option("--label-attr1", a.label_attr1, "label attribute of KB1")->capture_default_str();
  cmd->add_option("--label-attr2", a.label_attr2, "label attribute of KB2")->capture_default_str();
  cmd->add_option("--k", a.k, "pruning rank bound")->capture_default_str();
  cmd->add_option("--tau", a.tau, "precision threshold")->capture_default_str();
  cmd->add_option("--mu", a.mu, "questions per loop")->capture_default_str();
  cmd->add_option("--budget", a.budget, "total question budget (-1: unlimited)")
      ->capture_default_str();
  cmd->add_option("--error-rate", a.error_rate, "simulated worker error rate")
      ->capture_default_str();
  cmd->add_option("--assignments", a.assignments, "answers per question")->capture_default_str();
  cmd->add_option("--t-label", a.t_label, "label similarity threshold")->capture_default_str();
  cmd->add_option("--psi", a.psi, "isolated-pair neighborhood threshold")->capture_default_str();
  cmd->add_option("--seed", a.seed, "random seed")->capture_default_str();
  cmd->add_flag("--all-subsets", a.all_subsets, "propagate over all neighbor subsets, not only 1:1");
}

void add_serve_options(CLI::App* cmd, MatchArgs& a) {
  cmd->add_option("--host", a.host, "bind address")->capture_default_str();
  cmd->add_option("--port", a.port, "port (0 picks a free one)")->capture_default_str();
  cmd->add_option("--static-dir", a.static_dir, "labeling UI assets");
  cmd->add_flag("--keep-serving", a.keep_serving, "stay up after the session ends");
}

int report_error(const char* what) {
  std::fprintf(stderr, "remp: %s: %s\n", what, remp_last_error());
  return 1;
}

remp_config* make_config(const MatchArgs& a) {
  remp_config* cfg = nullptr;
  if (remp_config_new(&cfg) != REMP_OK) return nullptr;
  const std::map<std::string, std::string> values = {
      {"kb1_attrs", a.kb1_attrs},
      {"kb1_rels", a.kb1_rels},
      {"kb2_attrs", a.kb2_attrs},
      {"kb2_rels", a.kb2_rels},
      {"gold", a.gold},
      {"workers", a.workers},
      {"out", a.out},
      {"label_log", a.label_log},
      {"dump_dir", a.dump_dir},
      {"label_attr1", a.label_attr1},
      {"label_attr2", a.label_attr2},
      {"mode", a.mode},
      {"k", std::to_string(a.k)},
      {"tau", std::to_string(a.tau)},
      {"mu", std::to_string(a.mu)},
      {"budget", a.budget < 0 ? std::string("unlimited") : std::to_string(a.budget)},
      {"error_rate", std::to_string(a.error_rate)},
      {"assignments", std::to_string(a.assignments)},
      {"t_label", std::to_string(a.t_label)},
      {"psi", std::to_string(a.psi)},
      {"seed", std::to_string(a.seed)},
      {"all_subsets", a.all_subsets ? "true" : "false"},
  };
  for (const auto& [key, value] : values) {
    if (remp_config_set(cfg, key.c_str(), value.c_str()) != REMP_OK) {
      remp_config_free(cfg);
      return nullptr;
    }
  }
  return cfg;
}

void print_report(const remp_report& r) {
  std::printf("candidates\t%zu\n", r.candidates);
  std::printf("retained\t%zu\n", r.retained);
  std::printf("reduction_ratio\t%.4f\n", r.reduction_ratio);
  std::printf("questions\t%zu\n", r.questions);
  std::printf("loops\t%zu\n", r.loops);
  std::printf("matches\t%zu\n", r.matches);
  std::printf("stop\t%s\n", r.stop_reason);
  if (r.has_gold) {
    std::printf("pair_completeness\t%.4f\n", r.pair_completeness);
    std::printf("precision\t%.4f\n", r.metrics.precision);
    std::printf("recall\t%.4f\n", r.metrics.recall);
    std::printf("f1\t%.4f\n", r.metrics.f1);
  }
}

int run_match(const MatchArgs& a) {
  remp_config* cfg = make_config(a);
  if (!cfg) return report_error("configuration");
  remp_engine* engine = nullptr;
  const auto status = remp_engine_new(cfg, &engine);
  remp_config_free(cfg);
  if (status != REMP_OK) return report_error("setup");

  remp_report report{};
  int rc = 0;
  if (a.mode == "serve") {
    int bound = 0;
    const char* dir = a.static_dir.empty() ? nullptr : a.static_dir.c_str();
    if (remp_engine_serve(engine, a.host.c_str(), a.port, dir, &bound) != REMP_OK) {
      remp_engine_free(engine);
      return report_error("serve");
    }
    std::fprintf(stderr, "remp: labeling API on http://%s:%d\n", a.host.c_str(), bound);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    int finished = 0;
    while (!interrupted && remp_engine_finished(engine, &finished) == REMP_OK && !finished)
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
    if (interrupted) {
      remp_engine_stop(engine);
      std::fprintf(stderr, "remp: interrupted\n");
    }
    if (remp_engine_wait(engine, &report) != REMP_OK) rc = report_error("session");
    else print_report(report);
    while (rc == 0 && a.keep_serving && !interrupted)
      std::this_thread::sleep_for(std::chrono::milliseconds(200));
  } else {
    if (remp_engine_run(engine, &report) != REMP_OK) rc = report_error("run");
    else print_report(report);
  }
  remp_engine_free(engine);
  return rc;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"remp: crowdsourced collective entity resolution"};
  app.require_subcommand(1);
  app.set_version_flag("--version", remp_version());

  MatchArgs match_args;
  auto* match = app.add_subcommand("match", "run the matching loop");
  add_match_options(match, match_args);
  match->add_option("--mode", match_args.mode, "label source")
      ->check(CLI::IsMember({"sim", "serve"}))
      ->capture_default_str();
  add_serve_options(match, match_args);

  MatchArgs serve_args;
  serve_args.mode = "serve";
  auto* serve = app.add_subcommand("serve", "run the loop with human workers over HTTP");
  add_match_options(serve, serve_args);
  add_serve_options(serve, serve_args);

  std::string pred, gold;
  auto* eval = app.add_subcommand("eval", "compare a prediction file with a gold file");
  eval->add_option("--pred", pred, "predicted matches (TSV)")->required();
  eval->add_option("--gold", gold, "gold matches (TSV)")->required();

  CLI11_PARSE(app, argc, argv);

  if (*match) return run_match(match_args);
  if (*serve) return run_match(serve_args);
  remp_metrics m{};
  if (remp_evaluate_files(pred.c_str(), gold.c_str(), &m) != REMP_OK) return report_error("eval");
  std::printf("predicted\t%zu\ngold\t%zu\ntrue_positives\t%zu\n", m.predicted, m.gold,
              m.true_positives);
  std::printf("precision\t%.4f\nrecall\t%.4f\nf1\t%.4f\n", m.precision, m.recall, m.f1);
  return 0;
}
