#include "remp/crowd.hpp"
#include "remp/error.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <map>
#include <set>

using namespace remp;
using testutil::TempDir;
using testutil::write_file;

TEST_CASE("simulated answers follow the error rate") {
  std::mt19937_64 rng(81);
  const Worker perfect{"a", WorkerKind::Simulated, 1.0, 0.0};
  for (int i = 0; i < 100; ++i) {
    CHECK(simulate_answer(perfect, true, rng) == Answer::Match);
    CHECK(simulate_answer(perfect, false, rng) == Answer::NonMatch);
  }
  Worker contrary = perfect;
  contrary.error_rate = 1.0;
  CHECK(simulate_answer(contrary, true, rng) == Answer::NonMatch);

  const auto noisy = Worker::simulated("b", 0.25);
  CHECK(noisy.quality == doctest::Approx(0.75));
  int wrong = 0;
  for (int i = 0; i < 10000; ++i) wrong += simulate_answer(noisy, true, rng) != Answer::Match;
  CHECK(wrong / 10000.0 == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("worker constructors validate quality") {
  CHECK_THROWS_AS(Worker::simulated("x", 1.0), InvalidArgument);
  CHECK_THROWS_AS(Worker::simulated("x", 0.0), InvalidArgument);
  CHECK_THROWS_AS(Worker::human("x", 0.0), InvalidArgument);
  CHECK(Worker::human("x").quality == kDefaultHumanQuality);
  const auto pool = simulated_pool(3, 0.0);
  REQUIRE(pool.size() == 3);
  CHECK(pool[0].id == "w1");
  CHECK(pool[2].id == "w3");
  CHECK(pool[0].quality < 1.0);
}

TEST_CASE("round-robin assignment") {
  const auto pool5 = simulated_pool(5, 0.1);
  const std::vector<VertexId> one{7};
  SUBCASE("one answer each") {
    const auto a = assign(one, pool5, 1);
    REQUIRE(a.size() == 1);
    CHECK(a[0].question == 7);
    CHECK(a[0].state == AssignmentState::Pending);
  }
  SUBCASE("five answers from five workers") {
    const auto a = assign(one, pool5, 5);
    std::set<std::string> ws;
    for (const auto& x : a) ws.insert(x.worker);
    CHECK(ws.size() == 5);
  }
  SUBCASE("loads stay balanced") {
    const auto pool7 = simulated_pool(7, 0.1);
    std::vector<VertexId> batch(10);
    std::iota(batch.begin(), batch.end(), VertexId{0});
    const auto a = assign(batch, pool7, 5);
    CHECK(a.size() == 50);
    std::map<VertexId, std::set<std::string>> per_q;
    std::map<std::string, int> load;
    for (const auto& x : a) {
      per_q[x.question].insert(x.worker);
      ++load[x.worker];
    }
    for (const auto& [q, ws] : per_q) CHECK(ws.size() == 5);
    int lo = 1000, hi = 0;
    for (const auto& [w, n] : load) {
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
    CHECK(load.size() == 7);
    CHECK(hi - lo <= 1);
  }
  SUBCASE("pool too small") { CHECK_THROWS_AS(assign(one, pool5, 6), InvalidArgument); }
}

TEST_CASE("worker pool files") {
  TempDir dir("pool");
  write_file(dir / "ok.tsv", "# id kind value\nw1\tsimulated\t0.1\nh1\thuman\t0.7\nh2\thuman\t\n");
  const auto pool = load_worker_pool(dir / "ok.tsv");
  REQUIRE(pool.size() == 3);
  CHECK(pool[0].kind == WorkerKind::Simulated);
  CHECK(pool[0].quality == doctest::Approx(0.9));
  CHECK(pool[1].kind == WorkerKind::Human);
  CHECK(pool[1].quality == doctest::Approx(0.7));
  CHECK(pool[2].quality == kDefaultHumanQuality);

  write_file(dir / "kind.tsv", "w1\trobot\t0.1\n");
  CHECK_THROWS_AS(load_worker_pool(dir / "kind.tsv"), ConfigError);
  write_file(dir / "num.tsv", "w1\tsimulated\tlots\n");
  CHECK_THROWS_AS(load_worker_pool(dir / "num.tsv"), ConfigError);
  write_file(dir / "rate.tsv", "w1\tsimulated\t1.5\n");
  CHECK_THROWS_AS(load_worker_pool(dir / "rate.tsv"), ConfigError);
  write_file(dir / "short.tsv", "w1\n");
  CHECK_THROWS_AS(load_worker_pool(dir / "short.tsv"), ConfigError);
  CHECK_THROWS_AS(load_worker_pool(dir / "missing.tsv"), IoError);
}

TEST_CASE("assignment table") {
  AssignmentTable t;
  CHECK_FALSE(t.complete());
  const std::vector<VertexId> batch{3, 5};
  t.open(batch, 2);
  CHECK(t.pending_for("a") == batch);
  CHECK(t.submit({3, "a", Answer::Match, 1}) == SubmitResult::Accepted);
  CHECK(t.submit({3, "a", Answer::NonMatch, 2}) == SubmitResult::Duplicate);
  CHECK(t.submit({9, "a", Answer::Match, 3}) == SubmitResult::UnknownQuestion);
  CHECK(t.pending_for("a") == std::vector<VertexId>{5});
  CHECK(t.submit({3, "b", Answer::Match, 4}) == SubmitResult::Accepted);
  CHECK(t.submit({3, "c", Answer::Match, 5}) == SubmitResult::BatchFull);
  CHECK(t.pending_for("c") == std::vector<VertexId>{5});
  CHECK(t.answered(3) == 2);
  CHECK_FALSE(t.complete());
  CHECK(t.submit({5, "c", Answer::Unsure, 6}) == SubmitResult::Accepted);
  CHECK(t.submit({5, "a", Answer::NonMatch, 7}) == SubmitResult::Accepted);
  CHECK(t.complete());
  const auto recs = t.records();
  REQUIRE(recs.size() == 4);
  CHECK(recs[0].worker == "a");
  CHECK(recs[3].timestamp == 7);
  t.close();
  CHECK(t.submit({5, "d", Answer::Match, 8}) == SubmitResult::UnknownQuestion);
}
