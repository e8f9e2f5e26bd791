#include <gtest/gtest.h>

#include <atomic>
#include <stdexcept>

#include "sertk/cli/worker_pool.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/report/json.hpp"
#include "sertk/semisl/synthetic.hpp"

namespace sertk {
namespace {

TEST(WorkerPool, VisitsEveryIndexOnce) {
  for (std::size_t jobs : {0u, 1u, 3u, 8u}) {
    std::vector<std::atomic<int>> hits(97);
    cli::parallel_for(hits.size(), jobs, [&](std::size_t i) { ++hits[i]; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
  cli::parallel_for(0, 4, [](std::size_t) { FAIL(); });
}

TEST(WorkerPool, RethrowsLowestFailingIndex) {
  for (std::size_t jobs : {1u, 4u}) {
    try {
      cli::parallel_for(50, jobs, [](std::size_t i) {
        if (i == 7 || i == 31) throw InputError("item " + std::to_string(i));
      });
      FAIL() << "no exception";
    } catch (const InputError& e) {
      EXPECT_STREQ(e.what(), "item 7");
    }
  }
}

TEST(ReportJson, FadTableLayout) {
  const auto t = fad::table_from_scores({"e1", "e2"}, {"Sad", "Angry"}, {{1.0, 3.0}, {2.0, 5.0}}, true);
  const auto j = report::to_json(t);
  EXPECT_EQ(j["table"]["e2"]["Angry"], 5.0);
  EXPECT_EQ(j["averages"]["Sad"], 1.5);
  EXPECT_EQ(j["normalized_averages"]["Angry"], 1.0);
  EXPECT_EQ(j["classes"][0], "Sad");
  // The CSV layout is encoder rows by class columns plus an average row.
  EXPECT_EQ(report::fad_table_csv(t), "encoder,Sad,Angry\ne1,1,3\ne2,2,5\naverage,1.5,4\n");
}

TEST(ReportJson, StableAcrossRuns) {
  const auto task = semisl::make_blob_task({.n = 200, .dim = 8, .seed = 3});
  const auto a = semisl::run_loop(task.pool, {.max_iters = 5, .seed = 3}, semisl::logistic_factory());
  const auto b = semisl::run_loop(task.pool, {.max_iters = 5, .seed = 3}, semisl::logistic_factory());
  EXPECT_EQ(report::to_json(a.history).dump(), report::to_json(b.history).dump());
  const auto j = report::to_json(a.history);
  EXPECT_EQ(j["final_validation_ua"], a.history.final_ua());
  EXPECT_EQ(j["iterations"], a.history.iterations.size());
}

TEST(ReportJson, ClassStatsCsvMirrorsRows) {
  asr::ClassStats s;
  s.rows = {{"Noun", 4, 2, 0.4, 1.0, 0.5}, {"insertion", 0, 0, 0.0, 0.0, 0.0}};
  EXPECT_EQ(report::class_stats_csv(s), "class,word_count,error_count,wr,er,cr\nNoun,4,2,0.40000000000000002,1,0.5\n"
                                        "insertion,0,0,0,0,0\n");
  EXPECT_EQ(report::to_json(s)["rows"][0]["class"], "Noun");
}

}  // namespace
}  // namespace sertk
