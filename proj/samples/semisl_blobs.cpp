// Runs the multi-view self-training loop on synthetic Gaussian blobs and
// compares it with the supervised baselines.
//
//   semisl_blobs [seed]

#include <iostream>
#include <string>

#include "sertk/semisl/baselines.hpp"
#include "sertk/semisl/loop.hpp"
#include "sertk/semisl/synthetic.hpp"

int main(int argc, char** argv) {
  using namespace sertk::semisl;
  const std::uint64_t seed = argc > 1 ? std::stoull(argv[1]) : 1000;
  const auto task = make_blob_task({.separation = 0.3, .seed = seed});
  const auto views = split_views(task);
  const auto factory = logistic_factory({.seed = seed});

  const auto loop = run_loop(task.pool, {.seed = seed}, factory);
  std::cout << "pool: " << task.pool.labeled.size() << " labeled, " << task.pool.high_conf.size()
            << " high-confidence, " << task.pool.low_conf.size() << " low-confidence\n";
  std::cout << history_csv(loop.history);
  std::cout << "loop final validation UA " << loop.history.final_ua() << '\n';
  for (auto kind : {Baseline::kSupervisedLimited, Baseline::kSupervisedFull, Baseline::kDecisionMerging,
                    Baseline::kCoTraining}) {
    const auto r = run_baseline(task.pool, kind, factory, {.loop = {.seed = seed}}, &views);
    std::cout << to_string(kind) << " validation UA " << r.validation_ua << '\n';
  }
}
