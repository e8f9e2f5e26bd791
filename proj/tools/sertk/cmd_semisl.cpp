#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "fad_io.hpp"
#include "sertk/cli/worker_pool.hpp"
#include "sertk/io/labels.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/report/json.hpp"
#include "sertk/semisl/baselines.hpp"
#include "sertk/semisl/loop.hpp"
#include "sertk/semisl/pool_builder.hpp"
#include "sertk/semisl/synthetic.hpp"

namespace sertk::cli {
namespace {

struct SemislOptions {
  bool synthetic = false;
  semisl::BlobConfig blobs;

  std::string ids;
  std::string audio;
  std::string text;
  std::string gold;
  std::string acoustic;
  std::string derive_acoustic;
  std::string encoders;
  double shrinkage = 0.0;
  std::vector<std::string> linguistic;

  double train_fraction = 0.8;
  double valid_fraction = 0.1;
  double labeled_fraction = 0.3;
  std::uint64_t seed = 0;

  semisl::LoopConfig loop;
  semisl::TrainConfig train;
  std::vector<std::string> baselines;
  double threshold = 0.5;
  std::string out_dir;
};

struct Prepared {
  semisl::DataPool pool;
  std::optional<semisl::TwoViews> views;
  std::optional<std::string> derived_labels_csv;
};

Mat load(const std::string& path) {
  try {
    return read_matrix(path).values;
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

// Acoustic pseudo-labels by FAD: <dir>/labeled/<class>/<encoder>.emat against
// <dir>/unlabeled/<id>/<encoder>.emat for every id that needs one.
semisl::LabelMap derive_acoustic(const SemislOptions& o, const std::vector<std::string>& ids, std::size_t jobs) {
  const fs::path dir = o.derive_acoustic;
  const auto encoders = split_list(o.encoders);
  const auto labeled = load_labeled(dir / "labeled", encoders, o.shrinkage);
  std::vector<std::string> present;
  for (const auto& id : ids)
    if (fs::is_directory(dir / "unlabeled" / id)) present.push_back(id);
  std::vector<std::string> labels(present.size());
  parallel_for(present.size(), jobs, [&](std::size_t i) {
    const auto unlabeled = load_unlabeled(dir / "unlabeled" / present[i], labeled, encoders, o.shrinkage);
    labels[i] = fad::assign_pseudo_label(fad::score_table(labeled, unlabeled)).label;
  });
  semisl::LabelMap out;
  for (std::size_t i = 0; i < present.size(); ++i) out.emplace(present[i], labels[i]);
  return out;
}

Prepared prepare(const SemislOptions& o, std::size_t jobs) {
  Prepared out;
  if (o.synthetic) {
    auto blobs = o.blobs;
    blobs.seed = o.seed;
    blobs.train_fraction = o.train_fraction;
    blobs.validation_fraction = o.valid_fraction;
    blobs.labeled_fraction = o.labeled_fraction;
    auto task = semisl::make_blob_task(blobs);
    out.views = semisl::split_views(task);
    out.pool = std::move(task.pool);
    return out;
  }
  require(!o.ids.empty() && !o.gold.empty(), "semisl run: need --ids and --gold (or --synthetic)");
  require(!o.audio.empty() || !o.text.empty(), "semisl run: need --audio and/or --text feature matrices");
  require(o.acoustic.empty() != o.derive_acoustic.empty(), "semisl run: give exactly one of --acoustic or --derive-acoustic");

  semisl::PoolInputs in;
  in.ids = read_id_list(o.ids);
  std::optional<Mat> audio, text;
  if (!o.audio.empty()) audio = load(o.audio);
  if (!o.text.empty()) text = load(o.text);
  if (audio && text) {
    require(audio->rows() == text->rows(), "semisl run: --audio and --text row counts differ");
    in.features.resize(audio->rows(), audio->cols() + text->cols());
    in.features << *audio, *text;
    out.views = semisl::TwoViews{*audio, *text};
  } else {
    in.features = audio ? *audio : *text;
  }
  in.gold = read_label_csv(o.gold);
  if (!o.acoustic.empty()) {
    in.acoustic = label_map(read_label_csv(o.acoustic));
  } else {
    in.acoustic = derive_acoustic(o, in.ids, jobs);
    std::ostringstream csv;
    csv << "id,label\n";
    for (const auto& [id, label] : in.acoustic) csv << id << ',' << label << '\n';
    out.derived_labels_csv = csv.str();
  }
  for (const auto& path : o.linguistic) in.linguistic.push_back(label_map(read_label_csv(path)));
  in.train_fraction = o.train_fraction;
  in.validation_fraction = o.valid_fraction;
  in.labeled_fraction = o.labeled_fraction;
  in.seed = o.seed;
  out.pool = semisl::build_pool(in);
  return out;
}

json pool_summary(const semisl::DataPool& p) {
  return {{"classes", p.classes},
          {"rows", p.rows()},
          {"labeled", p.labeled.size()},
          {"high_conf", p.high_conf.size()},
          {"low_conf", p.low_conf.size()},
          {"validation", p.validation.size()},
          {"test", p.test.size()}};
}

}  // namespace

void add_semisl(CLI::App& app, Context& ctx) {
  auto* semisl = app.add_subcommand("semisl", "Multi-view semi-supervised training loop and baselines");
  semisl->require_subcommand(1);
  auto* sub = semisl->add_subcommand("run", "Run the self-training loop (and optional baselines) on one data pool");
  auto cfg = std::make_shared<ConfigFile>(sub);
  auto o = std::make_shared<SemislOptions>();

  sub->add_flag("--synthetic", o->synthetic, "Use Gaussian blobs instead of file inputs");
  sub->add_option("--n", o->blobs.n, "Synthetic: number of points");
  sub->add_option("--dim", o->blobs.dim, "Synthetic: feature dimension");
  sub->add_option("--classes", o->blobs.n_classes, "Synthetic: number of classes");
  sub->add_option("--separation", o->blobs.separation, "Synthetic: standard deviation of the class centres");
  sub->add_option("--acoustic-noise", o->blobs.acoustic_noise, "Synthetic: acoustic label corruption rate");
  sub->add_option("--linguistic-noise", o->blobs.linguistic_noise, "Synthetic: linguistic label corruption rate");

  sub->add_option("--ids", o->ids, "One id per line; rows of the feature matrices follow this order");
  sub->add_option("--audio", o->audio, "Audio embedding matrix (.emat or .csv)");
  sub->add_option("--text", o->text, "Text embedding matrix (.emat or .csv)");
  sub->add_option("--gold", o->gold, "Gold labels CSV: id,label[,split]");
  sub->add_option("--acoustic", o->acoustic, "Acoustic pseudo-labels CSV: id,label");
  sub->add_option("--derive-acoustic", o->derive_acoustic, "Derive acoustic labels by FAD from labeled/ and unlabeled/<id>/");
  sub->add_option("--encoders", o->encoders, "Encoders used by --derive-acoustic (default: all)");
  sub->add_option("--shrinkage", o->shrinkage, "Covariance shrinkage for --derive-acoustic");
  sub->add_option("--linguistic", o->linguistic, "Linguistic pseudo-labels CSV; repeat for a majority vote");

  sub->add_option("--train-fraction", o->train_fraction, "Share of rows without a split that train");
  sub->add_option("--valid-fraction", o->valid_fraction, "Share of rows without a split that validate");
  sub->add_option("--labeled-fraction", o->labeled_fraction, "Share of gold-labeled training rows kept labeled");
  sub->add_option("--seed", o->seed, "Seed for splits, removal sampling and training");

  sub->add_option("--max-iters", o->loop.max_iters, "Iteration budget");
  sub->add_option("--patience", o->loop.patience, "Stop after this many iterations without improvement");
  sub->add_option("--removal-rate", o->loop.removal_rate, "Share of initial high-confidence rows held out per iteration");
  sub->add_option("--learning-rate", o->train.learning_rate, "Classifier learning rate");
  sub->add_option("--epochs", o->train.epochs, "Classifier epochs");
  sub->add_option("--l2", o->train.l2, "Classifier L2 penalty");
  sub->add_option("--batch-size", o->train.batch_size, "Mini-batch size (0 = full batch)");
  sub->add_option("--baseline", o->baselines,
                  "Also run: supervised_full | supervised_limited | decision_merging | co_training (repeatable)");
  sub->add_option("--threshold", o->threshold, "Merged probability needed for decision_merging promotion");
  sub->add_option("--out-dir", o->out_dir, "Output directory");

  sub->callback([cfg, o, &ctx] {
    cfg->apply();
    require(!o->out_dir.empty(), "semisl run: --out-dir is required");
    std::vector<semisl::Baseline> baselines;
    for (const auto& b : o->baselines) baselines.push_back(semisl::parse_baseline(b));
    const auto prepared = prepare(*o, ctx.jobs);
    auto loop_cfg = o->loop;
    loop_cfg.seed = o->seed;
    auto train = o->train;
    train.seed = o->seed;
    const auto factory = semisl::logistic_factory(train);

    const auto result = semisl::run_loop(prepared.pool, loop_cfg, factory);
    json base = json::object();
    for (auto kind : baselines) {
      semisl::BaselineConfig bc;
      bc.threshold = o->threshold;
      bc.loop = loop_cfg;
      const auto r = semisl::run_baseline(prepared.pool, kind, factory, bc,
                                          prepared.views ? &*prepared.views : nullptr);
      base[std::string(semisl::to_string(kind))] = report::to_json(r);
    }
    const fs::path dir = o->out_dir;
    const auto config = cfg->resolved();
    write_text(dir / "history.csv", semisl::history_csv(result.history));
    write_text(dir / "metrics.json",
               dump(stamped({{"pool", pool_summary(prepared.pool)}, {"loop", report::to_json(result.history)},
                             {"baselines", base}},
                            "semisl.run", config)));
    if (prepared.derived_labels_csv) write_text(dir / "acoustic_labels.csv", *prepared.derived_labels_csv);
    write_text(dir / "config.toml", config);
    std::cout << json{{"initial_validation_ua", result.history.initial_ua()},
                      {"final_validation_ua", result.history.final_ua()},
                      {"iterations", result.history.iterations.size()}}
                     .dump()
              << '\n';
  });
}

}  // namespace sertk::cli
