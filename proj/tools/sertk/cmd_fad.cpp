#include <iostream>
#include <memory>

#include "common.hpp"
#include "fad_io.hpp"
#include "sertk/report/json.hpp"

namespace sertk::cli {
namespace {

struct FadOptions {
  std::string labeled;
  std::string unlabeled;
  std::string scores;
  std::string encoders;
  double shrinkage = 0.0;
  bool normalized = false;
  std::string out;
  std::string table_csv;
};

fad::FadScoreTable build_table(const FadOptions& o) {
  const auto encoders = split_list(o.encoders);
  if (!o.scores.empty()) {
    require(o.labeled.empty() && o.unlabeled.empty(), "fad: --scores excludes --labeled and --unlabeled");
    return read_score_grid(o.scores, encoders, o.normalized);
  }
  require(!o.labeled.empty() && !o.unlabeled.empty(), "fad: need --labeled and --unlabeled, or --scores");
  const auto labeled = load_labeled(o.labeled, encoders, o.shrinkage);
  const auto unlabeled = load_unlabeled(o.unlabeled, labeled, encoders, o.shrinkage);
  return fad::score_table(labeled, unlabeled, o.normalized);
}

void add_mode(CLI::App& parent, const std::string& name, const std::string& help, bool label) {
  auto* sub = parent.add_subcommand(name, help);
  auto cfg = std::make_shared<ConfigFile>(sub);
  auto o = std::make_shared<FadOptions>();
  sub->add_option("--labeled", o->labeled, "Directory of <class>/<encoder>.emat embedding files");
  sub->add_option("--unlabeled", o->unlabeled, "Directory of <encoder>.emat files, or one matrix file for all encoders");
  sub->add_option("--scores", o->scores, "Precomputed score grid CSV (encoder rows, class columns)");
  sub->add_option("--encoders", o->encoders, "Comma-separated encoders to use (default: all found)");
  sub->add_option("--shrinkage", o->shrinkage, "Covariance shrinkage toward the diagonal, in [0, 1]");
  sub->add_flag("--normalized", o->normalized, "Min-max normalize each encoder row before averaging");
  sub->add_option("--out", o->out, "Write the JSON result here (default: stdout)");
  sub->add_option("--table-csv", o->table_csv, "Also write the score table as CSV");
  sub->callback([cfg, o, label] {
    cfg->apply();
    const auto table = build_table(*o);
    json body = report::to_json(table);
    if (label) {
      const auto pl = fad::assign_pseudo_label(table, o->normalized);
      body["label"] = pl.label;
      body["label_score"] = pl.score;
      body["tie"] = pl.tie;
    }
    const auto doc = dump(stamped(body, label ? "fad.label" : "fad.score", *cfg));
    if (!o->table_csv.empty()) write_text(o->table_csv, report::fad_table_csv(table));
    if (o->out.empty()) {
      std::cout << doc;
    } else {
      write_text(o->out, doc);
      write_text(config_sidecar(o->out), cfg->resolved());
    }
  });
}

}  // namespace

void add_fad(CLI::App& app, Context&) {
  auto* fad = app.add_subcommand("fad", "Frechet Audio Distance scoring and pseudo-labeling");
  fad->require_subcommand(1);
  add_mode(*fad, "score", "Score unlabeled embeddings against every labeled class and encoder", false);
  add_mode(*fad, "label", "Score, then assign the class with the lowest average distance", true);
}

}  // namespace sertk::cli
