#include <limits>
#include <memory>
#include <sstream>

#include "common.hpp"
#include "fad_io.hpp"
#include "sertk/cli/worker_pool.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/probe/layers.hpp"
#include "sertk/report/json.hpp"

namespace sertk::cli {
namespace {

struct ProbeOptions {
  std::vector<std::string> layers;
  std::string features;
  std::string reps;
  std::string reps_dir;
  std::string features_dir;
  double reg = 1e-12;
  std::string reduction = "mean";
  long min_rows = 50;
  std::string out;
};

struct Common {
  std::shared_ptr<ConfigFile> cfg;
  std::shared_ptr<ProbeOptions> o;
};

std::ostringstream csv_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

std::vector<Mat> read_all(const std::vector<std::string>& paths, std::size_t jobs) {
  std::vector<Mat> out(paths.size());
  parallel_for(paths.size(), jobs, [&](std::size_t i) {
    try {
      out[i] = read_matrix(paths[i]).values;
    } catch (const InputError& e) {
      throw InputError(paths[i] + ": " + e.what());
    }
  });
  return out;
}

std::string layer_name(const std::string& path) { return fs::path(path).stem().string(); }

// class name (file stem) -> matrix, for every matrix file in `dir`.
std::map<std::string, Mat> read_class_dir(const std::string& dir) {
  std::map<std::string, Mat> out;
  for (const auto& [name, path] : encoder_files(dir, {})) out.emplace(name, read_matrix(path).values);
  return out;
}

void emit(const ProbeOptions& o, const ConfigFile& cfg, const std::string& kind, const std::string& csv, json summary) {
  require(!o.out.empty(), kind + ": --out is required");
  write_text(o.out, csv);
  write_text(fs::path(o.out).replace_extension(".json"), dump(stamped(std::move(summary), kind, cfg)));
  write_text(config_sidecar(o.out), cfg.resolved());
}

Common add_mode(CLI::App& parent, const std::string& name, const std::string& help) {
  auto* sub = parent.add_subcommand(name, help);
  Common c{std::make_shared<ConfigFile>(sub), std::make_shared<ProbeOptions>()};
  sub->add_option("--reg", c.o->reg, "Relative eigenvalue floor for the covariance inverse square root");
  sub->add_option("--reduction", c.o->reduction, "mean | top1 canonical correlation")
      ->check(CLI::IsMember({"mean", "top1"}));
  sub->add_option("--out", c.o->out, "Output CSV; a JSON summary is written beside it");
  return c;
}

probe::CcaConfig cca_config(const ProbeOptions& o) { return {o.reg, probe::parse_reduction(o.reduction)}; }

}  // namespace

void add_probe(CLI::App& app, Context& ctx) {
  auto* probe = app.add_subcommand("probe", "CCA similarity between model representations and acoustic features");
  probe->require_subcommand(1);

  {
    auto c = add_mode(*probe, "sweep", "Similarity of every layer to one feature matrix");
    auto* sub = probe->get_subcommand("sweep");
    sub->add_option("--layers", c.o->layers, "Layer matrices in layer order (.emat or .csv)");
    sub->add_option("--features", c.o->features, "Feature matrix");
    sub->callback([c, &ctx] {
      c.cfg->apply();
      const auto& o = *c.o;
      require(!o.layers.empty() && !o.features.empty(), "probe sweep: need --layers and --features");
      const auto layers = read_all(o.layers, ctx.jobs);
      const Mat feats = read_matrix(o.features).values;
      std::vector<double> scores(layers.size());
      parallel_for(layers.size(), ctx.jobs,
                   [&](std::size_t i) { scores[i] = probe::cca_similarity(layers[i], feats, cca_config(o)); });
      auto os = csv_stream();
      os << "layer,name,score\n";
      std::size_t best = 0;
      for (std::size_t i = 0; i < scores.size(); ++i) {
        os << i << ',' << layer_name(o.layers[i]) << ',' << scores[i] << '\n';
        if (scores[i] > scores[best]) best = i;
      }
      emit(o, *c.cfg, "probe.sweep", os.str(), {{"scores", scores}, {"best_layer", best}, {"best_score", scores[best]}});
    });
  }
  {
    auto c = add_mode(*probe, "pairwise", "Layer-by-layer similarity matrix");
    auto* sub = probe->get_subcommand("pairwise");
    sub->add_option("--layers", c.o->layers, "Layer matrices in layer order");
    sub->callback([c, &ctx] {
      c.cfg->apply();
      const auto& o = *c.o;
      require(o.layers.size() >= 2, "probe pairwise: need at least two --layers");
      const auto m = probe::pairwise_layer_correlation(read_all(o.layers, ctx.jobs), cca_config(o));
      auto os = csv_stream();
      os << "layer";
      for (const auto& l : o.layers) os << ',' << layer_name(l);
      os << '\n';
      std::vector<std::vector<double>> rows;
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        os << layer_name(o.layers[static_cast<std::size_t>(i)]);
        rows.emplace_back();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
          os << ',' << m(i, j);
          rows.back().push_back(m(i, j));
        }
        os << '\n';
      }
      std::vector<std::string> names;
      for (const auto& l : o.layers) names.push_back(layer_name(l));
      emit(o, *c.cfg, "probe.pairwise", os.str(), {{"layers", names}, {"matrix", rows}});
    });
  }
  {
    auto c = add_mode(*probe, "hier", "Frame, phone and word level similarity of one representation");
    auto* sub = probe->get_subcommand("hier");
    sub->add_option("--reps", c.o->reps, "Representation matrix (frames x dims)");
    sub->add_option("--features", c.o->features, "Frame-level feature matrix");
    sub->callback([c] {
      c.cfg->apply();
      const auto& o = *c.o;
      require(!o.reps.empty() && !o.features.empty(), "probe hier: need --reps and --features");
      const auto d = probe::hierarchical_cca_diff(read_matrix(o.reps).values, read_matrix(o.features).values,
                                                  cca_config(o));
      auto os = csv_stream();
      os << "level,score\nframe," << d.frame << "\nphone," << d.phone << "\nword," << d.word << '\n';
      emit(o, *c.cfg, "probe.hier", os.str(), report::to_json(d));
    });
  }
  {
    auto c = add_mode(*probe, "emotion", "Per-emotion similarity from <class>.emat files");
    auto* sub = probe->get_subcommand("emotion");
    sub->add_option("--reps-dir", c.o->reps_dir, "Directory of <class>.emat representation matrices");
    sub->add_option("--features-dir", c.o->features_dir, "Directory of <class>.emat feature matrices");
    sub->add_option("--min-rows", c.o->min_rows, "Classes with fewer aligned rows are skipped with a warning");
    sub->callback([c] {
      c.cfg->apply();
      const auto& o = *c.o;
      require(!o.reps_dir.empty() && !o.features_dir.empty(), "probe emotion: need --reps-dir and --features-dir");
      require(o.min_rows >= 2, "probe emotion: --min-rows must be at least 2");
      const auto r = probe::emotion_conditioned_cca(read_class_dir(o.reps_dir), read_class_dir(o.features_dir),
                                                    cca_config(o), o.min_rows);
      auto os = csv_stream();
      os << "class,score\n";
      for (const auto& [cls, s] : r.scores) os << cls << ',' << s << '\n';
      emit(o, *c.cfg, "probe.emotion", os.str(), report::to_json(r));
    });
  }
}

}  // namespace sertk::cli
