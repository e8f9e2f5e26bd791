#include <iostream>
#include <memory>

#include "common.hpp"
#include "sertk/asr/analytics.hpp"
#include "sertk/cli/worker_pool.hpp"
#include "sertk/io/lexicon.hpp"
#include "sertk/io/manifest.hpp"
#include "sertk/report/json.hpp"

namespace sertk::cli {
namespace {

struct AsrOptions {
  std::string manifest;
  std::string pos_lexicon;
  std::string affect_lexicon;
  std::string systems;
  std::size_t max_n = 4;
  bool smoothing = false;
  bool per_utterance_mean = false;
  std::string out_dir;
};

// System names become file names; anything outside [A-Za-z0-9._-] maps to '_'.
std::string file_stem(const std::string& system) {
  std::string out = system;
  for (auto& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-') c = '_';
  return out;
}

}  // namespace

void add_asr(CLI::App& app, Context& ctx) {
  auto* asr = app.add_subcommand("asr", "ASR transcript quality analytics");
  asr->require_subcommand(1);
  auto* sub = asr->add_subcommand("eval", "WER, CER, BLEU, GLEU and per-class tables for each system in a manifest");
  auto cfg = std::make_shared<ConfigFile>(sub);
  auto o = std::make_shared<AsrOptions>();
  sub->add_option("--manifest", o->manifest, "JSONL manifest with references and hypotheses");
  sub->add_option("--pos-lexicon", o->pos_lexicon, "TSV word -> part-of-speech class lexicon");
  sub->add_option("--affect-lexicon", o->affect_lexicon, "TSV word -> valence/arousal/dominance lexicon");
  sub->add_option("--systems", o->systems, "Comma-separated systems to evaluate (default: all in the manifest)");
  sub->add_option("--max-n", o->max_n, "Highest n-gram order for BLEU / GLEU");
  sub->add_flag("--smoothing", o->smoothing, "Add-one smoothing of BLEU n-gram counts");
  sub->add_flag("--per-utterance-mean", o->per_utterance_mean, "Per-emotion WER as the mean of utterance WERs");
  sub->add_option("--out-dir", o->out_dir, "Output directory");
  sub->callback([cfg, o, &ctx] {
    cfg->apply();
    require(!o->manifest.empty() && !o->out_dir.empty(), "asr eval: need --manifest and --out-dir");
    require(o->max_n >= 1, "asr eval: --max-n must be at least 1");
    const auto records = read_manifest(o->manifest);
    require(!records.empty(), "asr eval: empty manifest '" + o->manifest + "'");
    std::vector<std::string> systems = split_list(o->systems);
    if (systems.empty())
      for (const auto& s : systems_of(records)) systems.push_back(s);
    require(!systems.empty(), "asr eval: manifest has no hypotheses");

    std::optional<ClassLexicon> pos;
    std::optional<AffectLexicon> affect;
    if (!o->pos_lexicon.empty()) pos = read_class_lexicon(o->pos_lexicon);
    if (!o->affect_lexicon.empty()) affect = read_affect_lexicon(o->affect_lexicon);
    const asr::EvalOptions opts{{o->max_n, o->smoothing}, o->per_utterance_mean};
    const auto config = cfg->resolved();
    const fs::path dir = o->out_dir;

    std::vector<json> summaries(systems.size());
    parallel_for(systems.size(), ctx.jobs, [&](std::size_t i) {
      const auto r = asr::evaluate_system(records, systems[i], pos ? &*pos : nullptr, affect ? &*affect : nullptr, opts);
      const auto stem = file_stem(systems[i]);
      write_text(dir / (stem + ".json"), dump(stamped(report::to_json(r), "asr.system", config)));
      write_text(dir / (stem + ".length_bins.csv"), report::length_bins_csv(r));
      write_text(dir / (stem + ".per_emotion.csv"), report::per_emotion_csv(r));
      if (r.pos_stats) write_text(dir / (stem + ".pos.csv"), report::class_stats_csv(*r.pos_stats));
      if (r.affect_stats) write_text(dir / (stem + ".affect.csv"), report::class_stats_csv(*r.affect_stats));
      summaries[i] = {{"system", r.system}, {"wer", r.wer}, {"cer", r.cer}, {"bleu", r.bleu}, {"gleu", r.gleu}};
    });
    write_text(dir / "config.toml", config);
    for (const auto& s : summaries) std::cout << s.dump() << '\n';
  });
}

}  // namespace sertk::cli
