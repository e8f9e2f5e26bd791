#include <memory>

#include "common.hpp"
#include "sertk/cli/worker_pool.hpp"
#include "sertk/dsp/aggregate.hpp"
#include "sertk/dsp/features.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/io/wav.hpp"
#include "sertk/report/json.hpp"

namespace sertk::cli {
namespace {

struct FeatureOptions {
  std::vector<std::string> wav;
  std::string out;
  std::string out_dir;
  std::string format = "csv";
  bool downmix = false;
  std::string window = "hann";
  std::string level = "frame";
  dsp::ExtractConfig extract;
};

fs::path sidecar_json(const fs::path& out) {
  fs::path p = out;
  return p.replace_extension(".json");
}

}  // namespace

void add_features(CLI::App& app, Context& ctx) {
  auto* features = app.add_subcommand("features", "Paralinguistic, spectral and MFCC descriptors from WAV files");
  features->require_subcommand(1);
  auto* sub = features->add_subcommand("extract", "Frame-level feature matrix per WAV file, plus a JSON sidecar");
  auto cfg = std::make_shared<ConfigFile>(sub);
  auto o = std::make_shared<FeatureOptions>();
  auto& x = o->extract;
  sub->add_option("--wav", o->wav, "Input WAV file (16-bit PCM); repeatable");
  sub->add_option("--out", o->out, "Output matrix for a single input (.csv or .emat)");
  sub->add_option("--out-dir", o->out_dir, "Output directory: <stem>.features.<format> per input");
  sub->add_option("--format", o->format, "Matrix format with --out-dir")->check(CLI::IsMember({"csv", "emat"}));
  sub->add_flag("--downmix", o->downmix, "Average stereo channels instead of rejecting them");
  sub->add_option("--frame-len-ms", x.frame.frame_len_ms, "Frame length in milliseconds");
  sub->add_option("--hop-ms", x.frame.hop_ms, "Hop in milliseconds");
  sub->add_option("--window", o->window, "hann | hamming")->check(CLI::IsMember({"hann", "hamming"}));
  sub->add_option("--f0-min", x.pitch.f0_min, "Lowest pitch candidate in Hz");
  sub->add_option("--f0-max", x.pitch.f0_max, "Highest pitch candidate in Hz");
  sub->add_option("--voicing-threshold", x.pitch.voicing_threshold, "Normalized autocorrelation needed for voicing");
  sub->add_option("--lpc-order", x.formant.order, "LPC order for formants (0 = 2 + kHz)");
  sub->add_option("--n-mfcc", x.mfcc.n_coeffs, "Number of MFCCs");
  sub->add_option("--n-mels", x.mfcc.n_mels, "Number of mel bands");
  sub->add_option("--level", o->level, "frame | phone | word (fixed-size frame groups)")
      ->check(CLI::IsMember({"frame", "phone", "word"}));

  sub->callback([cfg, o, &ctx] {
    cfg->apply();
    require(!o->wav.empty(), "features extract: at least one --wav is required");
    require(o->out.empty() != o->out_dir.empty(), "features extract: give exactly one of --out or --out-dir");
    require(!o->out.empty() ? o->wav.size() == 1 : true, "features extract: --out takes a single --wav; use --out-dir");
    o->extract.frame.window = dsp::parse_window(o->window);
    const auto level = dsp::parse_level(o->level);

    std::vector<fs::path> outputs;
    for (const auto& w : o->wav)
      outputs.push_back(!o->out.empty() ? fs::path(o->out)
                                        : fs::path(o->out_dir) / (fs::path(w).stem().string() + ".features." + o->format));
    const auto config = cfg->resolved();
    parallel_for(o->wav.size(), ctx.jobs, [&](std::size_t i) {
      try {
        const auto audio = read_wav(o->wav[i], {.downmix = o->downmix});
        auto fm = dsp::extract_features(audio, o->extract);
        const Matrix out(dsp::hierarchical_aggregate(fm.frames.values, level), fm.frames.column_names);
        write_matrix(outputs[i], out);
        json side = report::to_json(fm);
        side["rows"] = out.values.rows();
        side["level"] = o->level;
        side["input"] = o->wav[i];
        side["sample_rate"] = audio.sample_rate;
        side["samples"] = audio.samples.size();
        write_text(sidecar_json(outputs[i]), dump(stamped(side, "features", config)));
      } catch (const InputError& e) {
        throw InputError(o->wav[i] + ": " + e.what());
      }
    });
    write_text(!o->out.empty() ? config_sidecar(o->out) : fs::path(o->out_dir) / "config.toml", config);
  });
}

}  // namespace sertk::cli
