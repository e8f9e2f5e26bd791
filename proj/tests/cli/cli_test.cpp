#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <random>

#include <nlohmann/json.hpp>

#include "sertk/io/binary.hpp"
#include "sertk/io/matrix_io.hpp"
#include "sertk/io/wav.hpp"
#include "sertk/oracle/selftest.hpp"
#include "support/synth.hpp"
#include "support/tempdir.hpp"

namespace sertk {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::TempDir;

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) { return "'" + s + "'"; }

// Runs the built binary with `args` (already shell-quoted where needed).
Run sertk(const TempDir& dir, const std::string& args) {
  const auto out = dir / ".stdout", err = dir / ".stderr";
  const std::string cmd = "cd " + quote(dir.path().string()) + " && " + quote(SERTK_CLI) + " " + args + " >" +
                          quote(out.string()) + " 2>" + quote(err.string());
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file_text(out);
  r.err = read_file_text(err);
  return r;
}

json error_of(const Run& r) {
  const auto line = r.err.substr(r.err.rfind('{', r.err.find("\"error\"")));
  return json::parse(line.substr(0, line.find('\n')));
}

void write(const fs::path& p, const std::string& text) { write_file_atomic(p, text); }

const char* kGrid =
    "encoder,Angry,Happy,Neutral,Sad\n"
    "vggish,4.12,3.98,6.87,12.20\n"
    "encodec,35.33,42.56,57.24,89.65\n"
    "wav2vec2,54.66,58.49,88.78,109.02\n"
    "clap,45.46,182.65,141.75,230.39\n";

TEST(Cli, SelftestPasses) {
  TempDir dir;
  const auto r = sertk(dir, "selftest --json st.json");
  EXPECT_EQ(r.code, 0) << r.out << r.err;
  EXPECT_EQ(json::parse(read_file_text(dir / "st.json"))["checks"].size(), 4u);
}

TEST(Cli, UsageErrorsExitOne) {
  TempDir dir;
  for (const auto* args : {"", "bogus", "fad label --no-such-flag", "features"}) {
    const auto r = sertk(dir, args);
    EXPECT_EQ(r.code, 1) << args;
    EXPECT_EQ(error_of(r)["error"]["kind"], "usage") << args;
  }
  EXPECT_EQ(sertk(dir, "--help").code, 0);
}

TEST(Cli, InputErrorsAreStructured) {
  TempDir dir;
  const auto r = sertk(dir, "fad label --scores missing.csv");
  EXPECT_EQ(r.code, 1);
  const auto e = error_of(r);
  EXPECT_EQ(e["error"]["kind"], "input");
  EXPECT_NE(e["error"]["message"].get<std::string>().find("missing.csv"), std::string::npos);
  write(dir / "bad.toml", "not_an_option = 3\n");
  EXPECT_EQ(sertk(dir, "metrics --config bad.toml").code, 1);
}

TEST(Cli, FadLabelOnReferenceGrid) {
  TempDir dir;
  write(dir / "grid.csv", kGrid);
  const auto r = sertk(dir, "fad label --scores grid.csv --encoders vggish,encodec,wav2vec2,clap --out label.json");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = json::parse(read_file_text(dir / "label.json"));
  EXPECT_EQ(j["label"], "Angry");
  EXPECT_FALSE(j["tie"].get<bool>());
  EXPECT_TRUE(fs::exists(dir / "label.json.config.toml"));
  // Dropping the first encoder leaves Angry as the argmin as well.
  const auto sub = sertk(dir, "fad label --scores grid.csv --encoders encodec,clap");
  EXPECT_EQ(json::parse(sub.out)["label"], "Angry");
}

TEST(Cli, FadLabelFromEmbeddings) {
  TempDir dir;
  std::mt19937_64 rng(7);
  for (const auto& [cls, shift] : {std::pair{"near", 0.0}, std::pair{"far", 3.0}}) {
    for (const auto* enc : {"e1", "e2"}) {
      const Mat x = oracle::detail::random_matrix(rng, 60, 3).array() + shift;
      write_matrix_emat(dir / "labeled" / cls / (std::string(enc) + ".emat"), x);
    }
  }
  for (const auto* enc : {"e1", "e2"})
    write_matrix_emat(dir / "unlabeled" / (std::string(enc) + ".emat"), oracle::detail::random_matrix(rng, 60, 3));
  auto r = sertk(dir, "fad score --labeled labeled --unlabeled unlabeled --out s.json --table-csv s.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_FALSE(json::parse(read_file_text(dir / "s.json")).contains("label"));
  r = sertk(dir, "fad label --labeled labeled --unlabeled unlabeled/e1.emat --shrinkage 0.1");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(json::parse(r.out)["label"], "near");
  EXPECT_EQ(sertk(dir, "fad label --labeled labeled --unlabeled unlabeled --encoders e3").code, 1);
}

TEST(Cli, FeaturesExtractAndConfigEcho) {
  TempDir dir;
  write_wav(dir / "a.wav", testing::sine(220.0, 0.5));
  auto r = sertk(dir, "features extract --wav a.wav --out a.features.csv --n-mfcc 13");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto m = read_matrix(dir / "a.features.csv");
  EXPECT_EQ(m.values.cols(), 28);
  const auto side = json::parse(read_file_text(dir / "a.features.json"));
  EXPECT_EQ(side["rows"], m.values.rows());
  const auto first = read_file_text(dir / "a.features.csv");
  fs::rename(dir / "a.features.csv.config.toml", dir / "run.toml");
  r = sertk(dir, "features extract --config run.toml");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file_text(dir / "a.features.csv"), first);
  // Command-line flags override the config file.
  r = sertk(dir, "features extract --config run.toml --n-mfcc 5 --out b.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_matrix(dir / "b.csv").values.cols(), 20);
}

TEST(Cli, FeaturesBatchWithWorkers) {
  TempDir dir;
  std::string args = "-j 3 features extract --out-dir out --format emat";
  for (int i = 0; i < 5; ++i) {
    const auto name = "w" + std::to_string(i) + ".wav";
    write_wav(dir / name, testing::sine(120.0 + 40.0 * i, 0.3));
    args += " --wav " + name;
  }
  ASSERT_EQ(sertk(dir, args).code, 0);
  for (int i = 0; i < 5; ++i) EXPECT_TRUE(fs::exists(dir / "out" / ("w" + std::to_string(i) + ".features.emat")));
  EXPECT_TRUE(fs::exists(dir / "out" / "config.toml"));
  EXPECT_EQ(sertk(dir, "features extract --wav w0.wav --wav w1.wav --out x.csv").code, 1);
}

TEST(Cli, ProbeModes) {
  TempDir dir;
  std::mt19937_64 rng(3);
  const Mat f = oracle::detail::random_matrix(rng, 120, 3);
  write_matrix_emat(dir / "f.emat", f);
  write_matrix_emat(dir / "l0.emat", oracle::detail::random_matrix(rng, 120, 4));
  Mat l1(120, 4);
  l1 << f * 2.0, oracle::detail::random_matrix(rng, 120, 1);
  write_matrix_emat(dir / "l1.emat", l1);
  ASSERT_EQ(sertk(dir, "probe sweep --layers l0.emat l1.emat --features f.emat --reduction top1 --out sweep.csv").code, 0);
  const auto sweep = json::parse(read_file_text(dir / "sweep.json"));
  EXPECT_EQ(sweep["best_layer"], 1);
  EXPECT_NEAR(sweep["best_score"].get<double>(), 1.0, 1e-9);
  ASSERT_EQ(sertk(dir, "probe pairwise --layers l0.emat l1.emat --out pw.csv").code, 0);
  const auto pw = json::parse(read_file_text(dir / "pw.json"))["matrix"];
  EXPECT_EQ(pw[0][1], pw[1][0]);
  EXPECT_NEAR(pw[0][0].get<double>(), 1.0, 1e-9);
  EXPECT_EQ(read_file_text(dir / "pw.csv").substr(0, 15), "layer,l0,l1\nl0,");
}

TEST(Cli, AsrEvalAndReport) {
  TempDir dir;
  write(dir / "m.jsonl",
        "{\"id\":\"u1\",\"ref\":\"the cat sat on the mat\",\"hyps\":{\"A\":\"the cat sat on a mat\",\"B\":\"a cat sat\"},"
        "\"emotion\":\"Happy\"}\n"
        "{\"id\":\"u2\",\"ref\":\"I am very happy today\",\"hyps\":{\"A\":\"I am happy today\",\"B\":\"I am very happy "
        "today\"},\"emotion\":\"Sad\"}\n");
  write(dir / "pos.tsv", "cat\tNoun\nmat\tNoun\nsat\tVerb\nthe\tFunc\n");
  auto r = sertk(dir, "asr eval --manifest m.jsonl --pos-lexicon pos.tsv --out-dir asr");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto a = json::parse(read_file_text(dir / "asr" / "A.json"));
  EXPECT_NEAR(a["wer"].get<double>(), 2.0 / 11.0, 1e-15);
  EXPECT_TRUE(fs::exists(dir / "asr" / "B.pos.csv"));

  r = sertk(dir, "report --inputs asr/A.json asr/B.json --out rep.json --csv-dir tables");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto first = read_file_text(dir / "rep.json");
  const auto rep = json::parse(first);
  EXPECT_EQ(rep["sections"]["asr"]["systems"].size(), 2u);
  EXPECT_EQ(rep["version"], "0.1.0");
  ASSERT_EQ(sertk(dir, "report --inputs asr/A.json asr/B.json --out rep.json --csv-dir tables").code, 0);
  EXPECT_EQ(read_file_text(dir / "rep.json"), first);

  EXPECT_EQ(sertk(dir, "report --inputs asr/A.json asr/missing.json").code, 1);
  EXPECT_EQ(sertk(dir, "report").code, 1);
  write(dir / "empty.json", "{\"kind\":\"asr.system\",\"system\":\"C\",\"utterances\":0}");
  EXPECT_EQ(sertk(dir, "report --inputs empty.json").code, 1);
}

TEST(Cli, MetricsTasks) {
  TempDir dir;
  write(dir / "cls.csv", "id,pred,target\n1,a,a\n2,b,a\n3,b,b\n4,c,c\n");
  auto r = sertk(dir, "metrics --input cls.csv");
  ASSERT_EQ(r.code, 0) << r.err;
  auto m = json::parse(r.out)["metrics"];
  EXPECT_EQ(m["task"], "classification");
  EXPECT_DOUBLE_EQ(m["unweighted_accuracy"].get<double>(), 0.75);
  write(dir / "reg.csv", "id,pred,target\n1,2,1\n2,4,2\n3,-2,-1\n4,-4,-2\n");
  r = sertk(dir, "metrics --input reg.csv --task regression");
  ASSERT_EQ(r.code, 0) << r.err;
  m = json::parse(r.out)["metrics"];
  EXPECT_NEAR(m["pcc"].get<double>(), 1.0, 1e-12);
  EXPECT_NEAR(m["ccc"].get<double>(), 0.8, 1e-12);
  EXPECT_EQ(sertk(dir, "metrics --input cls.csv --task regression").code, 1);
}

// Two well-separated clusters, written as the file-based semisl inputs.
void write_semisl_inputs(const TempDir& dir) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g(0.0, 1.0);
  const int n = 200;
  Mat audio(n, 4), text(n, 3);
  std::string ids, gold = "id,label,split\n", acoustic = "id,label\n", ling_a = "id,label\n", ling_b = "id,label\n";
  for (int i = 0; i < n; ++i) {
    const std::string id = "u" + std::to_string(i);
    const bool happy = i % 2 == 0;
    for (int d = 0; d < 4; ++d) audio(i, d) = g(rng) + (happy ? 2.0 : -2.0);
    for (int d = 0; d < 3; ++d) text(i, d) = g(rng) + (happy ? 1.0 : -1.0);
    const std::string label = happy ? "Happy" : "Sad", other = happy ? "Sad" : "Happy";
    ids += id + "\n";
    gold += id + "," + label + "\n";
    acoustic += id + "," + (i % 10 == 3 ? other : label) + "\n";
    ling_a += id + "," + (i % 7 == 1 ? other : label) + "\n";
    ling_b += id + "," + label + "\n";
  }
  write(dir / "ids.txt", ids);
  write_matrix_emat(dir / "audio.emat", audio);
  write_matrix_emat(dir / "text.emat", text);
  write(dir / "gold.csv", gold);
  write(dir / "acoustic.csv", acoustic);
  write(dir / "ling_a.csv", ling_a);
  write(dir / "ling_b.csv", ling_b);
}

TEST(Cli, SemislFromFiles) {
  TempDir dir;
  write_semisl_inputs(dir);
  write(dir / "run.toml",
        "ids = \"ids.txt\"\naudio = \"audio.emat\"\ntext = \"text.emat\"\ngold = \"gold.csv\"\n"
        "acoustic = \"acoustic.csv\"\nlinguistic = [\"ling_a.csv\", \"ling_b.csv\"]\nseed = 4\nmax_iters = 10\n"
        "baseline = [\"supervised_limited\", \"decision_merging\", \"co_training\"]\nout_dir = \"run1\"\n");
  auto r = sertk(dir, "semisl run --config run.toml");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto metrics = json::parse(read_file_text(dir / "run1" / "metrics.json"));
  EXPECT_EQ(metrics["pool"]["rows"], 200);
  EXPECT_EQ(metrics["baselines"].size(), 3u);
  EXPECT_GE(metrics["loop"]["final_validation_ua"].get<double>(), 0.9);
  ASSERT_TRUE(fs::exists(dir / "run1" / "history.csv"));

  // The echoed config reproduces the run byte for byte.
  r = sertk(dir, "semisl run --config run1/config.toml --out-dir run2");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file_text(dir / "run1" / "history.csv"), read_file_text(dir / "run2" / "history.csv"));

  EXPECT_EQ(sertk(dir, "semisl run --config run.toml --baseline mixmatch").code, 1);
  EXPECT_EQ(sertk(dir, "semisl run --ids ids.txt --audio audio.emat --gold gold.csv --out-dir x").code, 1);
}

TEST(Cli, SemislDerivesAcousticLabels) {
  TempDir dir;
  write_semisl_inputs(dir);
  std::mt19937_64 rng(5);
  for (const auto& [cls, shift] : {std::pair{"Happy", 2.0}, std::pair{"Sad", -2.0}})
    write_matrix_emat(dir / "fad" / "labeled" / cls / "enc.emat",
                      Mat(oracle::detail::random_matrix(rng, 80, 2).array() + shift));
  for (int i = 0; i < 200; ++i)
    write_matrix_emat(dir / "fad" / "unlabeled" / ("u" + std::to_string(i)) / "enc.emat",
                      Mat(oracle::detail::random_matrix(rng, 20, 2).array() + (i % 2 == 0 ? 2.0 : -2.0)));
  const auto r = sertk(dir,
                       "-j 4 semisl run --ids ids.txt --audio audio.emat --gold gold.csv --derive-acoustic fad "
                       "--linguistic ling_b.csv --seed 2 --out-dir run");
  ASSERT_EQ(r.code, 0) << r.err;
  const auto labels = read_file_text(dir / "run" / "acoustic_labels.csv");
  EXPECT_NE(labels.find("u0,Happy\n"), std::string::npos);
  EXPECT_NE(labels.find("u1,Sad\n"), std::string::npos);
  // Every unlabeled row agreed with the linguistic view, so nothing is low confidence.
  EXPECT_EQ(json::parse(read_file_text(dir / "run" / "metrics.json"))["pool"]["low_conf"], 0);
}

TEST(Cli, SemislSyntheticIsDeterministic) {
  TempDir dir;
  const std::string args = "semisl run --synthetic --n 300 --dim 16 --seed 9 --baseline supervised_full --out-dir ";
  ASSERT_EQ(sertk(dir, args + "a").code, 0);
  ASSERT_EQ(sertk(dir, args + "b").code, 0);
  EXPECT_EQ(read_file_text(dir / "a" / "history.csv"), read_file_text(dir / "b" / "history.csv"));
}

}  // namespace
}  // namespace sertk
