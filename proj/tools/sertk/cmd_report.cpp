#include <iostream>
#include <limits>
#include <memory>
#include <sstream>

#include "common.hpp"

namespace sertk::cli {
namespace {

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out;
  std::string csv_dir;
};

json read_artifact(const std::string& path) {
  require(fs::is_regular_file(path), "report: missing input '" + path + "'");
  const auto text = read_file_text(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError("report: '" + path + "' is not JSON: " + e.what());
  }
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(),
          "report: '" + path + "' has no \"kind\" field");
  return j;
}

void put(json& slot, const std::string& key, json value, const std::string& path) {
  require(!slot.contains(key), "report: duplicate entry '" + key + "' from '" + path + "'");
  slot[key] = std::move(value);
}

std::ostringstream csv_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

std::string cell(const json& v) { return v.is_null() ? "" : v.dump(); }

// One row per ASR system with the headline scores.
std::string systems_csv(const json& systems) {
  auto os = csv_stream();
  os << "system,utterances,wer,cer,bleu,gleu\n";
  for (const auto& [name, s] : systems.items())
    os << name << ',' << cell(s["utterances"]) << ',' << cell(s["wer"]) << ',' << cell(s["cer"]) << ','
       << cell(s["bleu"]) << ',' << cell(s["gleu"]) << '\n';
  return os.str();
}

// Encoder rows by class columns, closing with the average row.
std::string fad_csv(const json& doc) {
  auto os = csv_stream();
  os << "encoder";
  for (const auto& c : doc["classes"]) os << ',' << c.get<std::string>();
  os << '\n';
  for (const auto& e : doc["encoders"]) {
    os << e.get<std::string>();
    for (const auto& c : doc["classes"]) os << ',' << cell(doc["table"][e.get<std::string>()][c.get<std::string>()]);
    os << '\n';
  }
  os << "average";
  for (const auto& c : doc["classes"]) os << ',' << cell(doc["averages"][c.get<std::string>()]);
  os << '\n';
  return os.str();
}

}  // namespace

void add_report(CLI::App& app, Context&) {
  auto* sub = app.add_subcommand("report", "Merge JSON outputs of other subcommands into one report");
  auto cfg = std::make_shared<ConfigFile>(sub);
  auto o = std::make_shared<ReportOptions>();
  sub->add_option("--inputs", o->inputs, "JSON files written by other subcommands");
  sub->add_option("--out", o->out, "Report JSON (default: stdout)");
  sub->add_option("--csv-dir", o->csv_dir, "Also write plot-ready CSV tables here");
  sub->callback([cfg, o] {
    cfg->apply();
    require(!o->inputs.empty(), "report: no --inputs given");
    json sections = json::object();
    for (const auto& path : o->inputs) {
      json doc = read_artifact(path);
      const auto kind = doc["kind"].get<std::string>();
      if (kind == "asr.system") {
        require(doc.contains("system") && doc.value("utterances", 0) > 0,
                "report: '" + path + "' covers no utterances");
        const auto name = doc["system"].get<std::string>();
        put(sections["asr"]["systems"], name, std::move(doc), path);
      } else {
        put(sections[kind], fs::path(path).stem().string(), std::move(doc), path);
      }
    }
    if (!o->csv_dir.empty()) {
      const fs::path dir = o->csv_dir;
      if (sections.contains("asr")) write_text(dir / "asr_systems.csv", systems_csv(sections["asr"]["systems"]));
      for (const auto& kind : {"fad.score", "fad.label"}) {
        if (!sections.contains(kind)) continue;
        for (const auto& [stem, doc] : sections[kind].items())
          write_text(dir / ("fad_" + stem + ".csv"), fad_csv(doc));
      }
    }
    const auto doc = dump(stamped({{"sections", sections}}, "report", *cfg));
    if (o->out.empty()) {
      std::cout << doc;
    } else {
      write_text(o->out, doc);
      write_text(config_sidecar(o->out), cfg->resolved());
    }
  });
}

}  // namespace sertk::cli
