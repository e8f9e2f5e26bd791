#pragma once

#include <algorithm>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sertk/error.hpp"
#include "sertk/io/binary.hpp"
#include "sertk/version.hpp"

namespace sertk::cli {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  std::size_t jobs = 0;  // 0 = one worker per logical core
};

// `--config FILE` on a leaf subcommand. CLI11 only reads config files at the
// root, so the file is merged by hand: each TOML key names a long option
// (underscores and dashes are interchangeable) and only fills options the
// command line left unset. Unknown keys and sections are rejected.
class ConfigFile {
 public:
  explicit ConfigFile(CLI::App* sub) : sub_(sub) {
    sub->option_defaults()->always_capture_default();
    sub->add_option("--config", path_, "TOML file supplying option values; command-line flags win")
        ->configurable(false);
  }

  void apply() const {
    if (path_.empty()) return;
    std::vector<CLI::ConfigItem> items;
    try {
      items = CLI::ConfigTOML().from_file(path_);
    } catch (const CLI::ParseError& e) {
      throw InputError(path_ + ": " + e.what());
    }
    for (const auto& item : items) {
      if (item.name == "++" || item.name == "--") continue;
      if (!item.parents.empty()) throw InputError(path_ + ": unexpected section '" + item.parents.front() + "'");
      // Empty lists are echoed as "{}" and mean "leave unset".
      if (item.inputs.empty() || (item.inputs.size() == 1 && item.inputs.front() == "{}")) continue;
      std::string name = item.name;
      std::replace(name.begin(), name.end(), '_', '-');
      CLI::Option* opt = sub_->get_option_no_throw("--" + name);
      require(opt != nullptr && opt->get_configurable(), path_ + ": unknown key '" + item.name + "'");
      if (opt->count() > 0) continue;
      opt->add_result(item.inputs);
      opt->run_callback();
    }
  }

  // Every option of the subcommand with its effective value, as TOML.
  std::string resolved() const { return sub_->config_to_str(true, false); }

 private:
  CLI::App* sub_;
  std::string path_;
};

inline void write_text(const fs::path& path, const std::string& text) { write_file_atomic(path, text); }

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

// Version, command path and resolved config stamped onto every JSON output.
inline json stamped(json body, const std::string& kind, const std::string& resolved_config) {
  body["kind"] = kind;
  body["version"] = std::string(kVersion);
  body["config"] = resolved_config;
  return body;
}

inline json stamped(json body, const std::string& kind, const ConfigFile& cfg) {
  return stamped(std::move(body), kind, cfg.resolved());
}

// `<out>.config.toml` beside a single-file output.
inline fs::path config_sidecar(const fs::path& out) {
  fs::path p = out;
  p += ".config.toml";
  return p;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return out;
}

// Subcommand registration, one per translation unit.
void add_features(CLI::App& app, Context& ctx);
void add_probe(CLI::App& app, Context& ctx);
void add_asr(CLI::App& app, Context& ctx);
void add_metrics(CLI::App& app, Context& ctx);
void add_fad(CLI::App& app, Context& ctx);
void add_semisl(CLI::App& app, Context& ctx);
void add_report(CLI::App& app, Context& ctx);
void add_selftest(CLI::App& app, Context& ctx);

}  // namespace sertk::cli
