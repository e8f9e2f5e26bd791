#include <exception>
#include <iostream>

#include "common.hpp"

namespace {

int fail(const std::string& kind, const std::string& message, int code) {
  const nlohmann::json err{{"error", {{"kind", kind}, {"message", message}}}};
  std::cerr << err.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sertk::cli;
  CLI::App app{"Speech emotion recognition toolkit: features, probing, ASR analytics, metrics, FAD labeling, semi-supervised training",
               "sertk"};
  app.set_version_flag("--version", std::string(sertk::kVersion));
  app.require_subcommand(1);
  Context ctx;
  app.add_option("-j,--jobs", ctx.jobs, "Worker threads for per-file work (0 = logical cores)")->capture_default_str();

  add_features(app, ctx);
  add_probe(app, ctx);
  add_asr(app, ctx);
  add_metrics(app, ctx);
  add_fad(app, ctx);
  add_semisl(app, ctx);
  add_report(app, ctx);
  add_selftest(app, ctx);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << app.help() << '\n';
    return fail("usage", e.what(), 1);
  } catch (const sertk::InputError& e) {
    return fail("input", e.what(), 1);
  } catch (const sertk::InvariantError& e) {
    return fail("invariant", e.what(), 2);
  } catch (const std::filesystem::filesystem_error& e) {
    return fail("input", e.what(), 1);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 2);
  }
  return 0;
}
