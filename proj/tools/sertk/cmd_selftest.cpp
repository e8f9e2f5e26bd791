#include <cstdio>
#include <iostream>

#include "common.hpp"
#include "sertk/oracle/selftest.hpp"

namespace sertk::cli {

void add_selftest(CLI::App& app, Context&) {
  auto* sub = app.add_subcommand("selftest", "Run the bundled oracle checks; exit 0 when all pass, 2 otherwise");
  auto json_out = std::make_shared<std::string>();
  sub->add_option("--json", *json_out, "Also write the results as JSON to this path");
  sub->callback([json_out] {
    const auto results = oracle::run_selftest();
    std::size_t failed = 0;
    json rows = json::array();
    for (const auto& r : results) {
      char line[256];
      std::snprintf(line, sizeof line, "%-4s %-22s %8.3fs (limit %.0fs)  ", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                    r.seconds, r.time_limit);
      std::cout << line << r.detail << '\n';
      failed += r.passed ? 0 : 1;
      rows.push_back({{"name", r.name},
                      {"passed", r.passed},
                      {"detail", r.detail},
                      {"seconds", r.seconds},
                      {"time_limit", r.time_limit}});
    }
    if (!json_out->empty())
      write_text(*json_out, dump({{"kind", "selftest"}, {"version", std::string(kVersion)}, {"checks", rows}}));
    ensure(failed == 0, "selftest: " + std::to_string(failed) + " of " + std::to_string(results.size()) +
                            " checks failed");
  });
}

}  // namespace sertk::cli
