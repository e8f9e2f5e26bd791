#include <cmath>
#include <iostream>
#include <memory>

#include "common.hpp"
#include "sertk/io/labels.hpp"
#include "sertk/metrics/classification.hpp"
#include "sertk/metrics/regression.hpp"
#include "sertk/report/json.hpp"

namespace sertk::cli {
namespace {

struct MetricsOptions {
  std::string input;
  std::string task = "auto";
  bool sentiment = false;
  std::string out;
};

std::optional<std::vector<double>> as_numbers(const std::vector<std::string>& cells) {
  std::vector<double> out;
  for (const auto& c : cells) {
    double v = 0.0;
    if (!detail::parse_double(c, v)) return std::nullopt;
    out.push_back(v);
  }
  return out;
}

bool all_integral(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == std::round(x); });
}

json classification_block(const std::vector<std::string>& pred, const std::vector<std::string>& target) {
  const auto cm = metrics::confusion(target, pred);
  bool every_class_present = true;
  for (std::size_t c = 0; c < cm.size(); ++c) every_class_present = every_class_present && cm.support(c) > 0;
  return {{"task", "classification"},
          {"n", cm.total()},
          {"confusion", report::to_json(cm)},
          {"unweighted_accuracy", metrics::unweighted_accuracy(cm)},
          {"weighted_accuracy", metrics::weighted_accuracy_paper(cm)},
          {"balanced_accuracy", every_class_present ? json(metrics::balanced_accuracy(cm)) : json(nullptr)},
          {"macro", report::to_json(metrics::precision_recall_f1(cm, metrics::Averaging::kMacro))},
          {"weighted", report::to_json(metrics::precision_recall_f1(cm, metrics::Averaging::kWeighted))}};
}

json regression_block(const std::vector<double>& pred, const std::vector<double>& target, bool sentiment) {
  json j{{"task", "regression"},
         {"n", pred.size()},
         {"mse", metrics::mse(pred, target)},
         {"mae", metrics::mae(pred, target)},
         {"pcc", metrics::pcc(pred, target)},
         {"ccc", metrics::ccc(pred, target)}};
  if (sentiment) {
    j["acc2"] = metrics::acc_from_scores(pred, target, metrics::AccMode::kAcc2);
    j["acc7"] = metrics::acc_from_scores(pred, target, metrics::AccMode::kAcc7);
  }
  return j;
}

}  // namespace

void add_metrics(CLI::App& app, Context&) {
  auto* sub = app.add_subcommand("metrics", "Classification or regression metrics from an id,pred,target CSV");
  auto cfg = std::make_shared<ConfigFile>(sub);
  auto o = std::make_shared<MetricsOptions>();
  sub->add_option("--input", o->input, "CSV with columns id,pred,target");
  sub->add_option("--task", o->task, "auto | classification | regression")
      ->check(CLI::IsMember({"auto", "classification", "regression"}));
  sub->add_flag("--sentiment", o->sentiment, "Regression only: add acc2 / acc7 on a [-3, 3] sentiment scale");
  sub->add_option("--out", o->out, "Write the JSON result here (default: stdout)");
  sub->callback([cfg, o] {
    cfg->apply();
    require(!o->input.empty(), "metrics: --input is required");
    const auto rows = parse_prediction_csv(read_file_text(o->input));
    std::vector<std::string> pred, target;
    for (const auto& r : rows) {
      pred.push_back(r.pred);
      target.push_back(r.target);
    }
    const auto np = as_numbers(pred), nt = as_numbers(target);
    std::string task = o->task;
    // Numbers with a fractional part mean regression; labels or integers mean classes.
    if (task == "auto") task = np && nt && !(all_integral(*np) && all_integral(*nt)) ? "regression" : "classification";
    json block;
    if (task == "regression") {
      require(np && nt, "metrics: regression needs numeric pred and target columns");
      block = regression_block(*np, *nt, o->sentiment);
    } else {
      block = classification_block(pred, target);
    }
    const auto doc = dump(stamped({{"metrics", block}}, "metrics", *cfg));
    if (o->out.empty()) {
      std::cout << doc;
    } else {
      write_text(o->out, doc);
      write_text(config_sidecar(o->out), cfg->resolved());
    }
  });
}

}  // namespace sertk::cli
