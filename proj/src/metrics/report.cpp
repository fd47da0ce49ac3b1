#include "sipseg/metrics/report.hpp"

#include <cmath>

namespace sipseg::metrics {

const char* const kClassNames[kNumClasses] = {"periocular", "sclera", "iris", "pupil"};

namespace {

std::string class_name(std::size_t c) {
  return c < static_cast<std::size_t>(kNumClasses) ? kClassNames[c] : "class" + std::to_string(c);
}

nlohmann::json class_json(const ClassReport& r) {
  return {{"A", r.accuracy}, {"P", r.precision}, {"R", r.recall}, {"S", r.specificity},
          {"NPV", r.npv},    {"IoU", r.iou},     {"Dice", r.dice},  {"F1", r.f1},
          {"FPR", r.fpr},    {"FNR", r.fnr},     {"N2", r.nice2}};
}

}  // namespace

nlohmann::json report_json(const AggregateReport& agg) {
  nlohmann::json per = nlohmann::json::object();
  for (std::size_t c = 0; c < agg.per_class.size(); ++c) per[class_name(c)] = class_json(agg.per_class[c]);
  return {
      {"per_class", per},
      {"aggregate",
       {{"MA", agg.ma},
        {"GA", agg.ga},
        {"MIoU", agg.miou},
        {"FWIoU", agg.fwiou},
        {"Dice", agg.dice},
        {"Nice1", agg.nice1},
        {"Nice2", agg.nice2}}},
      {"meta",
       {{"images", agg.images},
        {"pixels", agg.pixels},
        {"degenerate_events",
         {{"zero_denominator", agg.events.zero_denominator},
          {"skipped_recall_terms", agg.events.skipped_recall_terms},
          {"skipped_iou_terms", agg.events.skipped_iou_terms}}}}},
  };
}

nlohmann::json curves_json(const std::vector<ClassCurve>& curves) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const ClassCurve& cc = curves[c];
    nlohmann::json e = {{"defined", cc.defined}, {"points", cc.points.size()}};
    if (cc.defined) {
      e["roc_auc"] = cc.roc_auc;
      e["pr_auc"] = cc.pr_auc;
    } else {
      e["roc_auc"] = nullptr;
      e["pr_auc"] = nullptr;
    }
    j[class_name(c)] = e;
  }
  return j;
}

}  // namespace sipseg::metrics
