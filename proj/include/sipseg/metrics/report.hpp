#pragma once

#include <nlohmann/json.hpp>

#include "sipseg/metrics/curves.hpp"
#include "sipseg/metrics/segmentation.hpp"

namespace sipseg::metrics {

extern const char* const kClassNames[kNumClasses];

/// {per_class, aggregate, meta} report document.
nlohmann::json report_json(const AggregateReport& agg);
nlohmann::json curves_json(const std::vector<ClassCurve>& curves);

}  // namespace sipseg::metrics
