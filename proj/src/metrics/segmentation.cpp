#include "sipseg/metrics/segmentation.hpp"

namespace sipseg::metrics {

double score_ratio(std::uint64_t num, std::uint64_t den, bool error_free, DegenerateEvents* ev) {
  if (den == 0) {
    if (ev) ++ev->zero_denominator;
    return error_free ? 1.0 : 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

double error_ratio(std::uint64_t num, std::uint64_t den, bool error_free, DegenerateEvents* ev) {
  if (den == 0) {
    if (ev) ++ev->zero_denominator;
    return error_free ? 0.0 : 1.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

ClassReport class_report(const BinaryCounts& b, DegenerateEvents* ev) {
  const bool clean = b.fp == 0 && b.fn == 0;
  ClassReport r;
  r.accuracy = score_ratio(b.tp + b.tn, b.tp + b.tn + b.fp + b.fn, clean, ev);
  r.precision = score_ratio(b.tp, b.tp + b.fp, clean, ev);
  r.recall = score_ratio(b.tp, b.tp + b.fn, clean, ev);
  // Specificity and NPV follow the printed definitions.
  r.specificity = score_ratio(b.tn, b.tn + b.fn, clean, ev);
  r.npv = score_ratio(b.tn, b.tn + b.fp, clean, ev);
  r.iou = score_ratio(b.tp, b.tp + b.fp + b.fn, clean, ev);
  r.dice = score_ratio(2 * b.tp, 2 * b.tp + b.fp + b.fn, clean, ev);
  const double pr = r.precision + r.recall;
  if (pr == 0.0) {
    if (ev) ++ev->zero_denominator;
    r.f1 = 0.0;
  } else {
    r.f1 = 2.0 * (r.precision * r.recall) / pr;
  }
  r.fpr = error_ratio(b.fp, b.fp + b.tn, clean, ev);
  r.fnr = error_ratio(b.fn, b.fn + b.tp, clean, ev);
  r.nice2 = 0.5 * (r.fpr + r.fnr);
  return r;
}

std::vector<ClassReport> class_metrics(const ConfusionMatrix& cm, DegenerateEvents* ev) {
  if (cm.total() == 0) fail(ErrorCode::InvalidArgument, "confusion matrix is empty");
  std::vector<ClassReport> out;
  for (std::size_t c = 0; c < cm.num_classes(); ++c) out.push_back(class_report(one_vs_rest(cm, c), ev));
  return out;
}

ImageScores image_scores(const ConfusionMatrix& cm, DegenerateEvents* ev) {
  const std::size_t K = cm.num_classes();
  const auto per = class_metrics(cm, ev);
  ImageScores s;
  double recall_sum = 0, iou_sum = 0, dice_sum = 0, fw_num = 0;
  std::size_t recall_terms = 0, iou_terms = 0;
  std::uint64_t fw_den = 0;
  for (std::size_t c = 0; c < K; ++c) {
    const BinaryCounts b = one_vs_rest(cm, c);
    if (b.tp + b.fn > 0) {
      recall_sum += per[c].recall;
      ++recall_terms;
    } else if (ev) {
      ++ev->skipped_recall_terms;
    }
    if (b.tp + b.fp + b.fn > 0) {
      iou_sum += per[c].iou;
      dice_sum += per[c].dice;
      ++iou_terms;
    } else if (ev) {
      ++ev->skipped_iou_terms;
    }
    const std::uint64_t pc = cm.row_sum(c);
    fw_num += static_cast<double>(pc) * per[c].iou;
    fw_den += pc;
    s.global_accuracy += per[c].accuracy;
    s.nice2 += per[c].nice2;
  }
  s.mean_accuracy = recall_sum / static_cast<double>(recall_terms);  // at least one class is in the gt
  s.miou = iou_sum / static_cast<double>(iou_terms);
  s.dice = dice_sum / static_cast<double>(iou_terms);
  s.fwiou = fw_num / static_cast<double>(fw_den);
  s.global_accuracy /= static_cast<double>(K);
  s.nice2 /= static_cast<double>(K);
  std::uint64_t agree = 0;
  for (std::size_t c = 0; c < K; ++c) agree += cm(c, c);
  s.nice1 = static_cast<double>(cm.total() - agree) / static_cast<double>(cm.total());
  return s;
}

AggregateReport aggregate_metrics(std::span<const ConfusionMatrix> per_image) {
  if (per_image.empty()) fail(ErrorCode::InvalidArgument, "no images to aggregate");
  const std::size_t K = per_image[0].num_classes();
  AggregateReport agg;
  agg.per_class.assign(K, ClassReport{});
  for (const ConfusionMatrix& cm : per_image) {
    if (cm.num_classes() != K) fail(ErrorCode::ShapeMismatch, "images disagree on the class count");
    const ImageScores s = image_scores(cm, &agg.events);
    agg.ma += s.mean_accuracy;
    agg.ga += s.global_accuracy;
    agg.miou += s.miou;
    agg.fwiou += s.fwiou;
    agg.dice += s.dice;
    agg.nice1 += s.nice1;
    agg.nice2 += s.nice2;
    const auto per = class_metrics(cm);
    for (std::size_t c = 0; c < K; ++c) {
      ClassReport& t = agg.per_class[c];
      const ClassReport& r = per[c];
      t.accuracy += r.accuracy;
      t.precision += r.precision;
      t.recall += r.recall;
      t.specificity += r.specificity;
      t.npv += r.npv;
      t.iou += r.iou;
      t.dice += r.dice;
      t.f1 += r.f1;
      t.fpr += r.fpr;
      t.fnr += r.fnr;
      t.nice2 += r.nice2;
    }
    agg.pixels += cm.total();
  }
  const double n = static_cast<double>(per_image.size());
  agg.images = per_image.size();
  for (double* v : {&agg.ma, &agg.ga, &agg.miou, &agg.fwiou, &agg.dice, &agg.nice1, &agg.nice2}) *v /= n;
  for (ClassReport& t : agg.per_class) {
    for (double* v : {&t.accuracy, &t.precision, &t.recall, &t.specificity, &t.npv, &t.iou, &t.dice, &t.f1, &t.fpr,
                      &t.fnr, &t.nice2}) {
      *v /= n;
    }
  }
  return agg;
}

}  // namespace sipseg::metrics
