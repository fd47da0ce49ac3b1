#include "sipseg/metrics/curves.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

namespace sipseg::metrics {

std::vector<double> threshold_grid(double step) {
  if (!(step > 0 && step <= 1)) fail(ErrorCode::InvalidArgument, "threshold step must lie in (0,1]");
  std::vector<double> g;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * step;
    if (t >= 1.0 - 1e-12) break;
    g.push_back(t);
  }
  g.push_back(1.0);
  return g;
}

double trapezoid_auc(std::vector<std::pair<double, double>> pts) {
  std::sort(pts.begin(), pts.end());
  double a = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    a += (pts[i].first - pts[i - 1].first) * 0.5 * (pts[i].second + pts[i - 1].second);
  }
  return a;
}

std::vector<ClassCurve> curves_and_auc(const LabelMap& gt, const net::Tensor& prob, double step) {
  std::size_t K, H, W, base = 0;
  if (prob.rank() == 3) {
    K = prob.dim(0), H = prob.dim(1), W = prob.dim(2);
  } else if (prob.rank() == 4 && prob.dim(0) == 1) {
    K = prob.dim(1), H = prob.dim(2), W = prob.dim(3);
  } else {
    fail(ErrorCode::ShapeMismatch, "probabilities must be (K,H,W) or (1,K,H,W), got " + net::to_string(prob.shape()));
  }
  if (static_cast<std::size_t>(gt.width()) != W || static_cast<std::size_t>(gt.height()) != H) {
    fail(ErrorCode::ShapeMismatch, "probability map does not match the label map");
  }
  const std::vector<double> grid = threshold_grid(step);
  const std::size_t T = grid.size();
  const std::size_t HW = H * W;
  std::vector<ClassCurve> out(K);
  for (std::size_t c = 0; c < K; ++c) {
    // hist[k]: pixels whose score clears exactly the first k thresholds.
    std::vector<std::uint64_t> pos_hist(T + 1, 0), neg_hist(T + 1, 0);
    std::uint64_t P = 0, N = 0;
    for (std::size_t i = 0; i < HW; ++i) {
      const double p = prob[base + c * HW + i];
      const std::size_t k = static_cast<std::size_t>(std::upper_bound(grid.begin(), grid.end(), p) - grid.begin());
      if (gt.pixels()[i] == c) {
        ++pos_hist[k];
        ++P;
      } else {
        ++neg_hist[k];
        ++N;
      }
    }
    ClassCurve& cc = out[c];
    cc.defined = P > 0 && N > 0;
    // Pixels positive at threshold t are those clearing more than t thresholds.
    std::uint64_t tp = P, fp = N;
    std::vector<std::pair<double, double>> roc{{0.0, 0.0}, {1.0, 1.0}};
    std::map<double, double> pr;
    for (std::size_t t = 0; t < T; ++t) {
      tp -= pos_hist[t];
      fp -= neg_hist[t];
      CurvePoint pt;
      pt.threshold = grid[t];
      pt.tpr = P ? static_cast<double>(tp) / static_cast<double>(P) : 0.0;
      pt.fpr = N ? static_cast<double>(fp) / static_cast<double>(N) : 0.0;
      pt.recall = pt.tpr;
      pt.precision_defined = tp + fp > 0;
      pt.precision = pt.precision_defined ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
      cc.points.push_back(pt);
      roc.emplace_back(pt.fpr, pt.tpr);
      if (pt.precision_defined) {
        auto [it, fresh] = pr.emplace(pt.recall, pt.precision);
        if (!fresh) it->second = std::max(it->second, pt.precision);
      }
    }
    if (!cc.defined) continue;
    std::sort(roc.begin(), roc.end());
    roc.erase(std::unique(roc.begin(), roc.end()), roc.end());
    cc.roc_auc = trapezoid_auc(std::move(roc));
    // Recall 0 starts at full precision; ties in recall keep the best precision.
    auto [it0, fresh0] = pr.emplace(0.0, 1.0);
    if (!fresh0) it0->second = std::max(it0->second, 1.0);
    cc.pr_auc = trapezoid_auc({pr.begin(), pr.end()});
  }
  return out;
}

std::string curve_csv(const ClassCurve& curve) {
  std::string s = "threshold,fpr,tpr,precision,recall\n";
  char line[160];
  for (const CurvePoint& p : curve.points) {
    if (p.precision_defined) {
      std::snprintf(line, sizeof line, "%.3f,%.17g,%.17g,%.17g,%.17g\n", p.threshold, p.fpr, p.tpr, p.precision,
                    p.recall);
    } else {
      std::snprintf(line, sizeof line, "%.3f,%.17g,%.17g,,%.17g\n", p.threshold, p.fpr, p.tpr, p.recall);
    }
    s += line;
  }
  return s;
}

}  // namespace sipseg::metrics
