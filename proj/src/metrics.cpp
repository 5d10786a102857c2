#include "sdgcl/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "sdgcl/error.hpp"

namespace sdgcl {

namespace {

void check_inputs(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InputError("score/label count mismatch");
  if (scores.empty()) throw InputError("metrics need at least one scored edge");
}

double f1(std::int64_t tp, std::int64_t fp, std::int64_t fn) {
  const std::int64_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  check_inputs(scores, labels);
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Mann-Whitney U from midranks of tied groups.
  double positive_rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double midrank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] != 0) {
        positive_rank_sum += midrank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = scores.size() - positives;
  if (positives == 0 || negatives == 0) throw InputError("AUC needs both positive and negative edges");
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

Confusion confusion_at(std::span<const double> scores, std::span<const int> labels, double threshold) {
  check_inputs(scores, labels);
  Confusion c;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const bool predicted = scores[i] >= threshold;
    const bool actual = labels[i] != 0;
    if (predicted && actual) ++c.tp;
    else if (predicted) ++c.fp;
    else if (actual) ++c.fn;
    else ++c.tn;
  }
  return c;
}

F1Scores f1_suite(std::span<const double> scores, std::span<const int> labels, double threshold) {
  const Confusion c = confusion_at(scores, labels, threshold);
  F1Scores out;
  out.binary = f1(c.tp, c.fp, c.fn);
  const double negative_f1 = f1(c.tn, c.fn, c.fp);
  out.macro = 0.5 * (out.binary + negative_f1);
  out.micro = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
  return out;
}

MetricsReport metrics_report(std::span<const double> scores, std::span<const int> labels,
                             double threshold) {
  MetricsReport r;
  r.auc = auc(scores, labels);
  const F1Scores f = f1_suite(scores, labels, threshold);
  r.macro_f1 = f.macro;
  r.micro_f1 = f.micro;
  r.binary_f1 = f.binary;
  r.confusion = confusion_at(scores, labels, threshold);
  r.threshold = threshold;
  return r;
}

Eigen::MatrixXd fused_representation(const EncoderParams& params, const HermitianMatrix& propagation) {
  const Eigen::MatrixXd z = encoder_forward(propagation, params);
  return fuse_views(z, z, params);
}

MetricsReport evaluate(const EncoderParams& params, const SignedDiGraph& operator_graph, double q,
                       std::span<const EdgeRecord> edges, double threshold) {
  const Eigen::MatrixXd fused =
      fused_representation(params, renormalized_propagation(operator_graph, PhaseSpec{q}));
  const Eigen::VectorXd scores = predict_edges(fused, edges, params);
  return metrics_report(std::span<const double>(scores.data(), static_cast<std::size_t>(scores.size())),
                        sign_labels(edges), threshold);
}

std::vector<int> sign_labels(std::span<const EdgeRecord> edges) {
  std::vector<int> labels;
  labels.reserve(edges.size());
  for (const auto& e : edges) labels.push_back(e.sign > 0 ? 1 : 0);
  return labels;
}

}  // namespace sdgcl
