#pragma once

#include <array>
#include <vector>

#include "mlod/box_codec.hpp"
#include "mlod/types.hpp"

namespace mlod {

// Elementwise robust regression penalty: 0.5*x^2 inside |x| < 1, |x| - 0.5
// outside. Returns the sum over residuals.
double smooth_l1(const std::vector<double>& residuals);
double smooth_l1_scalar(double x);
double smooth_l1_derivative(double x);

// Softmax cross entropy on raw scores; target is a class index.
double cross_entropy(const std::vector<double>& scores, int target);
// d loss / d scores = softmax(scores) - onehot(target)
std::vector<double> cross_entropy_gradient(const std::vector<double>& scores, int target);

// Per-proposal raw outputs of the detection header. Score vectors have
// num_classes + 1 entries (background first).
struct ProposalOutputs {
  std::vector<double> fusion_scores;
  std::vector<double> image_scores;
  std::vector<double> bev_scores;
  CornerEncoding fusion_box;
  CornerEncoding image_box;
  CornerEncoding bev_box;
  std::array<double, 2> fusion_orientation{1.0, 0.0};
};

// Per-proposal supervision. Class indices are 0 for background; negative
// values mark the proposal ignore in that view (it leaves that view's terms
// and denominators). Regression targets are valid only for positives.
struct ProposalTargets {
  int bev_class = 0;
  int image_class = 0;
  CornerEncoding bev_box;
  CornerEncoding image_box;
  std::array<double, 2> bev_orientation{1.0, 0.0};
};

struct LossWeights {
  double cls = 1.0;
  double reg = 1.0;
  double ang = 1.0;
  double sub_cls = 1.0;
  double sub_reg = 1.0;
};

struct SubLosses {
  double sub_cls = 0.0;
  double sub_reg = 0.0;
};

// Gradients of the weighted total with respect to every header output, shaped
// like the outputs themselves.
struct LossBreakdown {
  double cls = 0.0;      // fusion scores vs bev labels, mean over bev members
  double reg = 0.0;      // fusion box vs bev targets, mean over bev positives
  double ang = 0.0;      // fusion orientation vs bev targets, same denominator
  double sub_cls = 0.0;
  double sub_reg = 0.0;
  double total = 0.0;
  std::vector<ProposalOutputs> gradients;
};

// Unweighted per-view mean terms: image and bev classification means plus
// image and bev positive-gated regression means.
SubLosses sub_losses(const std::vector<ProposalOutputs>& outputs,
                     const std::vector<ProposalTargets>& targets);

// Weighted multi-task objective. Fusion terms are supervised by the bev view
// and averaged over bev participants / positives; each sub term is averaged
// over its own view's participants / positives. Accumulation runs in index
// order, so the result is bitwise deterministic.
LossBreakdown total_loss(const std::vector<ProposalOutputs>& outputs,
                         const std::vector<ProposalTargets>& targets,
                         const LossWeights& weights);

}  // namespace mlod
