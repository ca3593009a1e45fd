#include "mlod/losses.hpp"

#include <algorithm>
#include <cmath>

#include "mlod/error.hpp"

namespace mlod {

double smooth_l1_scalar(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? 0.5 * x * x : a - 0.5;
}

double smooth_l1_derivative(double x) {
  const double a = std::abs(x);
  return a < 1.0 ? x : (x > 0.0 ? 1.0 : -1.0);
}

double smooth_l1(const std::vector<double>& residuals) {
  double sum = 0.0;
  for (double r : residuals) sum += smooth_l1_scalar(r);
  return sum;
}

namespace {

double log_sum_exp(const std::vector<double>& scores) {
  const double peak = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - peak);
  return peak + std::log(sum);
}

double box_term(const CornerEncoding& out, const CornerEncoding& target) {
  const auto a = out.flat();
  const auto b = target.flat();
  double sum = 0.0;
  for (int i = 0; i < CornerEncoding::kDims; ++i) sum += smooth_l1_scalar(a[i] - b[i]);
  return sum;
}

// d box_term / d out, scaled
void add_box_gradient(const CornerEncoding& out, const CornerEncoding& target, double scale,
                      CornerEncoding& grad) {
  const auto a = out.flat();
  const auto b = target.flat();
  auto g = grad.flat();
  for (int i = 0; i < CornerEncoding::kDims; ++i) g[i] += scale * smooth_l1_derivative(a[i] - b[i]);
  grad = CornerEncoding::from_flat(g);
}

void add_scores_gradient(const std::vector<double>& scores, int target, double scale,
                         std::vector<double>& grad) {
  const std::vector<double> g = cross_entropy_gradient(scores, target);
  for (std::size_t i = 0; i < g.size(); ++i) grad[i] += scale * g[i];
}

}  // namespace

double cross_entropy(const std::vector<double>& scores, int target) {
  if (scores.empty() || target < 0 || target >= int(scores.size()))
    fail(ErrorCode::ShapeMismatch, "class index outside the score vector");
  return log_sum_exp(scores) - scores[target];
}

std::vector<double> cross_entropy_gradient(const std::vector<double>& scores, int target) {
  if (scores.empty() || target < 0 || target >= int(scores.size()))
    fail(ErrorCode::ShapeMismatch, "class index outside the score vector");
  const double lse = log_sum_exp(scores);
  std::vector<double> grad(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) grad[i] = std::exp(scores[i] - lse);
  grad[target] -= 1.0;
  return grad;
}

SubLosses sub_losses(const std::vector<ProposalOutputs>& outputs,
                     const std::vector<ProposalTargets>& targets) {
  if (outputs.size() != targets.size())
    fail(ErrorCode::ShapeMismatch, "outputs and targets differ in length");
  std::size_t n_img = 0, n_bev = 0, np_img = 0, np_bev = 0;
  double cls_img = 0.0, cls_bev = 0.0, reg_img = 0.0, reg_bev = 0.0;
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const ProposalOutputs& out = outputs[i];
    const ProposalTargets& t = targets[i];
    if (t.image_class >= 0) {
      ++n_img;
      cls_img += cross_entropy(out.image_scores, t.image_class);
      if (t.image_class > 0) {
        ++np_img;
        reg_img += box_term(out.image_box, t.image_box);
      }
    }
    if (t.bev_class >= 0) {
      ++n_bev;
      cls_bev += cross_entropy(out.bev_scores, t.bev_class);
      if (t.bev_class > 0) {
        ++np_bev;
        reg_bev += box_term(out.bev_box, t.bev_box);
      }
    }
  }
  SubLosses sub;
  sub.sub_cls = (n_img ? cls_img / double(n_img) : 0.0) + (n_bev ? cls_bev / double(n_bev) : 0.0);
  sub.sub_reg = (np_img ? reg_img / double(np_img) : 0.0) + (np_bev ? reg_bev / double(np_bev) : 0.0);
  return sub;
}

LossBreakdown total_loss(const std::vector<ProposalOutputs>& outputs,
                         const std::vector<ProposalTargets>& targets,
                         const LossWeights& weights) {
  if (outputs.size() != targets.size())
    fail(ErrorCode::ShapeMismatch, "outputs and targets differ in length");

  // denominators first
  std::size_t n_img = 0, n_bev = 0, np_img = 0, np_bev = 0;
  for (const ProposalTargets& t : targets) {
    if (t.image_class >= 0) {
      ++n_img;
      if (t.image_class > 0) ++np_img;
    }
    if (t.bev_class >= 0) {
      ++n_bev;
      if (t.bev_class > 0) ++np_bev;
    }
  }

  LossBreakdown result;
  result.gradients.resize(outputs.size());
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    ProposalOutputs& g = result.gradients[i];
    g.fusion_scores.assign(outputs[i].fusion_scores.size(), 0.0);
    g.image_scores.assign(outputs[i].image_scores.size(), 0.0);
    g.bev_scores.assign(outputs[i].bev_scores.size(), 0.0);
    g.fusion_orientation = {0.0, 0.0};
    g.fusion_box = CornerEncoding{};
    g.image_box = CornerEncoding{};
    g.bev_box = CornerEncoding{};
  }

  const double inv_n_bev = n_bev ? 1.0 / double(n_bev) : 0.0;
  const double inv_n_img = n_img ? 1.0 / double(n_img) : 0.0;
  const double inv_np_bev = np_bev ? 1.0 / double(np_bev) : 0.0;
  const double inv_np_img = np_img ? 1.0 / double(np_img) : 0.0;

  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const ProposalOutputs& out = outputs[i];
    const ProposalTargets& t = targets[i];
    ProposalOutputs& g = result.gradients[i];

    if (t.bev_class >= 0) {
      // fusion terms ride on the bev view's labels and denominators
      result.cls += inv_n_bev * cross_entropy(out.fusion_scores, t.bev_class);
      add_scores_gradient(out.fusion_scores, t.bev_class, weights.cls * inv_n_bev,
                          g.fusion_scores);
      result.sub_cls += inv_n_bev * cross_entropy(out.bev_scores, t.bev_class);
      add_scores_gradient(out.bev_scores, t.bev_class, weights.sub_cls * inv_n_bev, g.bev_scores);
      if (t.bev_class > 0) {
        result.reg += inv_np_bev * box_term(out.fusion_box, t.bev_box);
        add_box_gradient(out.fusion_box, t.bev_box, weights.reg * inv_np_bev, g.fusion_box);
        const double da = out.fusion_orientation[0] - t.bev_orientation[0];
        const double db = out.fusion_orientation[1] - t.bev_orientation[1];
        result.ang += inv_np_bev * (smooth_l1_scalar(da) + smooth_l1_scalar(db));
        g.fusion_orientation[0] += weights.ang * inv_np_bev * smooth_l1_derivative(da);
        g.fusion_orientation[1] += weights.ang * inv_np_bev * smooth_l1_derivative(db);
        result.sub_reg += inv_np_bev * box_term(out.bev_box, t.bev_box);
        add_box_gradient(out.bev_box, t.bev_box, weights.sub_reg * inv_np_bev, g.bev_box);
      }
    }
    if (t.image_class >= 0) {
      result.sub_cls += inv_n_img * cross_entropy(out.image_scores, t.image_class);
      add_scores_gradient(out.image_scores, t.image_class, weights.sub_cls * inv_n_img,
                          g.image_scores);
      if (t.image_class > 0) {
        result.sub_reg += inv_np_img * box_term(out.image_box, t.image_box);
        add_box_gradient(out.image_box, t.image_box, weights.sub_reg * inv_np_img, g.image_box);
      }
    }
  }

  result.total = weights.cls * result.cls + weights.reg * result.reg + weights.ang * result.ang +
                 weights.sub_cls * result.sub_cls + weights.sub_reg * result.sub_reg;
  if (!std::isfinite(result.total)) fail(ErrorCode::NonFiniteLoss, "total loss is not finite");
  return result;
}

}  // namespace mlod
