#include "patchmodels/denoising.hpp"

#include <cmath>

#include "patchmodels/parallel.hpp"

namespace patchmodels {

namespace {

// Column means for DC handling. work = Z with per-column means removed.
struct DcSplit {
  Eigen::MatrixXd work;
  Eigen::RowVectorXd means;
};

DcSplit split_dc(const Eigen::MatrixXd& Z, bool remove_dc) {
  DcSplit s;
  s.work = Z;
  if (remove_dc) {
    s.means = Z.colwise().mean();
    s.work.rowwise() -= s.means;
  }
  return s;
}

void add_dc(Eigen::MatrixXd& est, const DcSplit& s, bool remove_dc) {
  if (remove_dc) est.rowwise() += s.means;
}

}  // namespace

DenoiseResult denoise_sp(const PatchGroups& groups, const UnitaryDictionary& D,
                         int K, bool remove_dc) {
  DenoiseResult res;
  res.model = {ModelKind::SP, K};
  res.record.kind = ModelKind::SP;
  res.record.keep_dc = remove_dc;
  res.record.dict = D.matrix();
  res.record.col_supports.resize(groups.size());
  res.estimate.resize(groups.size());
  parallel_for(static_cast<int>(groups.size()), [&](int gi) {
    const std::size_t g = static_cast<std::size_t>(gi);
    const DcSplit s = split_dc(groups[g], remove_dc);
    const Eigen::MatrixXd C = D.matrix().transpose() * s.work;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(C.rows(), C.cols());
    auto& supports = res.record.col_supports[g];
    supports.resize(static_cast<std::size_t>(C.cols()));
    for (int j = 0; j < C.cols(); ++j) {
      supports[static_cast<std::size_t>(j)] = top_k_indices(C.col(j), K);
      for (int i : supports[static_cast<std::size_t>(j)]) X(i, j) = C(i, j);
    }
    Eigen::MatrixXd est = D.matrix() * X;
    add_dc(est, s, remove_dc);
    res.estimate[g] = std::move(est);
  });
  return res;
}

DenoiseResult denoise_gs(const PatchGroups& groups,
                         const std::vector<UnitaryDictionary>& dicts, int K,
                         bool remove_dc) {
  if (dicts.size() != groups.size())
    throw std::invalid_argument("denoise_gs: one dictionary per group required");
  DenoiseResult res;
  res.model = {ModelKind::GS, K};
  res.record.kind = ModelKind::GS;
  res.record.keep_dc = remove_dc;
  res.record.group_dicts.reserve(groups.size());
  for (const auto& d : dicts) res.record.group_dicts.push_back(d.matrix());
  res.record.col_supports.resize(groups.size());
  res.estimate.resize(groups.size());
  parallel_for(static_cast<int>(groups.size()), [&](int gi) {
    const std::size_t g = static_cast<std::size_t>(gi);
    const Eigen::MatrixXd& Dm = res.record.group_dicts[g];
    const DcSplit s = split_dc(groups[g], remove_dc);
    const Eigen::MatrixXd C = Dm.transpose() * s.work;
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(C.rows(), C.cols());
    auto& supports = res.record.col_supports[g];
    supports.resize(static_cast<std::size_t>(C.cols()));
    for (int j = 0; j < C.cols(); ++j) {
      supports[static_cast<std::size_t>(j)] = top_k_indices(C.col(j), K);
      for (int i : supports[static_cast<std::size_t>(j)]) X(i, j) = C(i, j);
    }
    Eigen::MatrixXd est = Dm * X;
    add_dc(est, s, remove_dc);
    res.estimate[g] = std::move(est);
  });
  return res;
}

DenoiseResult denoise_js(const PatchGroups& groups, const UnitaryDictionary& D,
                         int K, bool remove_dc) {
  DenoiseResult res;
  res.model = {ModelKind::JS, K};
  res.record.kind = ModelKind::JS;
  res.record.keep_dc = remove_dc;
  res.record.dict = D.matrix();
  res.record.row_supports.resize(groups.size());
  res.estimate.resize(groups.size());
  parallel_for(static_cast<int>(groups.size()), [&](int gi) {
    const std::size_t g = static_cast<std::size_t>(gi);
    const DcSplit s = split_dc(groups[g], remove_dc);
    const Eigen::MatrixXd C = D.matrix().transpose() * s.work;
    res.record.row_supports[g] = top_k_rows(C, K);
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(C.rows(), C.cols());
    for (int r : res.record.row_supports[g]) X.row(r) = C.row(r);
    Eigen::MatrixXd est = D.matrix() * X;
    add_dc(est, s, remove_dc);
    res.estimate[g] = std::move(est);
  });
  return res;
}

DenoiseResult denoise_lr(const PatchGroups& groups, int K, bool remove_dc) {
  DenoiseResult res;
  res.model = {ModelKind::LR, K};
  res.record.kind = ModelKind::LR;
  res.record.keep_dc = remove_dc;
  res.record.bases.resize(groups.size());
  res.estimate.resize(groups.size());
  parallel_for(static_cast<int>(groups.size()), [&](int gi) {
    const std::size_t g = static_cast<std::size_t>(gi);
    const DcSplit s = split_dc(groups[g], remove_dc);
    LowRankResult lr = lr_project(s.work, K);
    res.record.bases[g] = std::move(lr.basis);
    add_dc(lr.approx, s, remove_dc);
    res.estimate[g] = std::move(lr.approx);
  });
  return res;
}

DenoiseResult alternating_projection(const PatchGroups& groups,
                                     const std::vector<Denoiser>& denoisers,
                                     int t) {
  if (t < 1) throw std::invalid_argument("alternating_projection: t must be >= 1");
  if (denoisers.empty())
    throw std::invalid_argument("alternating_projection: no denoisers");
  PatchGroups current = groups;
  std::vector<ProjectorRecord> stages;
  stages.reserve(denoisers.size() * static_cast<std::size_t>(t));
  ModelSpec last_model{};
  for (int round = 0; round < t; ++round) {
    for (const Denoiser& f : denoisers) {
      DenoiseResult step = f(current);
      current = std::move(step.estimate);
      stages.push_back(std::move(step.record));
      last_model = step.model;
    }
  }
  DenoiseResult res;
  res.estimate = std::move(current);
  res.record = ProjectorRecord::chain(std::move(stages));
  res.model = last_model;
  return res;
}

namespace {

void check_weights(const std::vector<double>& w, std::size_t count) {
  if (w.size() != count)
    throw std::invalid_argument("convex_combine: weight count mismatch");
  double sum = 0.0;
  for (double x : w) {
    if (x < 0.0) throw std::invalid_argument("convex_combine: negative weight");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("convex_combine: weights must sum to 1");
}

}  // namespace

PatchGroups convex_combine(const std::vector<PatchGroups>& estimates,
                           const std::vector<double>& weights) {
  if (estimates.empty())
    throw std::invalid_argument("convex_combine: nothing to combine");
  check_weights(weights, estimates.size());
  PatchGroups out(estimates.front().size());
  for (std::size_t g = 0; g < out.size(); ++g) {
    out[g] = Eigen::MatrixXd::Zero(estimates.front()[g].rows(),
                                   estimates.front()[g].cols());
    for (std::size_t e = 0; e < estimates.size(); ++e) {
      if (estimates[e].size() != out.size() ||
          estimates[e][g].rows() != out[g].rows() ||
          estimates[e][g].cols() != out[g].cols())
        throw std::invalid_argument("convex_combine: shape mismatch");
      out[g] += weights[e] * estimates[e][g];
    }
  }
  return out;
}

Image convex_combine(const std::vector<Image>& estimates,
                     const std::vector<double>& weights) {
  if (estimates.empty())
    throw std::invalid_argument("convex_combine: nothing to combine");
  check_weights(weights, estimates.size());
  Image out = Image::zeros(estimates.front().height, estimates.front().width);
  for (std::size_t e = 0; e < estimates.size(); ++e) {
    if (estimates[e].height != out.height || estimates[e].width != out.width)
      throw std::invalid_argument("convex_combine: image dimension mismatch");
    for (std::size_t p = 0; p < out.pixels.size(); ++p)
      out.pixels[p] += weights[e] * estimates[e].pixels[p];
  }
  return out;
}

DenoiseResult convex_combine_results(const std::vector<DenoiseResult>& results,
                                     const std::vector<double>& weights) {
  std::vector<PatchGroups> ests;
  std::vector<ProjectorRecord> recs;
  ests.reserve(results.size());
  recs.reserve(results.size());
  for (const auto& r : results) {
    ests.push_back(r.estimate);
    recs.push_back(r.record);
  }
  DenoiseResult out;
  out.estimate = convex_combine(ests, weights);
  out.record = ProjectorRecord::blend(std::move(recs), weights);
  out.model = results.front().model;
  return out;
}

Image fuse_image_p1(const Image& y, const Image& x_a, const Image& x_b,
                    const FusionSpec& spec) {
  if (x_a.height != y.height || x_a.width != y.width ||
      x_b.height != y.height || x_b.width != y.width)
    throw std::invalid_argument("fuse_image_p1: image dimension mismatch");
  if (spec.mu < 0.0 || spec.mu > 1.0)
    throw std::invalid_argument("fuse_image_p1: mu must be in [0, 1]");
  if (spec.lambda_f < 0.0)
    throw std::invalid_argument("fuse_image_p1: lambda_f must be >= 0");
  Image out = Image::zeros(y.height, y.width);
  const double denom = 1.0 + spec.lambda_f;
  for (std::size_t p = 0; p < out.pixels.size(); ++p)
    out.pixels[p] = (spec.lambda_f * y.pixels[p] + spec.mu * x_a.pixels[p] +
                     (1.0 - spec.mu) * x_b.pixels[p]) /
                    denom;
  return out;
}

std::pair<Image, double> fuse_image_p1_line_search(const Image& y,
                                                   const Image& x_a,
                                                   const Image& x_b,
                                                   double lambda_f, double grid,
                                                   const Image& reference) {
  if (grid <= 0.0 || grid > 1.0)
    throw std::invalid_argument("fuse_image_p1_line_search: bad grid step");
  if (reference.height != y.height || reference.width != y.width)
    throw std::invalid_argument("fuse_image_p1_line_search: reference mismatch");
  double best_mu = 0.0;
  double best_err = std::numeric_limits<double>::infinity();
  Image best;
  const int steps = static_cast<int>(std::round(1.0 / grid));
  for (int s = 0; s <= steps; ++s) {
    const double mu = static_cast<double>(s) / steps;
    FusionSpec spec;
    spec.mu = mu;
    spec.lambda_f = lambda_f;
    Image cand = fuse_image_p1(y, x_a, x_b, spec);
    double err = 0.0;
    for (std::size_t p = 0; p < cand.pixels.size(); ++p) {
      const double d = cand.pixels[p] - reference.pixels[p];
      err += d * d;
    }
    if (err < best_err) {
      best_err = err;
      best_mu = mu;
      best = std::move(cand);
    }
  }
  return {std::move(best), best_mu};
}

}  // namespace patchmodels
