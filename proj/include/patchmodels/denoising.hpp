#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "patchmodels/image.hpp"
#include "patchmodels/learning.hpp"
#include "patchmodels/patching.hpp"
#include "patchmodels/projectors.hpp"

namespace patchmodels {

struct DenoiseResult {
  PatchGroups estimate;
  ProjectorRecord record;  // replaying it on the input reproduces estimate
  ModelSpec model;
};

struct FusionSpec {
  double mu = 0.5;        // weight of the first estimate
  double lambda_f = 0.0;  // fidelity weight toward the noisy input
  enum class Mode { fixed_mu, line_search } mode = Mode::fixed_mu;
  double grid = 0.1;      // line-search step over [0, 1]
};

// Column-wise sparse projection z -> D H_K(D^T z).
// remove_dc models each column with its mean subtracted and adds it back,
// which stays linear and is captured in the record.
DenoiseResult denoise_sp(const PatchGroups& groups, const UnitaryDictionary& D,
                         int K, bool remove_dc = false);

// Per-group sparse projection with that group's dictionary.
DenoiseResult denoise_gs(const PatchGroups& groups,
                         const std::vector<UnitaryDictionary>& dicts, int K,
                         bool remove_dc = false);

// Per-group jointly sparse projection Z -> D rowthresh_K(D^T Z).
DenoiseResult denoise_js(const PatchGroups& groups, const UnitaryDictionary& D,
                         int K, bool remove_dc = false);

// Per-group best rank-K approximation.
DenoiseResult denoise_lr(const PatchGroups& groups, int K,
                         bool remove_dc = false);

using Denoiser = std::function<DenoiseResult(const PatchGroups&)>;

// Applies the denoisers cyclically, in list order, for t full rounds starting
// from the input. The returned record chains every stage's projector.
DenoiseResult alternating_projection(const PatchGroups& groups,
                                     const std::vector<Denoiser>& denoisers,
                                     int t);

// Pointwise weighted sums; weights must be nonnegative and sum to 1 within
// 1e-12.
PatchGroups convex_combine(const std::vector<PatchGroups>& estimates,
                           const std::vector<double>& weights);
Image convex_combine(const std::vector<Image>& estimates,
                     const std::vector<double>& weights);

// Combines denoise results and blends their records with the same weights.
DenoiseResult convex_combine_results(const std::vector<DenoiseResult>& results,
                                     const std::vector<double>& weights);

// Closed-form minimizer of
//   lambda_f ||x - y||^2 + mu ||x - x_A||^2 + (1 - mu) ||x - x_B||^2,
// i.e. (lambda_f y + mu x_A + (1 - mu) x_B) / (1 + lambda_f).
Image fuse_image_p1(const Image& y, const Image& x_a, const Image& x_b,
                    const FusionSpec& spec);

// Line search over mu in {0, grid, ..., 1}, scored by squared error against
// the reference; returns the best fused image and the chosen mu.
std::pair<Image, double> fuse_image_p1_line_search(const Image& y,
                                                   const Image& x_a,
                                                   const Image& x_b,
                                                   double lambda_f, double grid,
                                                   const Image& reference);

}  // namespace patchmodels
