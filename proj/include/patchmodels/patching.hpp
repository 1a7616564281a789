#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "patchmodels/image.hpp"

namespace patchmodels {

// Top-left corner of a patch inside an image.
struct PatchRef {
  int row = 0;
  int col = 0;
  bool operator==(const PatchRef&) const = default;
};

// One group per reference patch; members are the matched similar patches.
// Every member must lie fully inside the image, and every image pixel must be
// covered by at least one member across all groups for aggregation to be
// defined.
struct GroupingPlan {
  int patch_side = 0;
  std::vector<std::vector<PatchRef>> groups;
};

// Group matrices: column j of groups[i] is member j of group i, the patch
// window flattened in row-major scan order (length patch_side^2).
using PatchGroups = std::vector<Eigen::MatrixXd>;

// All patch positions on a stride grid, plus the last row/column so the image
// border is always covered.
std::vector<PatchRef> patch_grid(int height, int width, int patch_side,
                                 int stride);

std::vector<std::pair<PatchRef, Eigen::VectorXd>> extract_patches(
    const Image& img, int patch_side, int stride);

// For each reference, the M candidates with smallest squared Euclidean
// distance inside a window x window pixel area centered on the reference
// patch (clipped against the image, kept centered as far as possible).
// Candidates are every integer position; ties break toward the smaller
// row-major linear position, so the reference itself always comes first.
// Throws if a window holds fewer than M candidates.
GroupingPlan block_match(const Image& img, const std::vector<PatchRef>& refs,
                         int patch_side, int window, int M);

// Gathers pixels into the group matrices described by the plan.
PatchGroups group(const Image& img, const GroupingPlan& plan);

// Adjoint reconstruction: per-pixel average of every patch copy covering that
// pixel. Exact inverse of group() when the groups are unmodified.
// Throws if some pixel is covered by no patch.
Image aggregate(const GroupingPlan& plan, const PatchGroups& groups,
                int height, int width);

// Line-oriented text format: "PLAN n=<patch_side>", then one line per group
// of space-separated "r,c" pairs.
void save_plan(const GroupingPlan& plan, const std::string& path);
GroupingPlan load_plan(const std::string& path);

}  // namespace patchmodels
