#include "patchmodels/patching.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "patchmodels/parallel.hpp"

namespace patchmodels {

namespace {

void check_patch_fits(const Image& img, int patch_side) {
  if (patch_side < 1) throw std::invalid_argument("patch_side must be >= 1");
  if (patch_side > img.height || patch_side > img.width)
    throw std::invalid_argument("patch larger than image");
}

std::vector<int> grid_starts(int extent, int patch_side, int stride) {
  std::vector<int> starts;
  const int last = extent - patch_side;
  for (int s = 0; s < last; s += stride) starts.push_back(s);
  starts.push_back(last);
  return starts;
}

Eigen::VectorXd read_patch(const Image& img, PatchRef at, int side) {
  Eigen::VectorXd v(side * side);
  int k = 0;
  for (int r = 0; r < side; ++r)
    for (int c = 0; c < side; ++c) v[k++] = img.at(at.row + r, at.col + c);
  return v;
}

}  // namespace

std::vector<PatchRef> patch_grid(int height, int width, int patch_side,
                                 int stride) {
  if (stride < 1) throw std::invalid_argument("stride must be >= 1");
  if (patch_side > height || patch_side > width)
    throw std::invalid_argument("patch larger than image");
  std::vector<PatchRef> refs;
  for (int r : grid_starts(height, patch_side, stride))
    for (int c : grid_starts(width, patch_side, stride))
      refs.push_back({r, c});
  return refs;
}

std::vector<std::pair<PatchRef, Eigen::VectorXd>> extract_patches(
    const Image& img, int patch_side, int stride) {
  check_patch_fits(img, patch_side);
  std::vector<std::pair<PatchRef, Eigen::VectorXd>> out;
  for (PatchRef at : patch_grid(img.height, img.width, patch_side, stride))
    out.emplace_back(at, read_patch(img, at, patch_side));
  return out;
}

GroupingPlan block_match(const Image& img, const std::vector<PatchRef>& refs,
                         int patch_side, int window, int M) {
  check_patch_fits(img, patch_side);
  if (M < 1) throw std::invalid_argument("block_match: M must be >= 1");
  if (window < patch_side)
    throw std::invalid_argument("block_match: window smaller than patch");

  GroupingPlan plan;
  plan.patch_side = patch_side;
  plan.groups.resize(refs.size());

  // candidate top-left range along one axis, window kept centered as far as
  // the image border allows
  const auto axis_range = [&](int ref, int extent) {
    int lo = ref - (window - patch_side) / 2;
    const int max_lo = extent - window;
    if (lo > max_lo) lo = max_lo;
    if (lo < 0) lo = 0;
    int hi = lo + window - patch_side;  // inclusive
    if (hi > extent - patch_side) hi = extent - patch_side;
    return std::pair<int, int>(lo, hi);
  };

  parallel_for(static_cast<int>(refs.size()), [&](int i) {
    const PatchRef ref = refs[static_cast<std::size_t>(i)];
    if (ref.row < 0 || ref.col < 0 || ref.row + patch_side > img.height ||
        ref.col + patch_side > img.width)
      throw std::invalid_argument("block_match: reference out of bounds");

    const auto [rlo, rhi] = axis_range(ref.row, img.height);
    const auto [clo, chi] = axis_range(ref.col, img.width);
    const long count =
        static_cast<long>(rhi - rlo + 1) * static_cast<long>(chi - clo + 1);
    if (count < M)
      throw std::runtime_error(
          "block_match: only " + std::to_string(count) + " candidates for " +
          std::to_string(M) + " requested (deficit " +
          std::to_string(M - count) + ")");

    const Eigen::VectorXd rv = read_patch(img, ref, patch_side);
    struct Cand {
      double d2;
      long lin;
      PatchRef at;
    };
    // the reference is always member 0, so full coverage of a reference grid
    // survives even exact distance ties
    std::vector<Cand> cands;
    cands.reserve(static_cast<std::size_t>(count));
    for (int r = rlo; r <= rhi; ++r) {
      for (int c = clo; c <= chi; ++c) {
        if (r == ref.row && c == ref.col) continue;
        double d2 = 0.0;
        for (int pr = 0; pr < patch_side; ++pr) {
          const double* row = &img.pixels[static_cast<std::size_t>(r + pr) *
                                              img.width + c];
          const double* ref_row = rv.data() + pr * patch_side;
          for (int pc = 0; pc < patch_side; ++pc) {
            const double diff = row[pc] - ref_row[pc];
            d2 += diff * diff;
          }
        }
        cands.push_back({d2, static_cast<long>(r) * img.width + c, {r, c}});
      }
    }
    std::partial_sort(cands.begin(), cands.begin() + (M - 1), cands.end(),
                      [](const Cand& a, const Cand& b) {
                        if (a.d2 != b.d2) return a.d2 < b.d2;
                        return a.lin < b.lin;
                      });
    auto& members = plan.groups[static_cast<std::size_t>(i)];
    members.reserve(static_cast<std::size_t>(M));
    members.push_back(ref);
    for (int k = 0; k < M - 1; ++k) members.push_back(cands[k].at);
  });
  return plan;
}

PatchGroups group(const Image& img, const GroupingPlan& plan) {
  const int side = plan.patch_side;
  check_patch_fits(img, side);
  PatchGroups out(plan.groups.size());
  parallel_for(static_cast<int>(plan.groups.size()), [&](int i) {
    const auto& members = plan.groups[static_cast<std::size_t>(i)];
    Eigen::MatrixXd Y(side * side, static_cast<int>(members.size()));
    for (std::size_t j = 0; j < members.size(); ++j) {
      const PatchRef at = members[j];
      if (at.row < 0 || at.col < 0 || at.row + side > img.height ||
          at.col + side > img.width)
        throw std::invalid_argument("group: plan references pixels out of bounds");
      Y.col(static_cast<int>(j)) = read_patch(img, at, side);
    }
    out[static_cast<std::size_t>(i)] = std::move(Y);
  });
  return out;
}

Image aggregate(const GroupingPlan& plan, const PatchGroups& groups,
                int height, int width) {
  const int side = plan.patch_side;
  if (groups.size() != plan.groups.size())
    throw std::invalid_argument("aggregate: plan/groups size mismatch");
  std::vector<double> sum(static_cast<std::size_t>(height) * width, 0.0);
  std::vector<std::int32_t> mult(sum.size(), 0);

  for (std::size_t i = 0; i < plan.groups.size(); ++i) {
    const auto& members = plan.groups[i];
    const Eigen::MatrixXd& Y = groups[i];
    if (Y.rows() != side * side ||
        Y.cols() != static_cast<int>(members.size()))
      throw std::invalid_argument("aggregate: group shape does not match plan");
    for (std::size_t j = 0; j < members.size(); ++j) {
      const PatchRef at = members[j];
      int k = 0;
      for (int r = 0; r < side; ++r) {
        for (int c = 0; c < side; ++c, ++k) {
          const std::size_t p =
              static_cast<std::size_t>(at.row + r) * width + (at.col + c);
          sum[p] += Y(k, static_cast<int>(j));
          mult[p] += 1;
        }
      }
    }
  }

  Image out = Image::zeros(height, width);
  for (std::size_t p = 0; p < sum.size(); ++p) {
    if (mult[p] == 0)
      throw std::runtime_error("aggregate: pixel " + std::to_string(p) +
                               " covered by no patch");
    out.pixels[p] = sum[p] / mult[p];
  }
  return out;
}

void save_plan(const GroupingPlan& plan, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "PLAN n=" << plan.patch_side << "\n";
  for (const auto& members : plan.groups) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      if (j) out << ' ';
      out << members[j].row << ',' << members[j].col;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failure");
}

GroupingPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string header;
  if (!std::getline(in, header) || header.rfind("PLAN n=", 0) != 0)
    throw std::runtime_error(path + ": missing PLAN header");
  GroupingPlan plan;
  plan.patch_side = std::stoi(header.substr(7));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<PatchRef> members;
    std::string tok;
    while (ls >> tok) {
      const auto comma = tok.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error(path + ": malformed member '" + tok + "'");
      members.push_back(
          {std::stoi(tok.substr(0, comma)), std::stoi(tok.substr(comma + 1))});
    }
    if (members.empty())
      throw std::runtime_error(path + ": empty group line");
    plan.groups.push_back(std::move(members));
  }
  return plan;
}

}  // namespace patchmodels
