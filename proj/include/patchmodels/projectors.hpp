#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "patchmodels/patching.hpp"

namespace patchmodels {

enum class ModelKind { SP, GS, JS, GJS, LR, SPLR };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct ModelSpec {
  ModelKind kind = ModelKind::SP;
  int K = 1;
};

// K-sparse vector together with the indices of its nonzero entries.
struct SparseCode {
  Eigen::VectorXd values;
  std::vector<int> support;  // indices of the nonzero entries, ascending
};

// Keeps the K largest-magnitude entries of b, zeroing the rest; ties break
// toward the smaller index. Minimizes ||b - x||_2 over K-sparse x.
SparseCode hard_threshold(const Eigen::VectorXd& b, int K);

// The index set selected by hard_threshold (always size K, including entries
// that happen to be zero), ascending. This is the projection subspace.
std::vector<int> top_k_indices(const Eigen::VectorXd& b, int K);

// Keeps the K rows of B with the largest squared Euclidean norm, zeroing the
// rest; ties break toward the smaller row index.
Eigen::MatrixXd row_threshold(const Eigen::MatrixXd& B, int K);
std::vector<int> top_k_rows(const Eigen::MatrixXd& B, int K);

// Number of rows with any entry of magnitude above 1e-12.
int l0_inf_norm(const Eigen::MatrixXd& B);

struct LowRankResult {
  Eigen::MatrixXd approx;
  Eigen::MatrixXd basis;  // leading K left singular vectors, orthonormal
};

// Best rank-K approximation via truncated SVD. The squared Frobenius error
// equals the sum of squared singular values beyond the K largest.
LowRankResult lr_project(const Eigen::MatrixXd& Y, int K);

// True iff sigma_{K+1} <= tol * sigma_1 (relative tolerance), or Y == 0.
bool rank_leq(const Eigen::MatrixXd& Y, int K, double tol = 1e-9);

// Replayable linear operator captured by a denoiser. A leaf stores the
// per-patch supports (SP/GS), per-group row supports (JS) or per-group
// column-subspace bases (LR) together with the dictionaries used; composites
// chain records (alternating projection) or blend them (convex combination).
// Applying a record to the input it was captured from reproduces the denoised
// estimate.
struct ProjectorRecord {
  enum class Node { Leaf, Chain, Blend };
  Node node = Node::Leaf;

  // leaf payload
  ModelKind kind = ModelKind::SP;
  bool keep_dc = false;                      // patch means bypass the model
  Eigen::MatrixXd dict;                      // SP/JS shared dictionary
  std::vector<Eigen::MatrixXd> group_dicts;  // GS
  std::vector<std::vector<std::vector<int>>> col_supports;  // SP/GS
  std::vector<std::vector<int>> row_supports;               // JS
  std::vector<Eigen::MatrixXd> bases;                       // LR

  // composite payload
  std::vector<ProjectorRecord> parts;
  std::vector<double> weights;  // Blend only; same length as parts

  PatchGroups apply(const PatchGroups& input) const;
  Eigen::MatrixXd apply_group(std::size_t g, const Eigen::MatrixXd& Z) const;
  std::size_t group_count() const;

  static ProjectorRecord chain(std::vector<ProjectorRecord> stages);
  static ProjectorRecord blend(std::vector<ProjectorRecord> parts,
                               std::vector<double> weights);
};

// Outcome of a membership test, carrying enough context to audit a failure.
struct MembershipCertificate {
  bool member = false;
  std::string mode;        // "witness", "rank", "bruteforce-k1"
  int failing_group = -1;
  int failing_column = -1;  // or failing row for JS
  double offending_value = 0.0;
  std::string detail;
};

// Model-set membership for the patch groups.
//   LR / GJS : rank test per group (no witness needed).
//   SPLR     : LR test plus SP test.
//   SP/GS/JS : checked against the supplied witness dictionaries (one shared,
//              or one per group for GS), with tol relative to the code scale;
//              or, when brute_force is set and K == 1 with n <= 4, decided
//              exactly from the patch direction lines.
MembershipCertificate check_membership(
    const PatchGroups& groups, ModelSpec spec,
    const std::vector<Eigen::MatrixXd>& witness, double tol,
    bool brute_force = false);

}  // namespace patchmodels
