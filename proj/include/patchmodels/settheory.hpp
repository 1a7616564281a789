#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchmodels/projectors.hpp"

namespace patchmodels {

// One decidable membership claim about a set of patch groups.
struct Claim {
  ModelSpec spec;
  bool expected_member = false;
  enum class Mode {
    witness,             // check against the attached dictionaries
    brute_force,         // exact K=1 direction-line decision
    rank_auto,           // LR/GJS/SPLR rank test (witness used for SP part)
    js_exact_two_group,  // exact JS decision for two exactly-rank-K groups
  };
  Mode mode = Mode::witness;
  std::vector<Eigen::MatrixXd> witness;
  std::string note;
};

struct Counterexample {
  std::string name;
  PatchGroups groups;
  std::vector<Claim> claims;
};

struct ClaimOutcome {
  Claim claim;
  bool actual = false;
  bool ok = false;  // actual == expected
  std::string detail;
};

struct CertifyResult {
  bool ok = false;
  std::vector<ClaimOutcome> outcomes;
};

CertifyResult certify(const Counterexample& ce, double tol = 1e-9);

// Two groups of 1-sparse patches under the identity and under a plane
// rotation by theta: group-wise sparse, but no single unitary dictionary
// sparsifies both. Rejects theta on the lattice where the rotated atoms fall
// back onto axis lines. Requires 2 <= n <= 4 so the negative claim stays
// decidable.
Counterexample gen_gs_not_sp(int n, double theta);

// One group whose code has a full-rank circulant block (zero diagonal, ones
// elsewhere) of size (K+1): every column is K-sparse yet the rank exceeds K.
// Extra columns beyond K+1 are drawn K-sparse from a fixed seed.
Counterexample gen_sp_not_lr(int n, int M, int K);

// N >= 3 rank-one groups in the plane with pairwise distinct direction lines:
// every group has rank 1, but no orthonormal pair of atoms covers all lines.
// Degenerate draws are rejected and redrawn (bounded retries).
Counterexample gen_lr_not_sp(int N, std::uint64_t seed);

// Two (K+1) x (K+1) groups, each with K-sparse columns and rank exactly K,
// whose column spaces rule out any shared dictionary with K-row supports.
// Requires K >= 2.
Counterexample gen_splr_not_js(int K);

// Exact joint-sparsity decision for exactly two groups of rank exactly K:
// member iff the out-of-intersection parts of the two column spaces are
// orthogonal and 2K - dim(intersection) <= n.
struct JsTwoGroupDecision {
  bool member = false;
  bool applicable = false;  // both groups have numerical rank exactly K
  int intersection_dim = 0;
  double worst_cross = 0.0;  // largest singular value of U1^T U2
  std::string detail;
};
JsTwoGroupDecision js_member_two_group_exact(const PatchGroups& groups, int K,
                                             double tol = 1e-9);

struct StatementResult {
  std::string id;
  std::string sizes;
  bool pass = false;
  std::string detail;
};

// Runs every model-set relationship statement at small sizes
// (n in {2,3,4}, K in {1,2}) through the constructive instances above plus
// seeded random members for the inclusion directions. inject_failure names a
// statement whose instance is deliberately corrupted (test hook).
std::vector<StatementResult> verify_theorems(
    std::uint64_t seed, const std::string& inject_failure = {});

void write_statement_csv(const std::vector<StatementResult>& results,
                         const std::string& path);

}  // namespace patchmodels
