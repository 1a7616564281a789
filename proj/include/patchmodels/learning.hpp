#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "patchmodels/patching.hpp"
#include "patchmodels/projectors.hpp"

namespace patchmodels {

// Square matrix with orthonormal columns; columns are the atoms.
class UnitaryDictionary {
 public:
  explicit UnitaryDictionary(Eigen::MatrixXd m);

  static UnitaryDictionary identity(int n);
  // Orthonormal DCT-II basis for length-n signals.
  static UnitaryDictionary dct(int n);
  static UnitaryDictionary random_orthonormal(int n, std::uint64_t seed);

  const Eigen::MatrixXd& matrix() const { return m_; }
  int size() const { return static_cast<int>(m_.cols()); }

  // Max abs deviation of D^T D from the identity.
  double unitary_deviation() const;

 private:
  Eigen::MatrixXd m_;
};

enum class LearnInit { identity, dct_like, seeded_random_orthonormal };

struct LearnConfig {
  int K = 1;
  int iters = 20;
  LearnInit init = LearnInit::identity;
  std::uint64_t seed = 0;
};

// Optimal K-sparse code of z under a unitary dictionary: H_K(D^T z).
SparseCode sparse_code_sp(const UnitaryDictionary& D, const Eigen::VectorXd& z,
                          int K);

// Unitary minimizer of ||Z - D X||_F^2 (orthogonal Procrustes on Z X^T),
// with a fixed SVD sign convention so results are platform-deterministic.
// A zero Z X^T returns the identity; learners keep their current dictionary
// in that case.
UnitaryDictionary update_dictionary(const Eigen::MatrixXd& Z,
                                    const Eigen::MatrixXd& X);

struct LearnResult {
  UnitaryDictionary dict;
  std::vector<double> objective;  // one entry per iteration, non-increasing
};

struct GroupLearnResult {
  std::vector<UnitaryDictionary> dicts;
  std::vector<std::vector<double>> objectives;
};

// Block coordinate descent for the column-sparse model: alternates exact
// sparse coding of every column of Z with the exact Procrustes dictionary
// update. objective[t] is the coding residual at the start of round t.
LearnResult learn_sp(const Eigen::MatrixXd& Z, const LearnConfig& cfg);

// Independent learn_sp per group, each trained only on its own columns.
GroupLearnResult learn_gs(const PatchGroups& groups, const LearnConfig& cfg);

// Shared dictionary with row-sparse (jointly sparse) codes per group.
LearnResult learn_js(const PatchGroups& groups, const LearnConfig& cfg);

// Text format: "DICT n=<n>" header, then n rows of n values at full
// precision.
void save_dictionary(const UnitaryDictionary& D, const std::string& path);
UnitaryDictionary load_dictionary(const std::string& path);

}  // namespace patchmodels
