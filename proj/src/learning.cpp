#include "patchmodels/learning.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "patchmodels/parallel.hpp"
#include "patchmodels/random.hpp"

namespace patchmodels {

UnitaryDictionary::UnitaryDictionary(Eigen::MatrixXd m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw std::invalid_argument("dictionary must be square and non-empty");
  if (unitary_deviation() > 1e-10)
    throw std::invalid_argument("dictionary is not unitary");
}

double UnitaryDictionary::unitary_deviation() const {
  return (m_.transpose() * m_ -
          Eigen::MatrixXd::Identity(m_.cols(), m_.cols()))
      .cwiseAbs()
      .maxCoeff();
}

UnitaryDictionary UnitaryDictionary::identity(int n) {
  return UnitaryDictionary(Eigen::MatrixXd::Identity(n, n));
}

UnitaryDictionary UnitaryDictionary::dct(int n) {
  Eigen::MatrixXd W(n, n);
  const double c0 = std::sqrt(1.0 / n);
  const double ck = std::sqrt(2.0 / n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      W(k, j) = (k == 0 ? c0 : ck) * std::cos(M_PI * (2 * j + 1) * k / (2.0 * n));
  // atoms are the transpose of the analysis rows
  return UnitaryDictionary(W.transpose());
}

UnitaryDictionary UnitaryDictionary::random_orthonormal(int n,
                                                        std::uint64_t seed) {
  RandomStream rng(seed);
  Eigen::MatrixXd G(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = rng.gauss();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ();
  const Eigen::MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int j = 0; j < n; ++j)
    if (R(j, j) < 0.0) Q.col(j) = -Q.col(j);
  return UnitaryDictionary(std::move(Q));
}

SparseCode sparse_code_sp(const UnitaryDictionary& D, const Eigen::VectorXd& z,
                          int K) {
  return hard_threshold(D.matrix().transpose() * z, K);
}

namespace {

// Fixes the SVD sign ambiguity: the largest-magnitude entry of each left
// singular vector is made positive (ties toward the smaller row index).
void normalize_svd_signs(Eigen::MatrixXd& U, Eigen::MatrixXd& V) {
  for (int j = 0; j < U.cols(); ++j) {
    int imax = 0;
    for (int i = 1; i < U.rows(); ++i)
      if (std::abs(U(i, j)) > std::abs(U(imax, j))) imax = i;
    if (U(imax, j) < 0.0) {
      U.col(j) = -U.col(j);
      V.col(j) = -V.col(j);
    }
  }
}

UnitaryDictionary procrustes(const Eigen::MatrixXd& A) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullU |
                                            Eigen::ComputeFullV);
  Eigen::MatrixXd U = svd.matrixU();
  Eigen::MatrixXd V = svd.matrixV();
  normalize_svd_signs(U, V);
  return UnitaryDictionary(U * V.transpose());
}

constexpr int kReduceChunk = 256;

// One coding pass: X = per-column H_K(D^T Z), accumulated objective
// sum ||z_j - D x_j||^2, and the Procrustes accumulator Z X^T. The chunked
// reduction keeps the summation order fixed regardless of thread count.
struct CodingPass {
  Eigen::MatrixXd A;   // Z X^T
  double objective = 0.0;
};

CodingPass code_columns(const Eigen::MatrixXd& D, const Eigen::MatrixXd& Z,
                        int K) {
  const int n = static_cast<int>(Z.rows());
  const int m = static_cast<int>(Z.cols());
  CodingPass total;
  total.A = Eigen::MatrixXd::Zero(n, n);
  chunked_reduce<CodingPass>(
      m, kReduceChunk,
      [&](int b, int e) {
        CodingPass part;
        part.A = Eigen::MatrixXd::Zero(n, n);
        for (int j = b; j < e; ++j) {
          const Eigen::VectorXd c = D.transpose() * Z.col(j);
          const std::vector<int> keep = top_k_indices(c, K);
          Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
          for (int i : keep) x[i] = c[i];
          part.objective += (Z.col(j) - D * x).squaredNorm();
          part.A += Z.col(j) * x.transpose();
        }
        return part;
      },
      [&](const CodingPass& part) {
        total.A += part.A;
        total.objective += part.objective;
      });
  return total;
}

UnitaryDictionary make_init(const LearnConfig& cfg, int n) {
  switch (cfg.init) {
    case LearnInit::identity: return UnitaryDictionary::identity(n);
    case LearnInit::dct_like: return UnitaryDictionary::dct(n);
    case LearnInit::seeded_random_orthonormal:
      return UnitaryDictionary::random_orthonormal(n, cfg.seed);
  }
  throw std::logic_error("unreachable");
}

}  // namespace

UnitaryDictionary update_dictionary(const Eigen::MatrixXd& Z,
                                    const Eigen::MatrixXd& X) {
  if (Z.rows() != X.rows() || Z.cols() != X.cols())
    throw std::invalid_argument("update_dictionary: shape mismatch");
  const Eigen::MatrixXd A = Z * X.transpose();
  if (A.norm() == 0.0)
    return UnitaryDictionary::identity(static_cast<int>(Z.rows()));
  return procrustes(A);
}

LearnResult learn_sp(const Eigen::MatrixXd& Z, const LearnConfig& cfg) {
  if (Z.cols() < 1) throw std::invalid_argument("learn_sp: no patches");
  if (cfg.iters < 1) throw std::invalid_argument("learn_sp: iters must be >= 1");
  const int n = static_cast<int>(Z.rows());
  if (cfg.K < 0 || cfg.K > n) throw std::invalid_argument("learn_sp: bad K");

  UnitaryDictionary D = make_init(cfg, n);
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(cfg.iters));
  for (int t = 0; t < cfg.iters; ++t) {
    const CodingPass pass = code_columns(D.matrix(), Z, cfg.K);
    trace.push_back(pass.objective);
    if (pass.A.norm() != 0.0) D = procrustes(pass.A);
  }
  return {std::move(D), std::move(trace)};
}

GroupLearnResult learn_gs(const PatchGroups& groups, const LearnConfig& cfg) {
  GroupLearnResult res;
  res.dicts.reserve(groups.size());
  res.objectives.resize(groups.size());
  std::vector<LearnResult> per(groups.size(),
                               LearnResult{UnitaryDictionary::identity(1), {}});
  parallel_for(static_cast<int>(groups.size()), [&](int i) {
    per[static_cast<std::size_t>(i)] =
        learn_sp(groups[static_cast<std::size_t>(i)], cfg);
  });
  for (std::size_t i = 0; i < groups.size(); ++i) {
    res.dicts.push_back(std::move(per[i].dict));
    res.objectives[i] = std::move(per[i].objective);
  }
  return res;
}

LearnResult learn_js(const PatchGroups& groups, const LearnConfig& cfg) {
  if (groups.empty()) throw std::invalid_argument("learn_js: no groups");
  if (cfg.iters < 1) throw std::invalid_argument("learn_js: iters must be >= 1");
  const int n = static_cast<int>(groups.front().rows());
  if (cfg.K < 0 || cfg.K > n) throw std::invalid_argument("learn_js: bad K");

  UnitaryDictionary D = make_init(cfg, n);
  std::vector<double> trace;
  trace.reserve(static_cast<std::size_t>(cfg.iters));

  struct JsPass {
    Eigen::MatrixXd A;
    double objective = 0.0;
  };
  for (int t = 0; t < cfg.iters; ++t) {
    JsPass total{Eigen::MatrixXd::Zero(n, n), 0.0};
    chunked_reduce<JsPass>(
        static_cast<int>(groups.size()), 8,
        [&](int b, int e) {
          JsPass part{Eigen::MatrixXd::Zero(n, n), 0.0};
          for (int g = b; g < e; ++g) {
            const Eigen::MatrixXd& Zg = groups[static_cast<std::size_t>(g)];
            const Eigen::MatrixXd C = D.matrix().transpose() * Zg;
            const Eigen::MatrixXd X = row_threshold(C, cfg.K);
            part.objective += (Zg - D.matrix() * X).squaredNorm();
            part.A += Zg * X.transpose();
          }
          return part;
        },
        [&](const JsPass& part) {
          total.A += part.A;
          total.objective += part.objective;
        });
    trace.push_back(total.objective);
    if (total.A.norm() != 0.0) D = procrustes(total.A);
  }
  return {std::move(D), std::move(trace)};
}

void save_dictionary(const UnitaryDictionary& D, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  const int n = D.size();
  out << "DICT n=" << n << "\n";
  char buf[64];
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), D.matrix()(r, c),
                                     std::chars_format::general, 17);
      if (c) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error(path + ": write failure");
}

UnitaryDictionary load_dictionary(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::string header;
  if (!std::getline(in, header) || header.rfind("DICT n=", 0) != 0)
    throw std::runtime_error(path + ": missing DICT header");
  const int n = std::stoi(header.substr(7));
  Eigen::MatrixXd M(n, n);
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c)
      if (!(in >> M(r, c)))
        throw std::runtime_error(path + ": truncated dictionary");
  return UnitaryDictionary(std::move(M));
}

}  // namespace patchmodels
