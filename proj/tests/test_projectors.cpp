#include <doctest.h>

#include <vector>

#include "patchmodels/projectors.hpp"
#include "patchmodels/random.hpp"
#include "test_util.hpp"

using namespace patchmodels;
using testutil::random_gaussian;
using testutil::random_unitary;
using testutil::random_vector;

namespace {

// Enumerates all index subsets of size k.
void subsets(int n, int k, std::vector<std::vector<int>>& out) {
  std::vector<int> cur(static_cast<std::size_t>(k));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == k) {
      out.push_back(cur);
      return;
    }
    for (int i = start; i < n; ++i) {
      cur[static_cast<std::size_t>(depth)] = i;
      rec(i + 1, depth + 1);
    }
  };
  rec(0, 0);
}

double support_projection_error(const Eigen::VectorXd& b,
                                const std::vector<int>& S) {
  double kept = 0.0;
  for (int i : S) kept += b[i] * b[i];
  return b.squaredNorm() - kept;
}

}  // namespace

TEST_CASE("hard_threshold keeps the K largest magnitudes") {
  Eigen::VectorXd b(4);
  b << 3.0, -1.0, 0.5, -4.0;
  const SparseCode code = hard_threshold(b, 2);
  Eigen::VectorXd want(4);
  want << 3.0, 0.0, 0.0, -4.0;
  CHECK(code.values == want);
  CHECK(code.support == std::vector<int>{0, 3});

  // K = n leaves the vector unchanged
  CHECK(hard_threshold(b, 4).values == b);

  // magnitude ties break toward the smaller index
  Eigen::VectorXd t(3);
  t << 1.0, -1.0, 1.0;
  const SparseCode tie = hard_threshold(t, 2);
  Eigen::VectorXd tw(3);
  tw << 1.0, -1.0, 0.0;
  CHECK(tie.values == tw);

  CHECK_THROWS_AS(hard_threshold(b, 5), std::invalid_argument);
}

TEST_CASE("hard_threshold matches brute-force support enumeration") {
  RandomStream rng(101);
  std::vector<std::vector<int>> supports;
  subsets(8, 3, supports);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd b = random_vector(8, rng);
    const SparseCode code = hard_threshold(b, 3);
    const double err = (b - code.values).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& S : supports)
      best = std::min(best, support_projection_error(b, S));
    CHECK(err == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("row_threshold keeps the K largest rows") {
  Eigen::MatrixXd B(3, 2);
  B << 1.0, 2.0, 0.1, 0.2, 3.0, -3.0;
  const Eigen::MatrixXd out = row_threshold(B, 2);
  CHECK(out.row(0) == B.row(0));
  CHECK(out.row(1).norm() == 0.0);
  CHECK(out.row(2) == B.row(2));
  CHECK(row_threshold(B, 3) == B);
  CHECK(l0_inf_norm(out) == 2);
}

TEST_CASE("row_threshold matches brute-force row-support enumeration") {
  RandomStream rng(102);
  std::vector<std::vector<int>> supports;
  subsets(6, 2, supports);
  for (int trial = 0; trial < 30; ++trial) {
    const Eigen::MatrixXd B = random_gaussian(6, 4, rng);
    const double err = (B - row_threshold(B, 2)).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    for (const auto& S : supports) {
      double kept = 0.0;
      for (int r : S) kept += B.row(r).squaredNorm();
      best = std::min(best, B.squaredNorm() - kept);
    }
    CHECK(err == doctest::Approx(best).epsilon(1e-12));
  }
}

TEST_CASE("thresholding is idempotent and non-expansive") {
  RandomStream rng(103);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd b = random_vector(10, rng);
    const SparseCode once = hard_threshold(b, 4);
    CHECK(hard_threshold(once.values, 4).values == once.values);
    CHECK(once.values.norm() <= b.norm());

    const Eigen::MatrixXd B = random_gaussian(7, 5, rng);
    const Eigen::MatrixXd ronce = row_threshold(B, 3);
    CHECK(row_threshold(ronce, 3) == ronce);
    CHECK(ronce.norm() <= B.norm());
  }
}

TEST_CASE("l0_inf_norm counts nonzero rows") {
  Eigen::MatrixXd B(3, 2);
  B << 1.0, 0.0, 0.0, 0.0, 0.0, 2.0;
  CHECK(l0_inf_norm(B) == 2);
  CHECK(l0_inf_norm(Eigen::MatrixXd::Zero(4, 4)) == 0);

  // the jointly-sparse counterexample code at K=2 has every row active
  Eigen::MatrixXd X1(3, 3);
  X1 << 1, 1, 0, 1, 0, 1, 0, 1, -1;
  CHECK(l0_inf_norm(X1) == 3);
}

TEST_CASE("lr_project examples and Eckart-Young optimality") {
  Eigen::MatrixXd D2 = Eigen::MatrixXd::Zero(2, 2);
  D2(0, 0) = 2.0;
  D2(1, 1) = 1.0;
  const LowRankResult r1 = lr_project(D2, 1);
  Eigen::MatrixXd want = Eigen::MatrixXd::Zero(2, 2);
  want(0, 0) = 2.0;
  CHECK((r1.approx - want).norm() <= 1e-12);

  RandomStream rng(104);
  // a matrix of rank <= K is a fixed point
  const Eigen::MatrixXd low =
      random_gaussian(6, 2, rng) * random_gaussian(2, 9, rng);
  CHECK((lr_project(low, 2).approx - low).norm() <= 1e-10 * low.norm());

  // random 8x16, K=3: error equals the singular value tail and beats random
  // rank-3 competitors
  const Eigen::MatrixXd Y = random_gaussian(8, 16, rng);
  const int K = 3;
  const LowRankResult lr = lr_project(Y, K);
  const double err = (Y - lr.approx).squaredNorm();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y);
  double tail = 0.0;
  for (int j = K; j < svd.singularValues().size(); ++j)
    tail += svd.singularValues()[j] * svd.singularValues()[j];
  CHECK(err == doctest::Approx(tail).epsilon(1e-9));
  for (int c = 0; c < 1000; ++c) {
    const Eigen::MatrixXd comp =
        random_gaussian(8, K, rng) * random_gaussian(K, 16, rng);
    CHECK(err <= (Y - comp).squaredNorm() + 1e-12);
  }

  // idempotence and record replay
  const LowRankResult again = lr_project(lr.approx, K);
  CHECK((again.approx - lr.approx).norm() <= 1e-10 * lr.approx.norm());
  const Eigen::MatrixXd replay = lr.basis * (lr.basis.transpose() * Y);
  CHECK((replay - lr.approx).norm() <= 1e-10 * lr.approx.norm());

  Eigen::MatrixXd bad = Y;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(lr_project(bad, 1), std::runtime_error);
}

TEST_CASE("rank_leq on constructed matrices") {
  RandomStream rng(105);
  const Eigen::VectorXd u = random_vector(5, rng);
  const Eigen::VectorXd v = random_vector(7, rng);
  CHECK(rank_leq(u * v.transpose(), 1, 1e-9));

  Eigen::MatrixXd lam2(3, 3);
  lam2 << 0, 1, 1, 1, 0, 1, 1, 1, 0;  // determinant 2, full rank
  CHECK_FALSE(rank_leq(lam2, 2, 1e-9));

  CHECK(rank_leq(Eigen::MatrixXd::Identity(4, 4), 4, 1e-9));
  CHECK(rank_leq(Eigen::MatrixXd::Zero(3, 3), 1, 1e-9));
}

TEST_CASE("membership: witnessed sparse checks") {
  RandomStream rng(106);
  const int n = 4;
  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(n, n);

  // 1-sparse columns under the identity witness
  Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, 3);
  Y(0, 0) = 2.0;
  Y(2, 1) = -1.0;
  Y(3, 2) = 0.5;
  CHECK(check_membership({Y}, {ModelKind::SP, 1}, {ident}, 1e-9).member);
  CHECK_FALSE(
      check_membership({random_gaussian(n, 3, rng)}, {ModelKind::SP, 1},
                       {ident}, 1e-9)
          .member);

  // membership is scale invariant
  CHECK(check_membership({Y * 3.7e5}, {ModelKind::SP, 1}, {ident}, 1e-9).member);
  CHECK(check_membership({Y * 1e-6}, {ModelKind::SP, 1}, {ident}, 1e-9).member);

  // witness required outside brute-force mode
  CHECK_THROWS_AS(check_membership({Y}, {ModelKind::SP, 1}, {}, 1e-9, false),
                  std::invalid_argument);
}

TEST_CASE("membership: GJS and LR verdicts coincide") {
  RandomStream rng(107);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = 3 + static_cast<int>(rng.below(2));
    const int K = 1 + static_cast<int>(rng.below(2));
    PatchGroups g;
    const int N = 1 + static_cast<int>(rng.below(3));
    for (int i = 0; i < N; ++i) {
      if (rng.uniform() < 0.5)
        g.push_back(random_gaussian(n, K, rng) * random_gaussian(K, K + 2, rng));
      else
        g.push_back(random_gaussian(n, K + 2, rng));
    }
    const bool gjs = check_membership(g, {ModelKind::GJS, K}, {}, 1e-9).member;
    const bool lr = check_membership(g, {ModelKind::LR, K}, {}, 1e-9).member;
    CHECK(gjs == lr);
  }
}

TEST_CASE("membership: monotone in K under a fixed witness") {
  RandomStream rng(108);
  const int n = 6;
  const Eigen::MatrixXd D = random_unitary(n, rng);
  for (int trial = 0; trial < 20; ++trial) {
    // codes that are K-sparse for K = 2
    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, 6);
    for (int j = 0; j < 6; ++j) {
      X(static_cast<int>(rng.below(n)), j) = rng.gauss();
      X(static_cast<int>(rng.below(n)), j) = rng.gauss();
    }
    const PatchGroups g = {D * X};
    bool prev = false;
    for (int K = 2; K <= 4; ++K) {
      const bool member =
          check_membership(g, {ModelKind::SP, K}, {D}, 1e-9).member;
      if (prev) CHECK(member);
      prev = member;
    }
    CHECK(prev);
  }
}

TEST_CASE("membership: brute-force K=1 direction analysis") {
  // two orthogonal lines: member
  Eigen::MatrixXd Y(2, 3);
  Y << 1.0, 0.0, -2.0, 0.0, 3.0, 0.0;
  CHECK(check_membership({Y}, {ModelKind::SP, 1}, {}, 1e-9, true).member);

  // add a diagonal direction: no orthogonal pair covers three lines
  Eigen::MatrixXd Y2(2, 4);
  Y2 << 1.0, 0.0, -2.0, 1.0, 0.0, 3.0, 0.0, 1.0;
  const MembershipCertificate cert =
      check_membership({Y2}, {ModelKind::SP, 1}, {}, 1e-9, true);
  CHECK_FALSE(cert.member);
  CHECK(cert.mode == "bruteforce-k1");

  // brute force rejects K > 1
  CHECK_THROWS_AS(check_membership({Y}, {ModelKind::SP, 2}, {}, 1e-9, true),
                  std::invalid_argument);
}

TEST_CASE("projector records replay their construction input") {
  RandomStream rng(109);
  const int n = 6;
  const Eigen::MatrixXd D = random_unitary(n, rng);
  PatchGroups g = {random_gaussian(n, 5, rng), random_gaussian(n, 7, rng)};

  ProjectorRecord rec;
  rec.kind = ModelKind::JS;
  rec.dict = D;
  rec.row_supports = {{0, 2}, {1, 3}};
  const PatchGroups out = rec.apply(g);
  const PatchGroups replay = rec.apply(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK((out[i] - replay[i]).norm() == 0.0);

  // a blend of a record with itself is the record
  const ProjectorRecord half =
      ProjectorRecord::blend({rec, rec}, {0.5, 0.5});
  const PatchGroups blended = half.apply(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    CHECK((blended[i] - out[i]).norm() <= 1e-12 * out[i].norm());
}
