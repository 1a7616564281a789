#include "patchmodels/settheory.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <fstream>
#include <sstream>

#include "patchmodels/learning.hpp"
#include "patchmodels/random.hpp"

namespace patchmodels {

namespace {

Eigen::MatrixXd plane_rotation(int n, double theta) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Identity(n, n);
  D(0, 0) = std::cos(theta);
  D(0, 1) = -std::sin(theta);
  D(1, 0) = std::sin(theta);
  D(1, 1) = std::cos(theta);
  return D;
}

// Circulant-style block of the sparse-but-full-rank construction: zero
// diagonal, ones elsewhere.
Eigen::MatrixXd ones_minus_identity(int m) {
  return Eigen::MatrixXd::Ones(m, m) - Eigen::MatrixXd::Identity(m, m);
}

Eigen::MatrixXd random_orthonormal_cols(int n, int k, RandomStream& rng) {
  Eigen::MatrixXd G(n, k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < n; ++i) G(i, j) = rng.gauss();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(G);
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, k);
  return Q;
}

}  // namespace

// ---------------------------------------------------------------------------
// Generators

Counterexample gen_gs_not_sp(int n, double theta) {
  if (n < 2 || n > 4)
    throw std::invalid_argument(
        "gen_gs_not_sp: n must be in [2, 4] so the negative claim is decidable");
  const double quarter = std::remainder(theta, M_PI / 2.0);
  if (std::abs(std::remainder(theta, 2.0 * M_PI)) < 1e-9)
    throw std::invalid_argument("gen_gs_not_sp: theta must not be a multiple of 2*pi");
  if (std::abs(quarter) < 1e-9)
    throw std::invalid_argument(
        "gen_gs_not_sp: rotation by a multiple of pi/2 maps axis lines to axis "
        "lines (degenerate)");

  const Eigen::MatrixXd d1 = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd d2 = plane_rotation(n, theta);

  // 1-sparse codes spanning the first two atoms, with assorted scalings
  Eigen::MatrixXd X(n, 4);
  X.setZero();
  X(0, 0) = 1.0;
  X(1, 1) = 2.0;
  X(0, 2) = -1.5;
  X(1, 3) = 0.5;

  Counterexample ce;
  ce.name = "gs-not-sp(n=" + std::to_string(n) + ")";
  ce.groups = {d1 * X, d2 * X};

  Claim gs;
  gs.spec = {ModelKind::GS, 1};
  gs.expected_member = true;
  gs.mode = Claim::Mode::witness;
  gs.witness = {d1, d2};
  ce.claims.push_back(gs);

  Claim sp;
  sp.spec = {ModelKind::SP, 1};
  sp.expected_member = false;
  sp.mode = Claim::Mode::brute_force;
  sp.note = "four direction lines, no orthogonal pair covers them";
  ce.claims.push_back(sp);
  return ce;
}

Counterexample gen_sp_not_lr(int n, int M, int K) {
  if (K < 1) throw std::invalid_argument("gen_sp_not_lr: K must be >= 1");
  if (n < K + 1 || M < K + 1)
    throw std::invalid_argument("gen_sp_not_lr: need n >= K+1 and M >= K+1");

  Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, M);
  X.topLeftCorner(K + 1, K + 1) = ones_minus_identity(K + 1);
  RandomStream rng(mix_seed(0x5eed, static_cast<std::uint64_t>(n * 1000 + M * 10 + K)));
  for (int j = K + 1; j < M; ++j) {
    // K-sparse padding column
    std::vector<int> rows(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
    for (int pick = 0; pick < K; ++pick) {
      const std::size_t r =
          pick + static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n - pick)));
      std::swap(rows[static_cast<std::size_t>(pick)], rows[r]);
      X(rows[static_cast<std::size_t>(pick)], j) = rng.gauss();
    }
  }

  Counterexample ce;
  ce.name = "sp-not-lr(n=" + std::to_string(n) + ",M=" + std::to_string(M) +
            ",K=" + std::to_string(K) + ")";
  ce.groups = {X};

  Claim sp;
  sp.spec = {ModelKind::SP, K};
  sp.expected_member = true;
  sp.mode = Claim::Mode::witness;
  sp.witness = {Eigen::MatrixXd::Identity(n, n)};
  ce.claims.push_back(sp);

  Claim lr;
  lr.spec = {ModelKind::LR, K};
  lr.expected_member = false;
  lr.mode = Claim::Mode::rank_auto;
  lr.note = "the (K+1)-circulant block is full rank";
  ce.claims.push_back(lr);
  return ce;
}

Counterexample gen_lr_not_sp(int N, std::uint64_t seed) {
  if (N < 3)
    throw std::invalid_argument(
        "gen_lr_not_sp: need N > C(2,1) = 2 rank-one groups");
  RandomStream rng(seed);
  std::vector<double> angles;
  for (int attempt = 0; attempt < 100 && static_cast<int>(angles.size()) < N;
       ++attempt) {
    const double a = rng.uniform() * M_PI;
    bool ok = true;
    for (double b : angles)
      if (std::abs(std::remainder(a - b, M_PI)) < 0.05) ok = false;
    if (ok) angles.push_back(a);
  }
  if (static_cast<int>(angles.size()) < N)
    throw std::runtime_error("gen_lr_not_sp: retries exhausted drawing distinct lines");

  Counterexample ce;
  ce.name = "lr-not-sp(N=" + std::to_string(N) + ")";
  for (double a : angles) {
    Eigen::VectorXd d(2);
    d << std::cos(a), std::sin(a);
    Eigen::MatrixXd Y(2, 2);
    Y.col(0) = d;
    Y.col(1) = -2.0 * d;  // same line, different scale: rank one
    ce.groups.push_back(Y);
  }

  Claim lr;
  lr.spec = {ModelKind::LR, 1};
  lr.expected_member = true;
  lr.mode = Claim::Mode::rank_auto;
  ce.claims.push_back(lr);

  Claim sp;
  sp.spec = {ModelKind::SP, 1};
  sp.expected_member = false;
  sp.mode = Claim::Mode::brute_force;
  sp.note = "more direction lines than any orthogonal atom pair can cover";
  ce.claims.push_back(sp);
  return ce;
}

Counterexample gen_splr_not_js(int K) {
  if (K < 2) throw std::invalid_argument("gen_splr_not_js: K must be >= 2");
  const int m = K + 1;

  // Ones with zeros on the anti-diagonal; the last (resp. first) column is a
  // signed combination of the others, which pins the rank at exactly K while
  // every row stays nonzero.
  Eigen::MatrixXd x1 = Eigen::MatrixXd::Ones(m, m);
  for (int i = 0; i < m; ++i) x1(i, m - 1 - i) = 0.0;
  Eigen::VectorXd last = Eigen::VectorXd::Zero(m);
  for (int j = 0; j < K - 1; ++j) last += x1.col(j);
  last -= (K - 1.0) * x1.col(K - 1);
  x1.col(m - 1) = last;

  Eigen::MatrixXd x2 = Eigen::MatrixXd::Ones(m, m);
  for (int i = 0; i < m; ++i) x2(i, m - 1 - i) = 0.0;
  Eigen::VectorXd first = Eigen::VectorXd::Zero(m);
  for (int j = 2; j < m; ++j) first += x2.col(j);
  first -= (K - 1.0) * x2.col(1);
  x2.col(0) = first;

  Counterexample ce;
  ce.name = "splr-not-js(K=" + std::to_string(K) + ")";
  ce.groups = {x1, x2};

  const Eigen::MatrixXd ident = Eigen::MatrixXd::Identity(m, m);
  Claim sp;
  sp.spec = {ModelKind::SP, K};
  sp.expected_member = true;
  sp.mode = Claim::Mode::witness;
  sp.witness = {ident};
  ce.claims.push_back(sp);

  Claim lr;
  lr.spec = {ModelKind::LR, K};
  lr.expected_member = true;
  lr.mode = Claim::Mode::rank_auto;
  ce.claims.push_back(lr);

  Claim splr;
  splr.spec = {ModelKind::SPLR, K};
  splr.expected_member = true;
  splr.mode = Claim::Mode::rank_auto;
  splr.witness = {ident};
  ce.claims.push_back(splr);

  Claim js;
  js.spec = {ModelKind::JS, K};
  js.expected_member = false;
  js.mode = Claim::Mode::js_exact_two_group;
  js.witness = {ident};
  js.note = "every row is nonzero under the identity, and the column-space "
            "geometry rules out any shared dictionary";
  ce.claims.push_back(js);
  return ce;
}

// ---------------------------------------------------------------------------
// Exact two-group JS decision

JsTwoGroupDecision js_member_two_group_exact(const PatchGroups& groups, int K,
                                             double tol) {
  JsTwoGroupDecision out;
  if (groups.size() != 2) {
    out.detail = "procedure defined for exactly two groups";
    return out;
  }
  const int n = static_cast<int>(groups[0].rows());
  std::vector<Eigen::MatrixXd> spaces;
  for (const auto& Y : groups) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinU);
    const Eigen::VectorXd& s = svd.singularValues();
    int rank = 0;
    for (int i = 0; i < s.size(); ++i)
      if (s[i] > tol * s[0]) ++rank;
    if (rank != K) {
      out.detail = "group rank " + std::to_string(rank) + " != K";
      return out;  // not applicable: the subspace is not pinned by the data
    }
    spaces.push_back(svd.matrixU().leftCols(K));
  }
  out.applicable = true;

  // principal angles between the two column spaces
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(spaces[0].transpose() * spaces[1],
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& cosines = svd.singularValues();
  int d = 0;
  for (int i = 0; i < cosines.size(); ++i)
    if (cosines[i] >= 1.0 - 1e-9) ++d;
  out.intersection_dim = d;

  if (2 * K - d > n) {
    out.member = false;
    out.detail = "needs " + std::to_string(2 * K - d) + " atoms in dimension " +
                 std::to_string(n);
    return out;
  }
  if (d == K) {
    // identical column spaces: one orthonormal basis serves both groups
    out.member = true;
    out.detail = "column spaces coincide";
    return out;
  }
  const Eigen::MatrixXd u1 = spaces[0] * svd.matrixU().rightCols(K - d);
  const Eigen::MatrixXd u2 = spaces[1] * svd.matrixV().rightCols(K - d);
  Eigen::JacobiSVD<Eigen::MatrixXd> cross(u1.transpose() * u2);
  out.worst_cross = cross.singularValues().maxCoeff();
  out.member = out.worst_cross <= 1e-9;
  {
    std::ostringstream os;
    os << "intersection dim " << d << ", residual subspace correlation "
       << out.worst_cross;
    out.detail = os.str();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Certification

CertifyResult certify(const Counterexample& ce, double tol) {
  CertifyResult res;
  res.ok = true;
  for (const Claim& claim : ce.claims) {
    ClaimOutcome oc;
    oc.claim = claim;
    switch (claim.mode) {
      case Claim::Mode::witness:
      case Claim::Mode::rank_auto: {
        const MembershipCertificate cert =
            check_membership(ce.groups, claim.spec, claim.witness, tol, false);
        oc.actual = cert.member;
        oc.detail = cert.mode + (cert.detail.empty() ? "" : ": " + cert.detail);
        break;
      }
      case Claim::Mode::brute_force: {
        const MembershipCertificate cert =
            check_membership(ce.groups, claim.spec, {}, tol, true);
        oc.actual = cert.member;
        oc.detail = cert.mode + (cert.detail.empty() ? "" : ": " + cert.detail);
        break;
      }
      case Claim::Mode::js_exact_two_group: {
        // three independent strands of evidence, which must agree:
        // the identity witness fails, every SVD-frame candidate fails, and
        // the exact two-group decision refutes membership
        const MembershipCertificate ident = check_membership(
            ce.groups, claim.spec, claim.witness, tol, false);
        bool frames_admit = false;
        std::vector<Eigen::MatrixXd> candidates;
        for (const auto& Y : ce.groups) {
          Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeFullU);
          candidates.push_back(svd.matrixU());
        }
        for (const auto& D : candidates) {
          const MembershipCertificate c =
              check_membership(ce.groups, claim.spec, {D}, tol, false);
          if (c.member) frames_admit = true;
        }
        const JsTwoGroupDecision exact =
            js_member_two_group_exact(ce.groups, claim.spec.K, tol);
        if (!exact.applicable) {
          oc.actual = !claim.expected_member;  // cannot decide
          oc.ok = false;
          oc.detail = "exact decision inapplicable: " + exact.detail;
          res.ok = false;
          res.outcomes.push_back(std::move(oc));
          continue;
        }
        oc.actual = ident.member || frames_admit || exact.member;
        std::ostringstream os;
        os << "identity witness " << (ident.member ? "admits" : "fails")
           << ", SVD frames " << (frames_admit ? "admit" : "fail")
           << ", exact: " << exact.detail;
        oc.detail = os.str();
        break;
      }
    }
    oc.ok = (oc.actual == claim.expected_member);
    if (!oc.ok) res.ok = false;
    res.outcomes.push_back(std::move(oc));
  }
  return res;
}

// ---------------------------------------------------------------------------
// Statement battery

namespace {

struct Battery {
  std::uint64_t seed;
  std::string inject;
  std::vector<StatementResult> results;

  bool should_corrupt(const std::string& id) const { return id == inject; }

  static void corrupt(PatchGroups& groups) {
    groups.front().array() += 0.37;  // breaks exact sparsity and rank
  }

  void add(const std::string& id, const std::string& sizes, bool pass,
           const std::string& detail) {
    results.push_back({id, sizes, pass, detail});
  }

  PatchGroups random_rank_k_group(int n, int M, int K, RandomStream& rng,
                                  Eigen::MatrixXd* frame) const {
    const Eigen::MatrixXd B = random_orthonormal_cols(n, n, rng);
    Eigen::MatrixXd coef(K, M);
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < K; ++i) coef(i, j) = rng.gauss();
    if (frame) *frame = B;
    return {B.leftCols(K) * coef};
  }

  // N groups sharing a dictionary, each with one random K-row support
  PatchGroups random_js_member(int n, int M, int K, int N, RandomStream& rng,
                               Eigen::MatrixXd* dict) const {
    const Eigen::MatrixXd D = random_orthonormal_cols(n, n, rng);
    PatchGroups groups;
    for (int g = 0; g < N; ++g) {
      Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, M);
      std::vector<int> rows(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) rows[static_cast<std::size_t>(i)] = i;
      for (int pick = 0; pick < K; ++pick) {
        const std::size_t r = pick + static_cast<std::size_t>(rng.below(
                                         static_cast<std::uint64_t>(n - pick)));
        std::swap(rows[static_cast<std::size_t>(pick)], rows[r]);
        for (int j = 0; j < M; ++j)
          X(rows[static_cast<std::size_t>(pick)], j) = rng.gauss();
      }
      groups.push_back(D * X);
    }
    if (dict) *dict = D;
    return groups;
  }

  void run();
};

void Battery::run() {
  const double tol = 1e-9;

  // ---- single-group statements ----------------------------------------
  {
    bool pass = true;
    std::string detail;
    RandomStream rng(mix_seed(seed, 11));
    for (int n : {3, 4}) {
      for (int K : {1, 2}) {
        if (K + 1 > n) continue;
        Eigen::MatrixXd frame;
        PatchGroups g = random_rank_k_group(n, n + 1, K, rng, &frame);
        if (should_corrupt("n1-js-gjs-lr-splr-equal")) corrupt(g);
        const bool js =
            check_membership(g, {ModelKind::JS, K}, {frame}, tol).member;
        const bool gjs = check_membership(g, {ModelKind::GJS, K}, {}, tol).member;
        const bool lr = check_membership(g, {ModelKind::LR, K}, {}, tol).member;
        const bool splr =
            check_membership(g, {ModelKind::SPLR, K}, {frame}, tol).member;
        if (!(js && gjs && lr && splr)) {
          pass = false;
          detail = "rank-" + std::to_string(K) + " group at n=" +
                   std::to_string(n) + " missed an equal set";
        }
      }
    }
    add("n1-js-gjs-lr-splr-equal", "N=1, n in {3,4}, K in {1,2}", pass,
        pass ? "JS=GJS=LR=SPLR on SVD-witnessed rank-K groups" : detail);
  }
  {
    bool pass = true;
    std::string detail;
    RandomStream rng(mix_seed(seed, 12));
    for (int n : {3, 4}) {
      for (int K : {1, 2}) {
        if (K + 1 > n) continue;
        Eigen::MatrixXd D = random_orthonormal_cols(n, n, rng);
        Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, n + 1);
        for (int j = 0; j < X.cols(); ++j)
          for (int pick = 0; pick < K; ++pick)
            X((j + pick) % n, j) = rng.gauss();
        PatchGroups g = {D * X};
        if (should_corrupt("n1-sp-gs-equal")) corrupt(g);
        const bool sp = check_membership(g, {ModelKind::SP, K}, {D}, tol).member;
        const bool gs = check_membership(g, {ModelKind::GS, K}, {D}, tol).member;
        if (!(sp && gs)) {
          pass = false;
          detail = "sparse group at n=" + std::to_string(n) + " failed";
        }
      }
    }
    add("n1-sp-gs-equal", "N=1, n in {3,4}, K in {1,2}", pass,
        pass ? "SP=GS on witnessed column-sparse groups" : detail);
  }
  {
    // JS strictly inside SP at N=1: a group with two orthogonal direction
    // lines is 1-sparse but not jointly 1-sparse.
    bool pass = true;
    std::string detail;
    for (int n : {2, 3, 4}) {
      Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(n, 3);
      Y(0, 0) = 1.0;
      Y(1, 1) = 2.0;
      Y(0, 2) = -1.5;
      PatchGroups g = {Y};
      if (should_corrupt("n1-js-in-sp-strict")) corrupt(g);
      const bool sp =
          check_membership(g, {ModelKind::SP, 1}, {}, tol, true).member;
      const bool js =
          check_membership(g, {ModelKind::JS, 1}, {}, tol, true).member;
      if (!(sp && !js)) {
        pass = false;
        detail = "axis-pair instance at n=" + std::to_string(n) + " misjudged";
      }
    }
    add("n1-js-in-sp-strict", "N=1, n in {2,3,4}, K=1", pass,
        pass ? "JS proper subset of SP (two orthogonal lines)" : detail);
  }

  // ---- multi-group statements -----------------------------------------
  {
    bool pass = true;
    std::string detail;
    RandomStream rng(mix_seed(seed, 21));
    for (int n : {3, 4}) {
      for (int K : {1, 2}) {
        if (K + 1 > n) continue;
        Eigen::MatrixXd D;
        PatchGroups g = random_js_member(n, K + 2, K, 3, rng, &D);
        if (should_corrupt("js-sp-gs-chain")) corrupt(g);
        const bool js = check_membership(g, {ModelKind::JS, K}, {D}, tol).member;
        const bool sp = check_membership(g, {ModelKind::SP, K}, {D}, tol).member;
        const bool gs = check_membership(g, {ModelKind::GS, K}, {D}, tol).member;
        if (!(js && sp && gs)) {
          pass = false;
          detail = "JS member failed an inclusion at n=" + std::to_string(n);
        }
      }
    }
    // strictness of JS inside SP with several groups
    {
      Eigen::MatrixXd Y(2, 2);
      Y << 1.0, 0.0, 0.0, 1.0;
      PatchGroups g = {Y, Y};
      const bool sp = check_membership(g, {ModelKind::SP, 1}, {}, tol, true).member;
      const bool js = check_membership(g, {ModelKind::JS, 1}, {}, tol, true).member;
      if (!(sp && !js)) {
        pass = false;
        detail = "strictness instance misjudged";
      }
    }
    add("js-sp-gs-chain", "N=3 random members; N=2 strictness; n in {2,3,4}, K in {1,2}",
        pass, pass ? "JS < SP < GS chain (sp-in-gs-strict covers the right edge)"
                   : detail);
  }
  {
    bool pass = true;
    std::string detail;
    RandomStream rng(mix_seed(seed, 22));
    for (int n : {3, 4}) {
      for (int K : {1, 2}) {
        if (K + 1 > n) continue;
        Eigen::MatrixXd D;
        PatchGroups g = random_js_member(n, K + 2, K, 3, rng, &D);
        if (should_corrupt("js-gjs-gs-chain")) corrupt(g);
        const bool gjs = check_membership(g, {ModelKind::GJS, K}, {}, tol).member;
        const bool gs = check_membership(g, {ModelKind::GS, K}, {D}, tol).member;
        if (!(gjs && gs)) {
          pass = false;
          detail = "JS member failed GJS/GS at n=" + std::to_string(n);
        }
      }
    }
    // strictness JS != GJS: two rank-one groups on non-orthogonal lines
    {
      Eigen::MatrixXd y1(2, 2), y2(2, 2);
      Eigen::VectorXd d1(2), d2(2);
      d1 << 1.0, 0.0;
      d2 << std::cos(0.9), std::sin(0.9);
      y1.col(0) = d1;
      y1.col(1) = 3.0 * d1;
      y2.col(0) = d2;
      y2.col(1) = -d2;
      PatchGroups g = {y1, y2};
      const bool gjs = check_membership(g, {ModelKind::GJS, 1}, {}, tol).member;
      const bool js = check_membership(g, {ModelKind::JS, 1}, {}, tol, true).member;
      if (!(gjs && !js)) {
        pass = false;
        detail = "GJS-not-JS instance misjudged";
      }
    }
    add("js-gjs-gs-chain", "N=3 random members; N=2 strictness; n in {2,3,4}, K in {1,2}",
        pass, pass ? "JS < GJS < GS chain (sp-in-gs-strict covers the right edge)"
                   : detail);
  }
  {
    bool pass = true;
    int checked = 0;
    RandomStream rng(mix_seed(seed, 23));
    for (int trial = 0; trial < 100; ++trial) {
      const int n = 2 + static_cast<int>(rng.below(3));
      const int K = n == 2 ? 1 : 1 + static_cast<int>(rng.below(2));
      const int N = 1 + static_cast<int>(rng.below(3));
      const int M = K + 1 + static_cast<int>(rng.below(2));
      PatchGroups g;
      for (int i = 0; i < N; ++i) {
        if (rng.uniform() < 0.5) {
          Eigen::MatrixXd frame;
          PatchGroups one = random_rank_k_group(n, M, K, rng, &frame);
          g.push_back(one.front());
        } else {
          Eigen::MatrixXd Y(n, M);
          for (int c = 0; c < M; ++c)
            for (int r = 0; r < n; ++r) Y(r, c) = rng.gauss();
          g.push_back(Y);
        }
      }
      if (should_corrupt("gjs-lr-equal") && trial == 0) corrupt(g);
      const bool gjs = check_membership(g, {ModelKind::GJS, K}, {}, tol).member;
      const bool lr = check_membership(g, {ModelKind::LR, K}, {}, tol).member;
      ++checked;
      if (gjs != lr) {
        pass = false;
        break;
      }
    }
    add("gjs-lr-equal", std::to_string(checked) + " random instances, n in {2,3,4}, K in {1,2}",
        pass, pass ? "GJS and LR verdicts identical" : "verdicts diverged");
  }
  {
    bool pass = true;
    std::string detail("circulant block instances");
    for (const auto& [n, M, K] : std::vector<std::tuple<int, int, int>>{
             {2, 2, 1}, {3, 3, 2}, {4, 4, 2}, {4, 6, 1}}) {
      Counterexample ce = gen_sp_not_lr(n, M, K);
      if (should_corrupt("sp-not-in-lr")) corrupt(ce.groups);
      const CertifyResult r = certify(ce, tol);
      if (!r.ok) {
        pass = false;
        detail = ce.name + " failed";
      }
    }
    add("sp-not-in-lr", "n in {2,3,4}, K in {1,2}", pass, detail);
  }
  {
    bool pass = true;
    std::string detail("rank-one line instances");
    for (int N : {3, 4}) {
      Counterexample ce = gen_lr_not_sp(N, mix_seed(seed, 250 + N));
      if (should_corrupt("lr-not-in-sp")) corrupt(ce.groups);
      const CertifyResult r = certify(ce, tol);
      if (!r.ok) {
        pass = false;
        detail = ce.name + " failed";
      }
    }
    add("lr-not-in-sp", "n=2, K=1, N in {3,4}", pass, detail);
  }
  {
    bool pass = true;
    std::string detail;
    RandomStream rng(mix_seed(seed, 26));
    for (int n : {3, 4}) {
      for (int K : {1, 2}) {
        if (K + 1 > n) continue;
        Eigen::MatrixXd D;
        PatchGroups g = random_js_member(n, K + 2, K, 2, rng, &D);
        const bool splr =
            check_membership(g, {ModelKind::SPLR, K}, {D}, tol).member;
        if (!splr) {
          pass = false;
          detail = "JS member rejected by SPLR";
        }
      }
    }
    Counterexample ce = gen_splr_not_js(2);
    if (should_corrupt("js-in-splr-strict")) corrupt(ce.groups);
    const CertifyResult r = certify(ce, tol);
    if (!r.ok) {
      pass = false;
      detail = ce.name + " failed";
    }
    add("js-in-splr-strict", "inclusion n in {3,4}; strictness K=2, n=M=3", pass,
        pass ? "JS proper subset of SPLR" : detail);
  }
  {
    bool pass = true;
    std::string detail("rotated-dictionary instances");
    for (const auto& [n, theta] : std::vector<std::pair<int, double>>{
             {2, M_PI / 4.0}, {3, 1.0}, {4, 2.5}}) {
      Counterexample ce = gen_gs_not_sp(n, theta);
      if (should_corrupt("sp-in-gs-strict")) corrupt(ce.groups);
      const CertifyResult r = certify(ce, tol);
      if (!r.ok) {
        pass = false;
        detail = ce.name + " failed";
      }
    }
    add("sp-in-gs-strict", "n in {2,3,4}, K=1", pass, detail);
  }
}

}  // namespace

std::vector<StatementResult> verify_theorems(std::uint64_t seed,
                                             const std::string& inject_failure) {
  Battery b;
  b.seed = seed;
  b.inject = inject_failure;
  b.run();
  return b.results;
}

void write_statement_csv(const std::vector<StatementResult>& results,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out << "statement,sizes,verdict\n";
  for (const auto& r : results)
    out << r.id << ",\"" << r.sizes << "\"," << (r.pass ? "pass" : "FAIL")
        << "\n";
  if (!out) throw std::runtime_error(path + ": write failure");
}

}  // namespace patchmodels
