#include "patchmodels/projectors.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace patchmodels {

std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::SP: return "sp";
    case ModelKind::GS: return "gs";
    case ModelKind::JS: return "js";
    case ModelKind::GJS: return "gjs";
    case ModelKind::LR: return "lr";
    case ModelKind::SPLR: return "splr";
  }
  return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "sp") return ModelKind::SP;
  if (s == "gs") return ModelKind::GS;
  if (s == "js") return ModelKind::JS;
  if (s == "gjs") return ModelKind::GJS;
  if (s == "lr") return ModelKind::LR;
  if (s == "splr") return ModelKind::SPLR;
  throw std::invalid_argument("unknown model kind '" + s + "'");
}

std::vector<int> top_k_indices(const Eigen::VectorXd& b, int K) {
  const int n = static_cast<int>(b.size());
  if (K < 0 || K > n)
    throw std::invalid_argument("hard_threshold: K out of range");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + K, idx.end(),
                    [&](int a, int c) {
                      const double ma = std::abs(b[a]), mc = std::abs(b[c]);
                      if (ma != mc) return ma > mc;
                      return a < c;
                    });
  idx.resize(static_cast<std::size_t>(K));
  std::sort(idx.begin(), idx.end());
  return idx;
}

SparseCode hard_threshold(const Eigen::VectorXd& b, int K) {
  const std::vector<int> keep = top_k_indices(b, K);
  SparseCode out;
  out.values = Eigen::VectorXd::Zero(b.size());
  for (int i : keep) {
    out.values[i] = b[i];
    if (b[i] != 0.0) out.support.push_back(i);
  }
  return out;
}

std::vector<int> top_k_rows(const Eigen::MatrixXd& B, int K) {
  const int n = static_cast<int>(B.rows());
  if (K < 0 || K > n)
    throw std::invalid_argument("row_threshold: K out of range");
  const Eigen::VectorXd norms = B.rowwise().squaredNorm();
  return top_k_indices(norms, K);
}

Eigen::MatrixXd row_threshold(const Eigen::MatrixXd& B, int K) {
  const std::vector<int> keep = top_k_rows(B, K);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(B.rows(), B.cols());
  for (int r : keep) out.row(r) = B.row(r);
  return out;
}

int l0_inf_norm(const Eigen::MatrixXd& B) {
  constexpr double kTol = 1e-12;
  int count = 0;
  for (int r = 0; r < B.rows(); ++r)
    if (B.row(r).cwiseAbs().maxCoeff() > kTol) ++count;
  return count;
}

LowRankResult lr_project(const Eigen::MatrixXd& Y, int K) {
  const int rmax = static_cast<int>(std::min(Y.rows(), Y.cols()));
  if (K < 1 || K > rmax)
    throw std::invalid_argument("lr_project: K out of range");
  if (!Y.allFinite())
    throw std::runtime_error("lr_project: non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Y, Eigen::ComputeThinU |
                                            Eigen::ComputeThinV);
  LowRankResult res;
  res.basis = svd.matrixU().leftCols(K);
  res.approx = res.basis * svd.singularValues().head(K).asDiagonal() *
               svd.matrixV().leftCols(K).transpose();
  return res;
}

bool rank_leq(const Eigen::MatrixXd& Y, int K, double tol) {
  if (tol <= 0.0) throw std::invalid_argument("rank_leq: tol must be > 0");
  if (K < 0) return Y.norm() == 0.0;
  if (Y.norm() == 0.0) return true;
  const int rmax = static_cast<int>(std::min(Y.rows(), Y.cols()));
  if (K >= rmax) return true;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Y);
  const Eigen::VectorXd& s = svd.singularValues();
  return s[K] <= tol * s[0];
}

// ---------------------------------------------------------------------------
// ProjectorRecord

namespace {

Eigen::MatrixXd apply_sp_like(const Eigen::MatrixXd& D,
                              const std::vector<std::vector<int>>& supports,
                              const Eigen::MatrixXd& Z) {
  Eigen::MatrixXd est = Eigen::MatrixXd::Zero(Z.rows(), Z.cols());
  for (int j = 0; j < Z.cols(); ++j) {
    const auto& S = supports[static_cast<std::size_t>(j)];
    for (int s : S) est.col(j) += D.col(s) * D.col(s).dot(Z.col(j));
  }
  return est;
}

}  // namespace

std::size_t ProjectorRecord::group_count() const {
  switch (node) {
    case Node::Leaf:
      switch (kind) {
        case ModelKind::SP:
        case ModelKind::GS: return col_supports.size();
        case ModelKind::JS: return row_supports.size();
        default: return bases.size();
      }
    case Node::Chain:
    case Node::Blend:
      return parts.empty() ? 0 : parts.front().group_count();
  }
  return 0;
}

Eigen::MatrixXd ProjectorRecord::apply_group(std::size_t g,
                                             const Eigen::MatrixXd& Z) const {
  if (node == Node::Chain) {
    Eigen::MatrixXd cur = Z;
    for (const auto& stage : parts) cur = stage.apply_group(g, cur);
    return cur;
  }
  if (node == Node::Blend) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(Z.rows(), Z.cols());
    for (std::size_t p = 0; p < parts.size(); ++p)
      acc += weights[p] * parts[p].apply_group(g, Z);
    return acc;
  }

  Eigen::MatrixXd work = Z;
  Eigen::RowVectorXd means;
  if (keep_dc) {
    means = Z.colwise().mean();
    work.rowwise() -= means;
  }

  Eigen::MatrixXd est;
  switch (kind) {
    case ModelKind::SP:
      est = apply_sp_like(dict, col_supports[g], work);
      break;
    case ModelKind::GS:
      est = apply_sp_like(group_dicts[g], col_supports[g], work);
      break;
    case ModelKind::JS: {
      Eigen::MatrixXd C = dict.transpose() * work;
      Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(C.rows(), C.cols());
      for (int r : row_supports[g]) masked.row(r) = C.row(r);
      est = dict * masked;
      break;
    }
    default: {  // LR (also covers GJS records, which share the basis form)
      const Eigen::MatrixXd& B = bases[g];
      est = B * (B.transpose() * work);
      break;
    }
  }
  if (keep_dc) est.rowwise() += means;
  return est;
}

PatchGroups ProjectorRecord::apply(const PatchGroups& input) const {
  if (group_count() != input.size())
    throw std::invalid_argument("ProjectorRecord: group count mismatch");
  PatchGroups out(input.size());
  for (std::size_t g = 0; g < input.size(); ++g)
    out[g] = apply_group(g, input[g]);
  return out;
}

ProjectorRecord ProjectorRecord::chain(std::vector<ProjectorRecord> stages) {
  ProjectorRecord rec;
  rec.node = Node::Chain;
  rec.parts = std::move(stages);
  return rec;
}

ProjectorRecord ProjectorRecord::blend(std::vector<ProjectorRecord> parts,
                                       std::vector<double> weights) {
  if (parts.size() != weights.size() || parts.empty())
    throw std::invalid_argument("ProjectorRecord::blend: bad arguments");
  ProjectorRecord rec;
  rec.node = Node::Blend;
  rec.parts = std::move(parts);
  rec.weights = std::move(weights);
  return rec;
}

// ---------------------------------------------------------------------------
// Membership

namespace {

void require_unitary(const Eigen::MatrixXd& D) {
  if (D.rows() != D.cols())
    throw std::invalid_argument("witness dictionary must be square");
  const double dev =
      (D.transpose() * D - Eigen::MatrixXd::Identity(D.cols(), D.cols()))
          .cwiseAbs()
          .maxCoeff();
  if (dev > 1e-8)
    throw std::invalid_argument("witness dictionary is not unitary");
}

// Canonical unit representatives of the distinct lines spanned by the nonzero
// columns. Two columns are on the same line when |cos angle| ~ 1.
std::vector<Eigen::VectorXd> distinct_lines(
    const std::vector<const Eigen::MatrixXd*>& mats, double thr) {
  std::vector<Eigen::VectorXd> lines;
  for (const Eigen::MatrixXd* m : mats) {
    for (int j = 0; j < m->cols(); ++j) {
      const double norm = m->col(j).norm();
      if (norm <= thr) continue;
      Eigen::VectorXd u = m->col(j) / norm;
      bool known = false;
      for (const auto& l : lines) {
        if (std::abs(l.dot(u)) >= 1.0 - thr) {
          known = true;
          break;
        }
      }
      if (!known) lines.push_back(std::move(u));
    }
  }
  return lines;
}

bool lines_pairwise_orthogonal(const std::vector<Eigen::VectorXd>& lines,
                               double thr, double* worst) {
  *worst = 0.0;
  for (std::size_t a = 0; a < lines.size(); ++a) {
    for (std::size_t b = a + 1; b < lines.size(); ++b) {
      const double d = std::abs(lines[a].dot(lines[b]));
      *worst = std::max(*worst, d);
      if (d > thr) return false;
    }
  }
  return true;
}

MembershipCertificate fail_cert(std::string mode, int g, int jc, double val,
                                std::string detail) {
  MembershipCertificate c;
  c.member = false;
  c.mode = std::move(mode);
  c.failing_group = g;
  c.failing_column = jc;
  c.offending_value = val;
  c.detail = std::move(detail);
  return c;
}

MembershipCertificate pass_cert(std::string mode, std::string detail = {}) {
  MembershipCertificate c;
  c.member = true;
  c.mode = std::move(mode);
  c.detail = std::move(detail);
  return c;
}

MembershipCertificate check_rank(const PatchGroups& groups, int K,
                                 double tol) {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (!rank_leq(groups[g], K, tol)) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(groups[g]);
      const double ratio = svd.singularValues()[K] / svd.singularValues()[0];
      return fail_cert("rank", static_cast<int>(g), -1, ratio,
                       "sigma_{K+1}/sigma_1 above tolerance");
    }
  }
  return pass_cert("rank");
}

MembershipCertificate check_sparse_witness(const PatchGroups& groups,
                                           ModelKind kind, int K,
                                           const std::vector<Eigen::MatrixXd>& W,
                                           double tol) {
  const bool per_group = kind == ModelKind::GS;
  if (per_group) {
    if (W.size() != 1 && W.size() != groups.size())
      throw std::invalid_argument(
          "GS witness must hold one shared or one per-group dictionary");
  } else if (W.size() != 1) {
    throw std::invalid_argument("SP/JS witness must hold exactly one dictionary");
  }
  for (const auto& D : W) require_unitary(D);

  for (std::size_t g = 0; g < groups.size(); ++g) {
    const Eigen::MatrixXd& D =
        (per_group && W.size() > 1) ? W[g] : W.front();
    const Eigen::MatrixXd C = D.transpose() * groups[g];
    if (kind == ModelKind::JS) {
      const double scale = C.norm();
      int rows = 0;
      for (int r = 0; r < C.rows(); ++r)
        if (C.row(r).norm() > tol * std::max(scale, 1e-300)) ++rows;
      if (rows > K)
        return fail_cert("witness", static_cast<int>(g), -1,
                         static_cast<double>(rows),
                         "code has more than K nonzero rows");
    } else {
      for (int j = 0; j < C.cols(); ++j) {
        const double scale = C.col(j).norm();
        int nnz = 0;
        for (int i = 0; i < C.rows(); ++i)
          if (std::abs(C(i, j)) > tol * std::max(scale, 1e-300)) ++nnz;
        if (nnz > K)
          return fail_cert("witness", static_cast<int>(g), j,
                           static_cast<double>(nnz),
                           "code column has more than K nonzeros");
      }
    }
  }
  return pass_cert("witness");
}

// Exact decision for K = 1: every patch must be a multiple of some atom of a
// unitary dictionary, so the patch direction lines must be pairwise
// orthogonal (per group for GS; one line per group, orthogonal across groups,
// for JS).
MembershipCertificate check_brute_k1(const PatchGroups& groups, ModelKind kind,
                                     double tol) {
  const double thr = std::max(tol, 1e-12);
  double worst = 0.0;
  switch (kind) {
    case ModelKind::SP: {
      std::vector<const Eigen::MatrixXd*> all;
      for (const auto& Y : groups) all.push_back(&Y);
      const auto lines = distinct_lines(all, thr);
      if (lines_pairwise_orthogonal(lines, thr, &worst))
        return pass_cert("bruteforce-k1",
                         std::to_string(lines.size()) + " direction line(s)");
      return fail_cert("bruteforce-k1", -1, -1, worst,
                       "non-orthogonal patch direction lines");
    }
    case ModelKind::GS: {
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto lines = distinct_lines({&groups[g]}, thr);
        if (!lines_pairwise_orthogonal(lines, thr, &worst))
          return fail_cert("bruteforce-k1", static_cast<int>(g), -1, worst,
                           "non-orthogonal direction lines within group");
      }
      return pass_cert("bruteforce-k1");
    }
    case ModelKind::JS: {
      std::vector<Eigen::VectorXd> group_lines;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        const auto lines = distinct_lines({&groups[g]}, thr);
        if (lines.size() > 1)
          return fail_cert("bruteforce-k1", static_cast<int>(g), -1,
                           static_cast<double>(lines.size()),
                           "group spans more than one direction line");
        if (!lines.empty()) group_lines.push_back(lines.front());
      }
      std::vector<Eigen::VectorXd> dedup;
      for (auto& l : group_lines) {
        bool known = false;
        for (const auto& d : dedup)
          if (std::abs(d.dot(l)) >= 1.0 - thr) known = true;
        if (!known) dedup.push_back(l);
      }
      if (lines_pairwise_orthogonal(dedup, thr, &worst))
        return pass_cert("bruteforce-k1");
      return fail_cert("bruteforce-k1", -1, -1, worst,
                       "group direction lines not pairwise orthogonal");
    }
    default:
      throw std::invalid_argument("brute-force mode applies to SP/GS/JS only");
  }
}

}  // namespace

MembershipCertificate check_membership(
    const PatchGroups& groups, ModelSpec spec,
    const std::vector<Eigen::MatrixXd>& witness, double tol,
    bool brute_force) {
  if (groups.empty())
    throw std::invalid_argument("check_membership: no groups");
  const int n = static_cast<int>(groups.front().rows());
  int min_m = static_cast<int>(groups.front().cols());
  for (const auto& Y : groups) {
    if (Y.rows() != n)
      throw std::invalid_argument("check_membership: inconsistent patch size");
    min_m = std::min(min_m, static_cast<int>(Y.cols()));
  }
  if (spec.K < 1 || spec.K >= std::min(n, min_m))
    throw std::invalid_argument(
        "check_membership: requires 1 <= K < min(n, M_i)");

  switch (spec.kind) {
    case ModelKind::LR:
    case ModelKind::GJS:
      // identical sets: group-wise joint sparsity is exactly rank <= K
      return check_rank(groups, spec.K, tol);
    case ModelKind::SPLR: {
      MembershipCertificate lr = check_rank(groups, spec.K, tol);
      if (!lr.member) return lr;
      MembershipCertificate sp = check_membership(
          groups, {ModelKind::SP, spec.K}, witness, tol, brute_force);
      sp.mode = "rank+" + sp.mode;
      return sp;
    }
    case ModelKind::SP:
    case ModelKind::GS:
    case ModelKind::JS:
      if (!witness.empty())
        return check_sparse_witness(groups, spec.kind, spec.K, witness, tol);
      if (!brute_force)
        throw std::invalid_argument(
            "check_membership: witness required outside brute-force mode");
      if (spec.K != 1 || n > 4)
        throw std::invalid_argument(
            "check_membership: brute-force mode requires K = 1 and n <= 4");
      return check_brute_k1(groups, spec.kind, tol);
  }
  throw std::logic_error("unreachable");
}

}  // namespace patchmodels
