#include "patchmodels/metrics.hpp"

#include <cmath>
#include <limits>

namespace patchmodels {

double total_energy(const PatchGroups& groups) {
  double e = 0.0;
  for (const auto& Y : groups) e += Y.squaredNorm();
  return e;
}

double sse(const PatchGroups& a, const PatchGroups& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sse: size mismatch");
  double e = 0.0;
  for (std::size_t g = 0; g < a.size(); ++g) e += (a[g] - b[g]).squaredNorm();
  return e;
}

std::int64_t entry_count(const PatchGroups& groups) {
  std::int64_t n = 0;
  for (const auto& Y : groups) n += Y.size();
  return n;
}

DecomposedError decompose(const ProjectorRecord& record,
                          const PatchGroups& clean, const PatchGroups& noise) {
  if (clean.size() != noise.size() || clean.size() != record.group_count())
    throw std::invalid_argument("decompose: group count mismatch");
  DecomposedError out;
  for (std::size_t g = 0; g < clean.size(); ++g) {
    if (clean[g].rows() != noise[g].rows() || clean[g].cols() != noise[g].cols())
      throw std::invalid_argument("decompose: group shape mismatch");
    const Eigen::MatrixXd pu = record.apply_group(g, clean[g]);
    const Eigen::MatrixXd pe = record.apply_group(g, noise[g]);
    const Eigen::MatrixXd miss = pu - clean[g];
    out.modeling_error += miss.squaredNorm();
    out.survived_noise += pe.squaredNorm();
    out.cross_term += (miss.array() * pe.array()).sum();
  }
  return out;
}

std::pair<double, double> alpha_beta(const DecomposedError& d,
                                     double clean_energy, double noise_energy) {
  if (clean_energy <= 0.0)
    throw std::invalid_argument("alpha_beta: clean energy must be > 0");
  if (noise_energy <= 0.0)
    throw std::invalid_argument("alpha_beta: noise energy must be > 0");
  return {d.modeling_error / clean_energy, d.survived_noise / noise_energy};
}

double snr_out(double alpha, double beta, double snr_in) {
  if (snr_in <= 0.0) throw std::invalid_argument("snr_out: snr_in must be > 0");
  const double denom = alpha + beta / snr_in;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / denom;
}

double psnr_from_sse(double sse_value, std::int64_t count, double peak) {
  if (count < 1) throw std::invalid_argument("psnr: empty data");
  if (sse_value == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak * static_cast<double>(count) / sse_value);
}

double psnr(const Image& reference, const Image& estimate, double peak) {
  if (reference.height != estimate.height || reference.width != estimate.width)
    throw std::invalid_argument("psnr: image dimension mismatch");
  double e = 0.0;
  for (std::size_t p = 0; p < reference.pixels.size(); ++p) {
    const double d = reference.pixels[p] - estimate.pixels[p];
    e += d * d;
  }
  return psnr_from_sse(e, static_cast<std::int64_t>(reference.pixels.size()),
                       peak);
}

double improvement_bound(double mu, double gamma) {
  if (mu <= 0.0 || mu >= 1.0)
    throw std::invalid_argument("improvement_bound: mu must be in (0, 1)");
  if (gamma < 0.0)
    throw std::invalid_argument("improvement_bound: gamma must be >= 0");
  return 1.0 - (2.0 + (1.0 - mu) * gamma) * gamma / (2.0 * mu * (1.0 + gamma));
}

ImprovementCheck check_improvement_condition(const Eigen::VectorXd& e_a,
                                             const Eigen::VectorXd& e_b,
                                             double mu) {
  if (mu <= 0.0 || mu >= 1.0)
    throw std::invalid_argument("check_improvement_condition: mu not in (0, 1)");
  if (e_a.size() != e_b.size())
    throw std::invalid_argument("check_improvement_condition: size mismatch");

  ImprovementCheck out;
  Eigen::VectorXd a = e_a;
  Eigen::VectorXd b = e_b;
  double w = mu;
  if (a.norm() > b.norm()) {
    std::swap(a, b);
    w = 1.0 - mu;
    out.swapped = true;
  }
  const double gam = a.norm();      // the smaller error magnitude
  const double gam_b = b.norm();
  if (gam == 0.0) {
    out.degenerate = true;
    return out;
  }
  out.gamma = (gam_b - gam) / gam;
  out.cos_theta = a.dot(b) / (gam * gam_b);
  out.holds = (w * a + (1.0 - w) * b).norm() < gam;
  out.bound_verdict = out.cos_theta < improvement_bound(w, out.gamma);
  return out;
}

}  // namespace patchmodels
