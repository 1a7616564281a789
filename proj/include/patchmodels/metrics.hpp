#pragma once

#include <Eigen/Dense>

#include "patchmodels/image.hpp"
#include "patchmodels/patching.hpp"
#include "patchmodels/projectors.hpp"

namespace patchmodels {

// Split of the reconstruction error into the part caused by the model and the
// part of the input noise that passed through the projector. cross_term is
// the inner product <Pu - u, Pe>, which vanishes for orthogonal projectors;
// it is reported rather than assumed zero because data-adaptive records
// trained on noisy data need not be exactly orthogonal to the residual.
struct DecomposedError {
  double modeling_error = 0.0;   // sum ||P u - u||^2
  double survived_noise = 0.0;   // sum ||P e||^2
  double cross_term = 0.0;
};

struct Report {
  double alpha = 0.0;    // modeling error / clean energy
  double beta = 0.0;     // survived noise / input noise energy
  double snr_in = 0.0;   // plain ratio, not dB
  double snr_out = 0.0;
  double psnr_db = 0.0;
};

// Applies the recorded linear projector separately to the clean signal and
// the noise; clean + noise must be the input the record was captured from.
DecomposedError decompose(const ProjectorRecord& record,
                          const PatchGroups& clean, const PatchGroups& noise);

// alpha = modeling_error / clean_energy, beta = survived_noise / noise_energy.
std::pair<double, double> alpha_beta(const DecomposedError& d,
                                     double clean_energy, double noise_energy);

// 1 / (alpha + beta / snr_in); +infinity when alpha = beta = 0.
double snr_out(double alpha, double beta, double snr_in);

// 10 log10(peak^2 p / ||ref - est||^2); +infinity for an exact match.
double psnr(const Image& reference, const Image& estimate, double peak = 255.0);
double psnr_from_sse(double sse, std::int64_t count, double peak = 255.0);

// Largest cos(angle) between the two single-model error vectors for which the
// convex combination with weight mu still shrinks the smaller error:
//   1 - [2 + (1 - mu) gamma] gamma / (2 mu (1 + gamma)),
// where gamma is the normalized magnitude gap between the errors.
double improvement_bound(double mu, double gamma);

struct ImprovementCheck {
  bool holds = false;          // direct verdict: combined error < min error
  bool bound_verdict = false;  // cos theta below improvement_bound
  double cos_theta = 0.0;
  double gamma = 0.0;
  bool degenerate = false;     // the smaller error is zero
  bool swapped = false;        // inputs were reordered so ||e_A|| <= ||e_B||
};

// Evaluates the combination-improvement inequality directly and through the
// correlation bound; outside the degenerate case the two verdicts agree.
ImprovementCheck check_improvement_condition(const Eigen::VectorXd& e_a,
                                             const Eigen::VectorXd& e_b,
                                             double mu);

double total_energy(const PatchGroups& groups);
double sse(const PatchGroups& a, const PatchGroups& b);
std::int64_t entry_count(const PatchGroups& groups);

}  // namespace patchmodels
