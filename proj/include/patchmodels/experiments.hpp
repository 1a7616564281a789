#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "patchmodels/denoising.hpp"
#include "patchmodels/image.hpp"
#include "patchmodels/learning.hpp"
#include "patchmodels/metrics.hpp"

namespace patchmodels {

enum class CombineMode { none, alt, convex };

// Patch-group denoising study: sample reference patches, block-match, train
// on clean (oracle) or noisy data, denoise, and report alpha / beta / SNR per
// (model, K).
struct SweepConfig {
  std::vector<std::string> image_paths;
  std::vector<ModelKind> models;
  std::vector<int> ks;
  double sigma = 20.0;
  std::uint64_t seed = 0;
  bool oracle = false;
  int patch_side = 8;
  int window = 50;
  int match_m = 64;
  int refs_per_image = 1000;
  int iters = 20;
  LearnInit init = LearnInit::identity;
  bool remove_dc = false;
  CombineMode combine = CombineMode::none;  // requires exactly two models
  double mu = 0.5;
  bool mu_search = false;  // line-search mu against the clean reference
  int alt_rounds = 10;
  double grid = 0.1;
  std::string out_csv;   // written when non-empty
  std::string out_plan;  // grouping plan dump, written when non-empty
};

struct SweepRow {
  std::string model;
  int K = 0;
  double sigma = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double snr_in = 0.0;
  double snr_out = 0.0;
  double psnr_db = 0.0;
};

struct SweepOutcome {
  std::vector<SweepRow> rows;
  double max_replay_residual = 0.0;  // worst relative replay additivity gap
};

SweepOutcome run_sweep(const SweepConfig& cfg);
SweepOutcome run_sweep_on_images(const std::vector<Image>& images,
                                 const SweepConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Full image denoising: noise the input, block-match the noisy image, learn
// on the noisy groups, denoise, aggregate, and score against the clean input.
struct DenoiseCmdConfig {
  std::string image_path;
  std::vector<ModelKind> models;
  int K = 10;
  double sigma = 20.0;
  std::uint64_t seed = 0;
  int patch_side = 8;
  int window = 50;
  int match_m = 64;
  int stride = 8;  // reference grid stride
  int iters = 20;
  LearnInit init = LearnInit::identity;
  bool remove_dc = false;
  CombineMode combine = CombineMode::none;
  double mu = 0.5;
  bool mu_search = false;
  int alt_rounds = 10;
  double grid = 0.1;
  std::string out_dir;  // PGM and CSV artifacts land here when non-empty
};

struct DenoiseOutcome {
  struct Entry {
    std::string name;
    double psnr_db = 0.0;
    Image estimate;
  };
  double noisy_psnr_db = 0.0;
  std::vector<Entry> entries;
};

DenoiseOutcome run_denoise(const DenoiseCmdConfig& cfg);
DenoiseOutcome run_denoise_on_image(const Image& clean,
                                    const DenoiseCmdConfig& cfg);

// Image-level fusion of two externally produced estimates.
struct FuseCmdConfig {
  std::string noisy_path;
  std::string a_path;
  std::string b_path;
  std::string reference_path;  // optional; required for line search
  double mu = 0.5;
  bool mu_search = false;
  double lambda_f = 0.01;
  double grid = 0.1;
  std::string out_path;  // fused PGM, written when non-empty
};

struct FuseOutcome {
  Image fused;
  double mu_used = 0.0;
  bool have_reference = false;
  double psnr_a = 0.0, psnr_b = 0.0, psnr_fused = 0.0, psnr_noisy = 0.0;
};

FuseOutcome run_fuse(const FuseCmdConfig& cfg);

// Shortest round-trip decimal form; used for all CSV output so identical
// runs produce identical bytes.
std::string fmt_double(double v);

}  // namespace patchmodels
