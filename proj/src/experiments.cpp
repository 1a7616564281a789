#include "patchmodels/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "patchmodels/random.hpp"

namespace patchmodels {

std::string fmt_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Prepared {
  std::vector<GroupingPlan> plans;  // one per image
  PatchGroups clean;
  PatchGroups noise;
  PatchGroups noisy;
  double clean_energy = 0.0;
  double noise_energy = 0.0;
};

std::vector<PatchRef> sample_refs(const Image& img, int patch_side, int count,
                                  std::uint64_t seed) {
  std::vector<PatchRef> all = patch_grid(img.height, img.width, patch_side, 1);
  if (count >= static_cast<int>(all.size())) return all;
  RandomStream rng(seed);
  for (int i = 0; i < count; ++i) {
    const std::size_t j =
        i + static_cast<std::size_t>(rng.below(all.size() - i));
    std::swap(all[static_cast<std::size_t>(i)], all[j]);
  }
  all.resize(static_cast<std::size_t>(count));
  return all;
}

// Groups come from block matching the clean images; noise is then drawn per
// group, so a patch shared by two groups receives independent noise in each.
Prepared prepare_sweep_data(const std::vector<Image>& images,
                            const SweepConfig& cfg) {
  Prepared out;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const auto refs = sample_refs(images[i], cfg.patch_side,
                                  cfg.refs_per_image,
                                  mix_seed(cfg.seed, 0x5a3fULL + i));
    GroupingPlan plan = block_match(images[i], refs, cfg.patch_side,
                                    cfg.window, cfg.match_m);
    PatchGroups g = group(images[i], plan);
    out.plans.push_back(std::move(plan));
    for (auto& Y : g) out.clean.push_back(std::move(Y));
  }
  out.noise.resize(out.clean.size());
  out.noisy.resize(out.clean.size());
  for (std::size_t g = 0; g < out.clean.size(); ++g) {
    RandomStream rng(mix_seed(cfg.seed ^ 0x6e015eedULL, g));
    Eigen::MatrixXd phi(out.clean[g].rows(), out.clean[g].cols());
    for (int j = 0; j < phi.cols(); ++j)
      for (int i = 0; i < phi.rows(); ++i) phi(i, j) = rng.gauss();
    out.noise[g] = cfg.sigma * phi;
    out.noisy[g] = out.clean[g] + out.noise[g];
  }
  out.clean_energy = total_energy(out.clean);
  out.noise_energy = total_energy(out.noise);
  return out;
}

Eigen::MatrixXd concat_columns(const PatchGroups& groups) {
  if (groups.empty()) throw std::invalid_argument("no groups");
  Eigen::Index cols = 0;
  for (const auto& Y : groups) cols += Y.cols();
  Eigen::MatrixXd Z(groups.front().rows(), cols);
  Eigen::Index at = 0;
  for (const auto& Y : groups) {
    Z.middleCols(at, Y.cols()) = Y;
    at += Y.cols();
  }
  return Z;
}

// Trained per-model denoisers over the training-regime groups.
struct TrainedModel {
  ModelKind kind;
  Denoiser denoiser;
};

TrainedModel train_model(ModelKind kind, const PatchGroups& training, int K,
                         const SweepConfig& cfg) {
  LearnConfig lc;
  lc.K = K;
  lc.iters = cfg.iters;
  lc.init = cfg.init;
  lc.seed = cfg.seed;
  const bool dc = cfg.remove_dc;
  switch (kind) {
    case ModelKind::SP: {
      auto res = learn_sp(concat_columns(training), lc);
      UnitaryDictionary D = std::move(res.dict);
      return {kind, [D, K, dc](const PatchGroups& g) {
                return denoise_sp(g, D, K, dc);
              }};
    }
    case ModelKind::GS: {
      auto res = learn_gs(training, lc);
      std::vector<UnitaryDictionary> dicts = std::move(res.dicts);
      return {kind, [dicts, K, dc](const PatchGroups& g) {
                return denoise_gs(g, dicts, K, dc);
              }};
    }
    case ModelKind::JS: {
      auto res = learn_js(training, lc);
      UnitaryDictionary D = std::move(res.dict);
      return {kind, [D, K, dc](const PatchGroups& g) {
                return denoise_js(g, D, K, dc);
              }};
    }
    case ModelKind::GJS:  // same projector as LR
    case ModelKind::LR:
      return {kind, [K, dc](const PatchGroups& g) {
                return denoise_lr(g, K, dc);
              }};
    case ModelKind::SPLR:
      throw std::invalid_argument(
          "splr has no single projection denoiser; combine sp and lr instead");
  }
  throw std::logic_error("unreachable");
}

struct Scored {
  SweepRow row;
  PatchGroups estimate;
  ProjectorRecord record;
  double replay_residual = 0.0;
};

Scored score(const std::string& name, int K, const Prepared& data,
             const ProjectorRecord& record, const PatchGroups& estimate,
             double sigma) {
  Scored out;
  out.row.model = name;
  out.row.K = K;
  out.row.sigma = sigma;
  const DecomposedError d = decompose(record, data.clean, data.noise);
  out.row.alpha = d.modeling_error / data.clean_energy;
  if (data.noise_energy > 0.0) {
    out.row.beta = d.survived_noise / data.noise_energy;
    out.row.snr_in = data.clean_energy / data.noise_energy;
  } else {
    out.row.beta = 0.0;
    out.row.snr_in = kInf;
  }
  out.row.snr_out = snr_out(out.row.alpha, out.row.beta, out.row.snr_in);
  out.row.psnr_db =
      psnr_from_sse(sse(estimate, data.clean), entry_count(data.clean));

  // replay additivity: P u + P e against the delivered estimate
  double num = 0.0;
  for (std::size_t g = 0; g < data.clean.size(); ++g) {
    const Eigen::MatrixXd add = record.apply_group(g, data.clean[g]) +
                                record.apply_group(g, data.noise[g]);
    num += (add - estimate[g]).squaredNorm();
  }
  const double den = std::max(total_energy(estimate), 1e-300);
  out.replay_residual = std::sqrt(num / den);
  out.estimate = estimate;
  out.record = record;
  return out;
}

}  // namespace

SweepOutcome run_sweep_on_images(const std::vector<Image>& images,
                                 const SweepConfig& cfg) {
  if (images.empty()) throw std::invalid_argument("sweep: no input images");
  if (cfg.models.empty()) throw std::invalid_argument("sweep: no models");
  if (cfg.ks.empty()) throw std::invalid_argument("sweep: no K values");
  if (cfg.combine != CombineMode::none && cfg.models.size() != 2)
    throw std::invalid_argument("sweep: combining requires exactly two models");

  const Prepared data = prepare_sweep_data(images, cfg);
  SweepOutcome out;

  for (int K : cfg.ks) {
    const PatchGroups& regime = cfg.oracle ? data.clean : data.noisy;
    std::vector<TrainedModel> trained;
    trained.reserve(cfg.models.size());
    for (ModelKind kind : cfg.models)
      trained.push_back(train_model(kind, regime, K, cfg));

    std::vector<Scored> singles;
    for (const TrainedModel& tm : trained) {
      DenoiseResult dr = tm.denoiser(regime);
      PatchGroups est =
          cfg.oracle ? dr.record.apply(data.noisy) : std::move(dr.estimate);
      singles.push_back(score(to_string(tm.kind), K, data, dr.record, est,
                              cfg.sigma));
    }

    if (cfg.combine == CombineMode::alt) {
      std::vector<Denoiser> fns;
      for (const TrainedModel& tm : trained) fns.push_back(tm.denoiser);
      DenoiseResult dr = alternating_projection(regime, fns, cfg.alt_rounds);
      PatchGroups est =
          cfg.oracle ? dr.record.apply(data.noisy) : std::move(dr.estimate);
      const std::string name = "alt:" + to_string(cfg.models[0]) + "+" +
                               to_string(cfg.models[1]) +
                               ":t=" + std::to_string(cfg.alt_rounds);
      singles.push_back(score(name, K, data, dr.record, est, cfg.sigma));
    } else if (cfg.combine == CombineMode::convex) {
      double mu = cfg.mu;
      if (cfg.mu_search) {
        double best_err = kInf;
        const int steps = static_cast<int>(std::round(1.0 / cfg.grid));
        for (int s = 0; s <= steps; ++s) {
          const double cand = static_cast<double>(s) / steps;
          double err = 0.0;
          for (std::size_t g = 0; g < data.clean.size(); ++g)
            err += (cand * singles[0].estimate[g] +
                    (1.0 - cand) * singles[1].estimate[g] - data.clean[g])
                       .squaredNorm();
          if (err < best_err) {
            best_err = err;
            mu = cand;
          }
        }
      }
      PatchGroups est = convex_combine(
          {singles[0].estimate, singles[1].estimate}, {mu, 1.0 - mu});
      const std::string name = "convex:" + to_string(cfg.models[0]) + "+" +
                               to_string(cfg.models[1]) +
                               ":mu=" + fmt_double(mu);
      ProjectorRecord rec = ProjectorRecord::blend(
          {singles[0].record, singles[1].record}, {mu, 1.0 - mu});
      singles.push_back(score(name, K, data, rec, est, cfg.sigma));
    }

    for (Scored& s : singles) {
      out.max_replay_residual =
          std::max(out.max_replay_residual, s.replay_residual);
      out.rows.push_back(std::move(s.row));
    }
  }

  if (!cfg.out_csv.empty()) {
    std::ofstream f(cfg.out_csv);
    if (!f) throw std::runtime_error(cfg.out_csv + ": cannot open for writing");
    f << sweep_csv(out.rows);
    if (!f) throw std::runtime_error(cfg.out_csv + ": write failure");
  }
  if (!cfg.out_plan.empty()) {
    for (std::size_t i = 0; i < data.plans.size(); ++i) {
      const std::string path =
          data.plans.size() == 1
              ? cfg.out_plan
              : cfg.out_plan + ".img" + std::to_string(i);
      save_plan(data.plans[i], path);
    }
  }
  return out;
}

SweepOutcome run_sweep(const SweepConfig& cfg) {
  std::vector<Image> images;
  images.reserve(cfg.image_paths.size());
  for (const auto& p : cfg.image_paths) images.push_back(load_pgm(p));
  return run_sweep_on_images(images, cfg);
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream os;
  os << "model,K,sigma,alpha,beta,snr_in,snr_out,psnr_db\n";
  for (const auto& r : rows) {
    os << r.model << ',' << r.K << ',' << fmt_double(r.sigma) << ','
       << fmt_double(r.alpha) << ',' << fmt_double(r.beta) << ','
       << fmt_double(r.snr_in) << ',' << fmt_double(r.snr_out) << ','
       << fmt_double(r.psnr_db) << '\n';
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Image denoising command

DenoiseOutcome run_denoise_on_image(const Image& clean,
                                    const DenoiseCmdConfig& cfg) {
  if (cfg.models.empty()) throw std::invalid_argument("denoise: no models");
  if (cfg.combine != CombineMode::none && cfg.models.size() != 2)
    throw std::invalid_argument("denoise: combining requires exactly two models");

  const Image noisy = add_noise(clean, {cfg.sigma, cfg.seed});
  const auto refs =
      patch_grid(noisy.height, noisy.width, cfg.patch_side, cfg.stride);
  const GroupingPlan plan =
      block_match(noisy, refs, cfg.patch_side, cfg.window, cfg.match_m);
  const PatchGroups noisy_groups = group(noisy, plan);

  SweepConfig train_cfg;  // reuse the learning knobs
  train_cfg.iters = cfg.iters;
  train_cfg.init = cfg.init;
  train_cfg.seed = cfg.seed;
  train_cfg.remove_dc = cfg.remove_dc;

  DenoiseOutcome out;
  out.noisy_psnr_db = psnr(clean, noisy);

  std::vector<Image> single_images;
  std::vector<TrainedModel> trained;
  for (ModelKind kind : cfg.models)
    trained.push_back(train_model(kind, noisy_groups, cfg.K, train_cfg));
  for (const TrainedModel& tm : trained) {
    DenoiseResult dr = tm.denoiser(noisy_groups);
    Image est = aggregate(plan, dr.estimate, noisy.height, noisy.width);
    out.entries.push_back({to_string(tm.kind), psnr(clean, est), est});
    single_images.push_back(std::move(est));
  }

  if (cfg.combine == CombineMode::alt) {
    std::vector<Denoiser> fns;
    for (const TrainedModel& tm : trained) fns.push_back(tm.denoiser);
    DenoiseResult dr = alternating_projection(noisy_groups, fns, cfg.alt_rounds);
    Image est = aggregate(plan, dr.estimate, noisy.height, noisy.width);
    const std::string name = "alt:" + to_string(cfg.models[0]) + "+" +
                             to_string(cfg.models[1]) +
                             ":t=" + std::to_string(cfg.alt_rounds);
    out.entries.push_back({name, psnr(clean, est), std::move(est)});
  } else if (cfg.combine == CombineMode::convex) {
    double mu = cfg.mu;
    if (cfg.mu_search) {
      auto [img, best] = fuse_image_p1_line_search(
          noisy, single_images[0], single_images[1], 0.0, cfg.grid, clean);
      mu = best;
      const std::string name = "convex:" + to_string(cfg.models[0]) + "+" +
                               to_string(cfg.models[1]) +
                               ":mu=" + fmt_double(mu);
      out.entries.push_back({name, psnr(clean, img), std::move(img)});
    } else {
      Image img =
          convex_combine(std::vector<Image>{single_images[0], single_images[1]},
                         {mu, 1.0 - mu});
      const std::string name = "convex:" + to_string(cfg.models[0]) + "+" +
                               to_string(cfg.models[1]) +
                               ":mu=" + fmt_double(mu);
      out.entries.push_back({name, psnr(clean, img), std::move(img)});
    }
  }

  if (!cfg.out_dir.empty()) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    save_pgm(noisy, cfg.out_dir + "/noisy.pgm");
    std::ofstream report(cfg.out_dir + "/report.csv");
    report << "name,K,sigma,psnr_db\n";
    report << "noisy," << cfg.K << ',' << fmt_double(cfg.sigma) << ','
           << fmt_double(out.noisy_psnr_db) << '\n';
    for (const auto& e : out.entries) {
      std::string fname = e.name;
      std::replace(fname.begin(), fname.end(), ':', '_');
      save_pgm(e.estimate, cfg.out_dir + "/" + fname + ".pgm");
      report << e.name << ',' << cfg.K << ',' << fmt_double(cfg.sigma) << ','
             << fmt_double(e.psnr_db) << '\n';
    }
    save_plan(plan, cfg.out_dir + "/plan.txt");
  }
  return out;
}

DenoiseOutcome run_denoise(const DenoiseCmdConfig& cfg) {
  return run_denoise_on_image(load_pgm(cfg.image_path), cfg);
}

// ---------------------------------------------------------------------------
// Fusion command

FuseOutcome run_fuse(const FuseCmdConfig& cfg) {
  const Image y = load_pgm(cfg.noisy_path);
  const Image a = load_pgm(cfg.a_path);
  const Image b = load_pgm(cfg.b_path);

  FuseOutcome out;
  if (!cfg.reference_path.empty()) {
    const Image ref = load_pgm(cfg.reference_path);
    out.have_reference = true;
    out.psnr_a = psnr(ref, a);
    out.psnr_b = psnr(ref, b);
    out.psnr_noisy = psnr(ref, y);
    if (cfg.mu_search) {
      auto [img, mu] =
          fuse_image_p1_line_search(y, a, b, cfg.lambda_f, cfg.grid, ref);
      out.fused = std::move(img);
      out.mu_used = mu;
    } else {
      FusionSpec spec;
      spec.mu = cfg.mu;
      spec.lambda_f = cfg.lambda_f;
      out.fused = fuse_image_p1(y, a, b, spec);
      out.mu_used = cfg.mu;
    }
    out.psnr_fused = psnr(ref, out.fused);
  } else {
    if (cfg.mu_search)
      throw std::invalid_argument("fuse: line search requires a reference image");
    FusionSpec spec;
    spec.mu = cfg.mu;
    spec.lambda_f = cfg.lambda_f;
    out.fused = fuse_image_p1(y, a, b, spec);
    out.mu_used = cfg.mu;
  }
  if (!cfg.out_path.empty()) save_pgm(out.fused, cfg.out_path);
  return out;
}

}  // namespace patchmodels
