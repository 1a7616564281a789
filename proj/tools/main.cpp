#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "patchmodels/experiments.hpp"
#include "patchmodels/settheory.hpp"

namespace {

using namespace patchmodels;

// K values: "10", "8,16,32", or start:step:stop like "4:4:32".
std::vector<int> parse_k_range(const std::string& s) {
  std::vector<int> ks;
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const auto colon2 = s.find(':', colon + 1);
    if (colon2 == std::string::npos)
      throw CLI::ValidationError("--k", "range must be start:step:stop");
    const int start = std::stoi(s.substr(0, colon));
    const int step = std::stoi(s.substr(colon + 1, colon2 - colon - 1));
    const int stop = std::stoi(s.substr(colon2 + 1));
    if (step < 1) throw CLI::ValidationError("--k", "step must be >= 1");
    for (int k = start; k <= stop; k += step) ks.push_back(k);
  } else {
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) ks.push_back(std::stoi(tok));
  }
  if (ks.empty()) throw CLI::ValidationError("--k", "no K values given");
  return ks;
}

std::vector<ModelKind> parse_models(const std::vector<std::string>& names) {
  std::vector<ModelKind> kinds;
  for (const auto& n : names) kinds.push_back(model_kind_from_string(n));
  return kinds;
}

CombineMode parse_combine(const std::string& s) {
  if (s == "none") return CombineMode::none;
  if (s == "alt") return CombineMode::alt;
  if (s == "convex") return CombineMode::convex;
  throw CLI::ValidationError("--combine", "must be none, alt or convex");
}

LearnInit parse_init(const std::string& s) {
  if (s == "identity") return LearnInit::identity;
  if (s == "dct") return LearnInit::dct_like;
  if (s == "random") return LearnInit::seeded_random_orthonormal;
  throw CLI::ValidationError("--init", "must be identity, dct or random");
}

int cmd_sweep(const SweepConfig& cfg) {
  SweepOutcome out = run_sweep(cfg);
  std::cout << sweep_csv(out.rows);
  std::cerr << "# max replay additivity residual: "
            << fmt_double(out.max_replay_residual) << "\n";
  return 0;
}

int cmd_denoise(const DenoiseCmdConfig& cfg) {
  DenoiseOutcome out = run_denoise(cfg);
  std::cout << "name,K,sigma,psnr_db\n";
  std::cout << "noisy," << cfg.K << ',' << fmt_double(cfg.sigma) << ','
            << fmt_double(out.noisy_psnr_db) << '\n';
  for (const auto& e : out.entries)
    std::cout << e.name << ',' << cfg.K << ',' << fmt_double(cfg.sigma) << ','
              << fmt_double(e.psnr_db) << '\n';
  return 0;
}

int cmd_fuse(const FuseCmdConfig& cfg) {
  FuseOutcome out = run_fuse(cfg);
  std::cout << "input,psnr_db\n";
  if (out.have_reference) {
    std::cout << "noisy," << fmt_double(out.psnr_noisy) << '\n';
    std::cout << "estimate_a," << fmt_double(out.psnr_a) << '\n';
    std::cout << "estimate_b," << fmt_double(out.psnr_b) << '\n';
    std::cout << "fused(mu=" << fmt_double(out.mu_used) << "),"
              << fmt_double(out.psnr_fused) << '\n';
  } else {
    std::cout << "fused(mu=" << fmt_double(out.mu_used) << "),n/a\n";
  }
  return 0;
}

int cmd_verify(std::uint64_t seed, const std::string& out_csv,
               const std::string& inject) {
  const auto results = verify_theorems(seed, inject);
  if (!out_csv.empty()) write_statement_csv(results, out_csv);
  bool all = true;
  for (const auto& r : results) {
    std::cout << (r.pass ? "pass  " : "FAIL  ") << r.id << "  [" << r.sizes
              << "]  " << r.detail << "\n";
    all = all && r.pass;
  }
  if (!all) {
    for (const auto& r : results)
      if (!r.pass) std::cerr << "verification failed: " << r.id << "\n";
    return 3;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"patchmodels: patch-based image model study and denoising"};
  app.require_subcommand(1);

  // ---- sweep ----
  SweepConfig sweep;
  std::vector<std::string> sweep_models{"sp", "gs", "js", "lr"};
  std::string sweep_k = "10";
  std::string sweep_combine = "none";
  std::string sweep_init = "identity";
  std::string sweep_outdir;
  auto* s = app.add_subcommand(
      "sweep", "patch-group denoising metrics per (model, K); CSV columns "
               "model,K,sigma,alpha,beta,snr_in,snr_out,psnr_db");
  s->add_option("images", sweep.image_paths, "input PGM images")->required();
  s->add_option("--model", sweep_models, "models: sp gs js gjs lr");
  s->add_option("--k", sweep_k, "K values: n, list a,b,c or range a:s:b");
  s->add_option("--sigma", sweep.sigma, "noise standard deviation");
  s->add_option("--seed", sweep.seed, "random seed");
  s->add_flag("--oracle", sweep.oracle, "train on clean data");
  s->add_option("--refs", sweep.refs_per_image, "reference patches per image");
  s->add_option("--patch", sweep.patch_side, "patch side");
  s->add_option("--window", sweep.window, "search window side");
  s->add_option("--m", sweep.match_m, "matched patches per group");
  s->add_option("--iters", sweep.iters, "learning iterations");
  s->add_option("--init", sweep_init, "dictionary init: identity, dct, random");
  s->add_flag("--remove-dc", sweep.remove_dc, "model patches with mean removed");
  s->add_option("--combine", sweep_combine, "none, alt or convex (two models)");
  s->add_option("--mu", sweep.mu, "convex combination weight");
  s->add_flag("--mu-search", sweep.mu_search, "line-search mu against clean");
  s->add_option("--alt-rounds", sweep.alt_rounds, "alternating rounds");
  s->add_option("--out-dir", sweep_outdir, "write sweep.csv and plan.txt here");

  // ---- denoise ----
  DenoiseCmdConfig dn;
  std::vector<std::string> dn_models{"sp"};
  std::string dn_combine = "none";
  std::string dn_init = "identity";
  auto* d = app.add_subcommand(
      "denoise", "noise an image, denoise it at the image level, report PSNR");
  d->add_option("image", dn.image_path, "clean input PGM")->required();
  d->add_option("--model", dn_models, "models: sp gs js gjs lr");
  d->add_option("--k", dn.K, "sparsity level / rank");
  d->add_option("--sigma", dn.sigma, "noise standard deviation");
  d->add_option("--seed", dn.seed, "random seed");
  d->add_option("--patch", dn.patch_side, "patch side");
  d->add_option("--window", dn.window, "search window side");
  d->add_option("--m", dn.match_m, "matched patches per group");
  d->add_option("--stride", dn.stride, "reference grid stride");
  d->add_option("--iters", dn.iters, "learning iterations");
  d->add_option("--init", dn_init, "dictionary init: identity, dct, random");
  d->add_flag("--remove-dc", dn.remove_dc, "model patches with mean removed");
  d->add_option("--combine", dn_combine, "none, alt or convex (two models)");
  d->add_option("--mu", dn.mu, "convex combination weight");
  d->add_flag("--mu-search", dn.mu_search, "line-search mu against clean");
  d->add_option("--alt-rounds", dn.alt_rounds, "alternating rounds");
  d->add_option("--out-dir", dn.out_dir, "write PGMs, report.csv, plan.txt here");

  // ---- fuse ----
  FuseCmdConfig fu;
  auto* f = app.add_subcommand(
      "fuse", "fuse two denoised estimates with a fidelity pull to the noisy "
              "image (closed form)");
  f->add_option("--noisy", fu.noisy_path, "noisy image y")->required();
  f->add_option("--a", fu.a_path, "estimate A")->required();
  f->add_option("--b", fu.b_path, "estimate B")->required();
  f->add_option("--ref", fu.reference_path, "clean reference (enables PSNR)");
  f->add_option("--mu", fu.mu, "weight of estimate A");
  f->add_flag("--mu-search", fu.mu_search, "line-search mu against --ref");
  f->add_option("--lambda-f", fu.lambda_f, "fidelity weight");
  f->add_option("--out", fu.out_path, "output PGM path");

  // ---- verify ----
  std::uint64_t verify_seed = 7;
  std::string verify_csv;
  std::string verify_inject;
  auto* v = app.add_subcommand(
      "verify", "certify the model-set relationship statements numerically");
  v->add_option("--seed", verify_seed, "random seed");
  v->add_option("--out-csv", verify_csv, "statement CSV path");
  v->add_option("--inject-failure", verify_inject, "corrupt a statement's instance")
      ->group("");  // test hook, hidden from help

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*s) {
      sweep.models = parse_models(sweep_models);
      sweep.ks = parse_k_range(sweep_k);
      sweep.combine = parse_combine(sweep_combine);
      sweep.init = parse_init(sweep_init);
      if (!sweep_outdir.empty()) {
        std::filesystem::create_directories(sweep_outdir);
        sweep.out_csv = sweep_outdir + "/sweep.csv";
        sweep.out_plan = sweep_outdir + "/plan.txt";
      }
      return cmd_sweep(sweep);
    }
    if (*d) {
      dn.models = parse_models(dn_models);
      dn.combine = parse_combine(dn_combine);
      dn.init = parse_init(dn_init);
      return cmd_denoise(dn);
    }
    if (*f) return cmd_fuse(fu);
    if (*v) return cmd_verify(verify_seed, verify_csv, verify_inject);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
