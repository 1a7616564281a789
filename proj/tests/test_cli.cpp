#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <sys/wait.h>

#include "patchmodels/image.hpp"
#include "test_util.hpp"

namespace {

int run_cli(const std::string& args) {
  const std::string cmd =
      std::string(PATCHMODELS_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  if (rc == -1 || !WIFEXITED(rc)) return -1;
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("cli exit codes: success, usage, data, verification") {
  namespace fs = std::filesystem;
  const auto dir = fs::temp_directory_path();
  const std::string img = (dir / "pm_cli_scene.pgm").string();
  patchmodels::save_pgm(testutil::make_scene(48, 48), img);

  // 0: success
  CHECK(run_cli("verify") == 0);
  CHECK(run_cli("sweep " + img +
                " --model sp --k 4 --sigma 8 --refs 20 --patch 4 --window 12"
                " --m 6 --iters 3") == 0);

  // 1: usage errors
  CHECK(run_cli("sweep " + img + " --model nosuch --k 4") == 1);
  CHECK(run_cli("sweep " + img + " --model splr --k 4 --refs 10 --patch 4"
                " --window 12 --m 6") == 1);
  CHECK(run_cli("--definitely-not-a-flag") == 1);
  CHECK(run_cli("fuse --noisy " + img + " --a " + img + " --b " + img +
                " --mu-search") == 1);

  // 2: data errors
  CHECK(run_cli("sweep /nonexistent/input.pgm --model sp --k 4") == 2);
  CHECK(run_cli("denoise /nonexistent/input.pgm") == 2);

  // 3: verification failure
  CHECK(run_cli("verify --inject-failure sp-not-in-lr") == 3);

  // help is not an error
  CHECK(run_cli("--help") == 0);
}
