#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "helpers.hpp"
#include "nlcoh/cli/commands.hpp"
#include "nlcoh/cli/run_config.hpp"
#include "nlcoh/error.hpp"

using namespace nlcoh;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config(const fs::path& root) {
  RunConfig c;
  c.system = "friction";
  c.noise = NoiseLevel::moderate;
  c.frames = 24;
  c.length = 512;
  c.lead_in = 100;
  c.data = root / "data";
  c.out = root / "run";
  c.forward = forward_preset(SystemKind::coulomb_friction);
  c.forward->epochs = 3;
  c.sweep.initial_epochs = 4;
  c.sweep.epochs_per_step = 2;
  c.sweep.window = 2;
  c.sweep.control_points = 8;
  return c;
}

RunConfig simulate_tiny(const fs::path& root) {
  RunConfig c = tiny_config(root);
  RunConfig sim = c;
  sim.out = c.data;
  std::ostringstream log;
  cmd_simulate(sim, log);
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NLCOH_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("run config serializes and parses back to the same config") {
  RunConfig c = tiny_config("/tmp/somewhere");
  c.noise_scale = 0.125;
  c.seed = 99;
  c.sweep.threshold = 0.02;
  c.sweep.run_to_end = true;
  c.sensitivity = true;
  c.format = FrameFormat::csv;
  const std::string text = serialize(c);
  const RunConfig back = parse_run_config(text);
  CHECK(serialize(back) == text);
  CHECK(back.forward->epochs == 3);
  CHECK(back.sweep.threshold == 0.02);
  CHECK(back.format == FrameFormat::csv);
}

TEST_CASE("run config rejects unknown keys and bad values") {
  RunConfig c;
  CHECK_THROWS_AS(apply_setting(c, "nonsense", "1"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "frames", "many"), InvalidInput);
  CHECK_THROWS_AS(apply_setting(c, "noise", "loud"), InvalidInput);
  CHECK_THROWS_AS(parse_run_config("frames\n"), InvalidInput);
  CHECK(parse_run_config("# comment\nframes = 30\n\n").frames == 30);
}

TEST_CASE("simulate refuses fewer frames than the split needs") {
  const test::TempDir dir("cli_frames");
  RunConfig c = tiny_config(dir.path());
  c.frames = 20;
  c.out = dir.path() / "data";
  std::ostringstream log;
  CHECK_THROWS_WITH_AS(cmd_simulate(c, log), doctest::Contains("train + validation + 1"), InvalidInput);
}

TEST_CASE("simulate is reproducible byte for byte") {
  const test::TempDir a("cli_rep_a"), b("cli_rep_b");
  simulate_tiny(a.path());
  simulate_tiny(b.path());
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(a.path() / "data")) {
    const auto name = e.path().filename();
    if (name == "simulate.cfg") continue;
    ++files;
    CHECK(slurp(e.path()) == slurp(b.path() / "data" / name));
  }
  CHECK(files >= 4);
}

TEST_CASE("estimate then report writes the figure data and a 3-decimal summary") {
  const test::TempDir dir("cli_run");
  const RunConfig c = simulate_tiny(dir.path());
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_report(c.out, log), DataError);

  cmd_estimate(c, log);
  CHECK(missing_run_artifacts(c.out).empty());
  cmd_report(c.out, log);
  for (const char* name : {"fig_coherence.csv", "fig_lambda.csv", "fig_kcurve.csv", "fig_psd.csv", "summary.txt"})
    CHECK(fs::exists(c.out / name));

  const std::string summary = slurp(c.out / "summary.txt");
  std::smatch m;
  REQUIRE(std::regex_search(summary, m, std::regex(R"(\|[^\n]*\|[^\n]*?(-?\d+\.\d+))")));
  CHECK(m[1].str().size() - m[1].str().find('.') - 1 == 3);

  // Abscissa of the lambda figure rises strictly.
  std::ifstream lam(c.out / "fig_lambda.csv");
  std::string line;
  std::getline(lam, line);
  double prev = -1.0;
  std::size_t rows = 0;
  while (std::getline(lam, line)) {
    if (line.empty()) continue;
    const double ratio = std::stod(line.substr(0, line.find(',')));
    if (line.find("crossing") != std::string::npos) continue;
    CHECK(ratio > prev);
    prev = ratio;
    ++rows;
  }
  CHECK(rows >= 2);

  fs::remove(c.out / "kcurve.csv");
  CHECK_THROWS_WITH_AS(cmd_report(c.out, log), doctest::Contains("kcurve.csv"), DataError);
}

TEST_CASE("estimate on data without ground truth omits the true column") {
  const test::TempDir dir("cli_external");
  RunConfig c = simulate_tiny(dir.path());
  FramedDataset ds = load_dataset(c.data);
  ds.y = FrameSet();
  ds.true_coherence.reset();
  ds.manifest.source = "external";
  ds.manifest.oscillator.reset();
  ds.manifest.noise.reset();
  fs::remove_all(c.data);
  save_dataset(c.data, ds);
  c.system = "external";
  std::ostringstream log;
  const CoherenceSummary s = cmd_estimate(c, log);
  CHECK_FALSE(s.band_mean_abs_error.has_value());
  const std::string csv = slurp(c.out / "coherence.csv");
  CHECK(csv.find("gamma2_true") == std::string::npos);
}

TEST_CASE("command-line exit codes") {
  const test::TempDir dir("cli_exit");
  const std::string root = dir.path().string();
  CHECK(run_cli("--help") == exit_ok);
  CHECK(run_cli("") == exit_usage);
  CHECK(run_cli("frobnicate") == exit_usage);
  CHECK(run_cli("simulate --system teapot --out " + root + "/x") == exit_usage);
  CHECK(run_cli("simulate --system poly --preset other --out " + root + "/x") == exit_usage);
  CHECK(run_cli("simulate --system poly --frames 20 --out " + root + "/x") == exit_usage);
  CHECK(run_cli("sweep --data " + root + "/missing --out " + root + "/y") == exit_data);
  CHECK(run_cli("report --run " + root) == exit_data);
  CHECK(run_cli("simulate --system friction --frames 24 --length 512 --lead-in 100 --out " + root + "/d") == exit_ok);
  CHECK(run_cli("sweep --data " + root + "/d --out " + root + "/s") == exit_data);  // no forward prediction yet
  CHECK(run_cli("train-forward --data " + root + "/d --epochs 2") == exit_ok);
  CHECK(run_cli("sweep --data " + root + "/d --out " + root + "/s --initial-epochs 3 --epochs-per-step 1 --window 1 "
                "--lr 1e300") == exit_divergence);
}
