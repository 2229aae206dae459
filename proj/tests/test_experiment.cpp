#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "chemo/error.hpp"
#include "chemo/experiment.hpp"

using namespace chemo;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "chemo_experiment_tests" / name;
  fs::remove_all(d);
  return d;
}

ExperimentConfig parse(const std::string& text) { return parse_experiment(KeyValueConfig::parse(text)); }

const char* kBase = "n = 3\nR = 1\nk = 1\nM_lo = 1e4\nM_hi = 1.5e4\n";

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string l; std::getline(ss, l);) out.push_back(l);
  return out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CHEMO_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

}  // namespace

TEST_CASE("config validation happens before any computation") {
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 2\nbogus = 1\n"), Error);
  CHECK_THROWS_AS(parse(kBase), Error);  // sigma missing
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 1\n"), Error);  // subcritical in blowup
  CHECK_NOTHROW(parse(std::string(kBase) + "sigma = 1\nscenario = subcritical-probe\n"));
  CHECK_THROWS_AS(parse(std::string(kBase) + "scenario = sweep\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 2\nscenario = dance\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 2\nM = 0\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 2\nc_adv = 2\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 2\ngrid = spiral\n"), Error);
  CHECK_THROWS_AS(parse(std::string(kBase) + "sigma = 2\nt_end = -1\n"), Error);
  CHECK_THROWS_AS(parse("n = 5\nR = 1\nk = 1\nsigma = 2\nM_lo = 1\nM_hi = 2\n"), Error);
  const ExperimentConfig c = parse(std::string(kBase) + "scenario = sweep\nsigma_list = 0.8, 1.3333333333333333, 2\n");
  CHECK(c.sigma_list.size() == 3);
}

TEST_CASE("config echo round-trips") {
  const ExperimentConfig c = parse(std::string(kBase) + "sigma = 2\nM = 300\nt_end = 1e-20\ncheckpoints = 1e-21, 2e-21\n");
  const std::string echo = serialize_experiment(c);
  CHECK(serialize_experiment(parse_experiment(KeyValueConfig::parse(echo))) == echo);
  CHECK(c.M == 300);
  REQUIRE(c.t_end.has_value());
  CHECK(*c.t_end == 1e-20);
}

TEST_CASE("certify-only scenario") {
  ExperimentConfig c = parse(std::string(kBase) + "sigma = 2\nscenario = certify-only\n");
  c.out = scratch("certify");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.exit_code == 0);
  CHECK(r.summary.find("result=pass") != std::string::npos);
  for (const char* f : {"spec.cfg", "certificate.txt", "certificate.csv", "residuals.csv", "profile.csv", "summary.txt",
                        "plot.py", "experiment.cfg"}) {
    INFO(f);
    CHECK(fs::exists(c.out / f));
  }
  CHECK(slurp(c.out / "certificate.csv").rfind("region,max_p,max_q,s_worst,t_worst\n", 0) == 0);
}

TEST_CASE("blowup scenario, n = 4, sigma = 1.5") {
  ExperimentConfig c = parse("n = 4\nR = 1\nk = 1\nsigma = 1.5\nM_lo = 3e4\nM_hi = 4.5e4\n");
  c.out = scratch("blowup4");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.exit_code == 0);
  CHECK(r.summary.find("blew_up=true") != std::string::npos);
  const std::string ord = slurp(c.out / "ordering.txt");
  CHECK(ord.find("blew_up_before_T = true") != std::string::npos);
  CHECK(ord.find("lower_envelope_check = true") != std::string::npos);

  // sup u increases strictly over its last decade before the trigger
  const auto rows = lines_of(slurp(c.out / "run.csv"));
  std::vector<double> sup;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto a = rows[i].find(','), b = rows[i].find(',', a + 1);
    sup.push_back(std::stod(rows[i].substr(a + 1, b - a - 1)));
  }
  REQUIRE(sup.size() > 3);
  const double top = sup.back();
  std::size_t first = sup.size() - 1;
  while (first > 0 && sup[first - 1] >= top / 10.0) --first;
  for (std::size_t i = first + 1; i < sup.size(); ++i) CHECK(sup[i] > sup[i - 1]);
}

TEST_CASE("requested checkpoints are written until the run stops") {
  ExperimentConfig c = parse(std::string(kBase) + "sigma = 2\ncheckpoints = 1, 0, 1e-20\n");
  c.out = scratch("checkpoints");
  REQUIRE(run_experiment(c).exit_code == 0);
  CHECK(slurp(c.out / "checkpoint_0.csv") == slurp(c.out / "checkpoint_initial.csv"));
  CHECK(fs::exists(c.out / "checkpoint_1.csv"));
  CHECK(slurp(c.out / "checkpoint_1.csv") != slurp(c.out / "checkpoint_0.csv"));
  CHECK_FALSE(fs::exists(c.out / "checkpoint_2.csv"));  // t = 1 lies past the trigger
}

TEST_CASE("sweep over sigma on n = 4") {
  ExperimentConfig c =
      parse("n = 4\nR = 1\nk = 1\nM_lo = 1e4\nM_hi = 1.5e4\nscenario = sweep\nsigma_list = 0.8, 1, 2\n");
  c.out = scratch("sweep");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.exit_code == 0);
  const auto rows = lines_of(slurp(c.out / "sweep.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "sigma,n,verdict,exit");
  CHECK(rows[1].find(",bounded,") != std::string::npos);
  CHECK(rows[2].find(",inconclusive,") != std::string::npos);
  CHECK(rows[3].find(",blow-up,") != std::string::npos);
  CHECK(lines_of(r.summary).size() == 3);
}

TEST_CASE("empty probe run still writes complete artifacts") {
  ExperimentConfig c = parse(std::string(kBase) + "sigma = 1\nscenario = subcritical-probe\nt_end = 0\nM = 64\n");
  c.out = scratch("empty");
  const ExperimentResult r = run_experiment(c);
  CHECK(r.exit_code == 0);
  const auto rows = lines_of(slurp(c.out / "run.csv"));
  CHECK(rows.size() == 2);
  CHECK(rows[0] == "t,sup_u,sup_w,mass_u,mu_w,dt");
  const std::string py = slurp(c.out / "plot.py");
  CHECK(py.find("run.csv") != std::string::npos);
  CHECK(py.find("overlay.csv") != std::string::npos);
  CHECK(py.find("residuals.csv") != std::string::npos);
}

TEST_CASE("same config, byte-identical outputs") {
  const std::string text = std::string(kBase) + "sigma = 2\n";
  ExperimentConfig a = parse(text), b = parse(text);
  a.out = scratch("det_a");
  b.out = scratch("det_b");
  run_experiment(a);
  run_experiment(b);
  std::size_t compared = 0;
  for (const auto& e : fs::directory_iterator(a.out)) {
    const std::string name = e.path().filename().string();
    if (name == "experiment.cfg") continue;  // carries the output path
    INFO(name);
    CHECK(slurp(e.path()) == slurp(b.out / name));
    ++compared;
  }
  CHECK(compared >= 12);
}

TEST_CASE("ordering violations do not grow with resolution") {
  double prev = -1.0;
  for (std::size_t M : {256u, 512u}) {
    ExperimentConfig c = parse(std::string(kBase) + "sigma = 2\n");
    c.M = M;
    const BlowupOutcome o = run_blowup_pipeline(c);
    REQUIRE(o.ordering.has_value());
    const double violation = std::max(0.0, -o.ordering->min_margin_rel - o.ordering->tol_rel);
    if (prev >= 0.0) CHECK(violation <= prev);
    prev = violation;
  }
}

TEST_CASE("cli exit codes") {
  const fs::path d = scratch("cli");
  fs::create_directories(d);
  std::ofstream(d / "bad.cfg") << kBase << "sigma = 2\nunknown_key = 3\n";
  std::ofstream(d / "ok.cfg") << kBase << "sigma = 2\nscenario = certify-only\n";
  CHECK(run_cli("") == 1);  // --config is required
  CHECK(run_cli("--config " + (d / "missing.cfg").string()) == 1);
  CHECK(run_cli("--config " + (d / "bad.cfg").string()) == 1);
  CHECK(run_cli("--config " + (d / "ok.cfg").string() + " --out " + (d / "o").string() + " --seed 5") == 0);
  CHECK(fs::exists(d / "o" / "certificate.txt"));
  std::ofstream(d / "blow.cfg") << kBase << "sigma = 2\n";
  CHECK(run_cli("--config " + (d / "blow.cfg").string() + " --out " + (d / "p").string() +
                " --scenario certify-only") == 0);
  CHECK(fs::exists(d / "p" / "certificate.txt"));
  CHECK_FALSE(fs::exists(d / "p" / "run.csv"));
  CHECK(run_cli("--config " + (d / "blow.cfg").string() + " --scenario nonsense") == 1);
}
