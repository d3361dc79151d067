#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const fs::path kCli = WELLPOSE_CLI_PATH;

struct Invocation {
  int exit_code;
  std::string output;
};

Invocation run_cli(const std::string& args, const fs::path& workdir) {
  const fs::path log = workdir / "cli_output.log";
  const std::string cmd =
      kCli.string() + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  Invocation result;
  result.exit_code = (status >= 0) ? ((status >> 8) & 0xff) : -1;
  std::ifstream in(log);
  std::ostringstream os;
  os << in.rdbuf();
  result.output = os.str();
  return result;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("wellpose_cli_" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

void write_config(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  out << body;
}

const char* kSmallRun =
    "grid.nx=24\n"
    "grid.ny=24\n"
    "run.t_end=0.05\n"
    "run.sample_every=10\n";

}  // namespace

TEST_CASE("check subcommand passes and prints one line per property") {
  TempDir tmp;
  const Invocation r = run_cli("check", tmp.path);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("FAIL") == std::string::npos);
  for (const char* needle :
       {"PASS fields.gradient", "PASS solver.rhs_fixed_point",
        "PASS bench.steady_residual", "PASS reversal.solve_decomposition",
        "PASS admissibility.classify", "PASS config.parse_emit"})
    CHECK(r.output.find(needle) != std::string::npos);
}

TEST_CASE("bench subcommand: pass on defaults, fail exit code 2 on tiny tol") {
  TempDir tmp;
  const Invocation ok = run_cli("bench", tmp.path);
  CHECK(ok.exit_code == 0);
  CHECK(ok.output.find("pass=1") != std::string::npos);
  CHECK(ok.output.find("max_norm=") != std::string::npos);

  const fs::path cfg = tmp.path / "strict.cfg";
  write_config(cfg, "run.tol_residual=1e-16\n");
  const Invocation strict =
      run_cli("bench --config " + cfg.string(), tmp.path);
  CHECK(strict.exit_code == 2);
  CHECK(strict.output.find("pass=0") != std::string::npos);
}

TEST_CASE("forward subcommand writes trajectory and snapshots") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "run.cfg";
  write_config(cfg, std::string(kSmallRun) +
                        "run.snapshot_every=200\n"
                        "init.eps=0.0025\n");
  const fs::path out = tmp.path / "fwd";
  const Invocation r = run_cli(
      "forward --config " + cfg.string() + " --out " + out.string(), tmp.path);
  CHECK(r.exit_code == 0);

  const std::string traj = slurp(out / "trajectory.csv");
  CHECK(traj.rfind("t,kinetic_energy,rms_velocity,max_div,max_eps_rho,"
                   "l2_dist,dudt_norm,diverged\n", 0) == 0);
  CHECK(fs::exists(out / "snapshot_ux_0000000.csv"));
  CHECK(fs::exists(out / "snapshot_uy_0000000.csv"));
  CHECK(fs::exists(out / "snapshot_rho_0000000.csv"));
  const std::string snap = slurp(out / "snapshot_ux_0000000.csv");
  CHECK(snap.rfind("# field=ux nx=24 ny=24", 0) == 0);
}

TEST_CASE("reverse subcommand compares the two closed forms") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "rev.cfg";
  write_config(cfg, "grid.ny=33\nreverse.n_steps=20000\n");
  const fs::path out = tmp.path / "rev";
  const Invocation r = run_cli(
      "reverse --config " + cfg.string() + " --out " + out.string(), tmp.path);
  CHECK(r.exit_code == 0);
  const std::string csv = slurp(out / "reverse.csv");
  CHECK(csv.rfind("y,c_y,j_t0,j_inf_numeric,j_inf_closed_form,rel_diff\n", 0) ==
        0);
  // 33 nodes minus the 2-cell wall margins
  std::size_t rows = 0;
  for (char c : csv) rows += c == '\n';
  CHECK(rows == 1 + 29);
}

TEST_CASE("sweep subcommand is byte-identical across runs") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "sweep.cfg";
  write_config(cfg, std::string(kSmallRun) +
                        "sweep.alpha=0.5,1\n"
                        "sweep.eps=0,0.0025\n"
                        "sweep.k=1\n");
  const fs::path out_a = tmp.path / "sweep_a";
  const fs::path out_b = tmp.path / "sweep_b";
  const Invocation a = run_cli(
      "sweep --config " + cfg.string() + " --out " + out_a.string(), tmp.path);
  const Invocation b = run_cli(
      "sweep --config " + cfg.string() + " --out " + out_b.string(), tmp.path);
  CHECK(a.exit_code == 0);
  CHECK(b.exit_code == 0);
  CHECK(slurp(out_a / "sweep.csv") == slurp(out_b / "sweep.csv"));
  CHECK(slurp(out_a / "sweep_summary.json") ==
        slurp(out_b / "sweep_summary.json"));
  CHECK_FALSE(fs::exists(out_a / "sweep_resume.txt"));  // removed on success

  const std::string summary = slurp(out_a / "sweep_summary.json");
  CHECK(summary.find("sweep.alpha=0.5,1") != std::string::npos);  // config echo
}

TEST_CASE("sweep resumes from the marker after an interruption") {
  TempDir tmp;
  const fs::path cfg = tmp.path / "long.cfg";
  // large enough that SIGINT lands mid-sweep
  write_config(cfg,
               "grid.nx=48\n"
               "grid.ny=48\n"
               "run.t_end=1\n"
               "sweep.alpha=0.5,1,2\n"
               "sweep.eps=0,0.0025\n"
               "sweep.k=1\n");

  const fs::path out = tmp.path / "resumed";
  const fs::path log = tmp.path / "interrupt.log";
  const std::string interrupted_cmd =
      "timeout --preserve-status -s INT 3 " + kCli.string() +
      " sweep --config " + cfg.string() + " --out " + out.string() + " > " +
      log.string() + " 2>&1";
  const int status = std::system(interrupted_cmd.c_str());
  const int code = (status >= 0) ? ((status >> 8) & 0xff) : -1;
  CHECK(code == 130);
  CHECK(fs::exists(out / "sweep_resume.txt"));
  CHECK_FALSE(fs::exists(out / "sweep.csv"));

  // second invocation picks up the marker and completes
  const Invocation resumed = run_cli(
      "sweep --config " + cfg.string() + " --out " + out.string(), tmp.path);
  CHECK(resumed.exit_code == 0);
  CHECK(resumed.output.find("resuming sweep") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "sweep_resume.txt"));

  // identical to an uninterrupted sweep
  const fs::path fresh = tmp.path / "fresh";
  const Invocation direct = run_cli(
      "sweep --config " + cfg.string() + " --out " + fresh.string(), tmp.path);
  CHECK(direct.exit_code == 0);
  CHECK(slurp(out / "sweep.csv") == slurp(fresh / "sweep.csv"));
}

TEST_CASE("exit codes: usage 1, io 3") {
  TempDir tmp;
  const fs::path bad = tmp.path / "bad.cfg";
  write_config(bad, "fluid.mu=-1\n");
  CHECK(run_cli("bench --config " + bad.string(), tmp.path).exit_code == 1);
  CHECK(run_cli("bench --config /nonexistent/path.cfg", tmp.path).exit_code ==
        3);
  CHECK(run_cli("--definitely-not-a-flag", tmp.path).exit_code == 1);
  CHECK(run_cli("", tmp.path).exit_code == 1);  // no subcommand
}

TEST_CASE("emit-config round-trips through the binary") {
  TempDir tmp;
  const Invocation first = run_cli("--emit-config", tmp.path);
  CHECK(first.exit_code == 0);
  const fs::path cfg = tmp.path / "canonical.cfg";
  write_config(cfg, first.output);
  const Invocation second =
      run_cli("--emit-config --config " + cfg.string(), tmp.path);
  CHECK(second.exit_code == 0);
  CHECK(second.output == first.output);
}
