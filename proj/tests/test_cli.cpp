#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

#ifndef BLOCHNET_BIN
#error "BLOCHNET_BIN must point at the CLI executable"
#endif

namespace {

int run_cli(const std::string& args, const fs::path& capture = {}) {
  std::string cmd = std::string(BLOCHNET_BIN) + " " + args;
  if (capture.empty())
    cmd += " >/dev/null 2>&1";
  else
    cmd += " >" + capture.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

fs::path fresh_dir(const char* tag) {
  fs::path d = fs::temp_directory_path() / (std::string("blochnet_cli_") + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("successful run emits data plus a manifest with every default") {
  auto dir = fresh_dir("ok");
  write_file(dir / "cfg.ini", "M = 36\nN = 36\nn0 = 18\ntau0 = 18\ngrid_points = 3\n");
  int rc = run_cli("ybeam --config " + (dir / "cfg.ini").string() + " --out " +
                   (dir / "out").string());
  CHECK(rc == 0);
  CHECK(fs::exists(dir / "out" / "reflection_scan.csv"));
  CHECK(fs::exists(dir / "out" / "reflection_scan.csv.mat"));
  const std::string manifest = slurp(dir / "out" / "manifest.txt");
  CHECK(manifest.find("experiment = ybeam") != std::string::npos);
  CHECK(manifest.find("gauge = single") != std::string::npos);
  CHECK(manifest.find("threads = 1") != std::string::npos);
  // defaults the config never mentioned are echoed back
  CHECK(manifest.find("alpha = 0.29999999999999999") != std::string::npos);
  CHECK(manifest.find("k = 1.5707963267948966") != std::string::npos);
  CHECK(manifest.find("grid_max = 2") != std::string::npos);
  CHECK(manifest.find("output = reflection_scan.csv") != std::string::npos);

  const std::string csv = slurp(dir / "out" / "reflection_scan.csv");
  CHECK(csv.rfind("x,y,z\n", 0) == 0);
}

TEST_CASE("same config produces identical bytes regardless of thread count") {
  auto dir = fresh_dir("det");
  write_file(dir / "cfg.ini", "M = 36\nN = 36\nn0 = 18\ntau0 = 18\ngrid_points = 4\n");
  const std::string base = "ybeam --config " + (dir / "cfg.ini").string();
  CHECK(run_cli(base + " --out " + (dir / "a").string() + " --threads 1") == 0);
  CHECK(run_cli(base + " --out " + (dir / "b").string() + " --threads 3") == 0);
  CHECK(slurp(dir / "a" / "reflection_scan.csv") == slurp(dir / "b" / "reflection_scan.csv"));
  CHECK(slurp(dir / "a" / "reflection_scan.csv.mat") ==
        slurp(dir / "b" / "reflection_scan.csv.mat"));
}

TEST_CASE("config failures exit 2 and the message names the offender") {
  auto dir = fresh_dir("err");

  write_file(dir / "unknown.ini", "M = 20\nwavelength = 3\n");
  auto log = dir / "log.txt";
  CHECK(run_cli("ybeam --config " + (dir / "unknown.ini").string() + " --out " +
                    (dir / "o1").string(),
                log) == 2);
  CHECK(slurp(log).find("wavelength") != std::string::npos);

  write_file(dir / "badnum.ini", "M = pear\n");
  CHECK(run_cli("ybeam --config " + (dir / "badnum.ini").string() + " --out " +
                    (dir / "o2").string(),
                log) == 2);
  CHECK(slurp(log).find("'M'") != std::string::npos);

  CHECK(run_cli("ybeam --config " + (dir / "missing.ini").string(), log) == 2);
  CHECK(run_cli("warp --config " + (dir / "unknown.ini").string(), log) == 2);
  CHECK(run_cli("ybeam", log) == 2);  // --config is required

  write_file(dir / "ok.ini", "M = 20\nN = 20\nn0 = 10\ntau0 = 10\ngrid_points = 3\n");
  CHECK(run_cli("ybeam --config " + (dir / "ok.ini").string() + " --gauge sideways", log) == 2);
  CHECK(slurp(log).find("--gauge") != std::string::npos);

  // missing required experiment key
  write_file(dir / "nonet.ini", "phi_max = 1\n");
  CHECK(run_cli("sweep --config " + (dir / "nonet.ini").string(), log) == 2);
  CHECK(slurp(log).find("'network'") != std::string::npos);
}

TEST_CASE("filesystem failures exit 3") {
  auto dir = fresh_dir("fs");
  write_file(dir / "cfg.ini", "M = 20\nN = 20\nn0 = 10\ntau0 = 10\ngrid_points = 3\n");
  write_file(dir / "blocker", "plain file\n");
  int rc = run_cli("ybeam --config " + (dir / "cfg.ini").string() + " --out " +
                   (dir / "blocker" / "sub").string());
  CHECK(rc == 3);
}

TEST_CASE("reduce-report certifies the quarter-flux ring") {
  auto dir = fresh_dir("rr");
  write_file(dir / "cfg.ini", "scheme = qquarter\nM = 20\nN = 20\n");
  CHECK(run_cli("reduce-report --config " + (dir / "cfg.ini").string() + " --out " +
                (dir / "out").string()) == 0);
  const std::string report = slurp(dir / "out" / "reduction_report.txt");
  CHECK(report.find("block a = 60") != std::string::npos);  // one chain of M+2N sites

  std::istringstream lines(report);
  std::string line;
  double residual = -1, oracle = -1;
  while (std::getline(lines, line)) {
    if (line.rfind("residual = ", 0) == 0) residual = std::stod(line.substr(11));
    if (line.rfind("oracle_deviation = ", 0) == 0) oracle = std::stod(line.substr(19));
  }
  CHECK(residual >= 0);
  CHECK(residual <= 1e-14);
  CHECK(oracle >= 0);
  CHECK(oracle <= 1e-10);
}

TEST_CASE("help exits 0") {
  CHECK(run_cli("--help") == 0);
}
