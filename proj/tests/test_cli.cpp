#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// End-to-end checks of the installed command surface: exit statuses, report
// lines, csv artifacts, and byte-level determinism. The binary path and the
// fixtures directory come in as compile definitions.

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int status = -1;
  std::string output;  // stdout and stderr, interleaved
};

RunResult run_command(const std::string& command) {
  RunResult result;
  FILE* pipe = popen((command + " 2>&1").c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buffer[4096];
  std::size_t got = 0;
  while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0) result.output.append(buffer, got);
  const int raw = pclose(pipe);
  if (WIFEXITED(raw)) result.status = WEXITSTATUS(raw);
  return result;
}

RunResult run_cli(const std::string& args) {
  return run_command(std::string(DSSCAP_CLI_PATH) + " " + args);
}

std::string fixture(const std::string& name) {
  return std::string(DSSCAP_FIXTURES_DIR) + "/" + name;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

/// Removes the trailing timing line, the one part of a report that may vary
/// between otherwise identical runs.
std::string strip_timing(const std::string& text) {
  const std::size_t pos = text.rfind("timing_ms:");
  return pos == std::string::npos ? text : text.substr(0, pos);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

/// Fresh empty directory under the system temp root, one per test so
/// concurrently running suites cannot collide.
fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dsscap_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const std::string kCsvHeader =
    "beta,beta_dec,gamma_mean,gamma_mean_dec,alpha_mean,alpha_mean_dec,feasible,scale,"
    "scale_dec";

}  // namespace

TEST_CASE("validate accepts the reference system") {
  const RunResult run = run_cli("validate " + fixture("table1.json"));
  CHECK(run.status == 0);
  CHECK(contains(run.output, "command: validate\n"));
  CHECK(contains(run.output, "input: " + fixture("table1.json") + "\n"));
  CHECK(contains(run.output, "violations: 0\n"));
  CHECK(contains(run.output, "\nok\n"));
  CHECK(contains(run.output, "timing_ms: "));

  // The digest is sixteen hex digits of the input bytes.
  const std::size_t pos = run.output.find("digest: fnv1a64:");
  REQUIRE(pos != std::string::npos);
  const std::string hex = run.output.substr(pos + std::string("digest: fnv1a64:").size(), 17);
  REQUIRE(hex.size() == 17);
  CHECK(hex[16] == '\n');
  for (int i = 0; i < 16; ++i) CHECK(std::isxdigit(static_cast<unsigned char>(hex[i])));
}

TEST_CASE("validate lists violations with stable rule ids") {
  const RunResult run = run_cli("validate " + fixture("invalid_self_helper.json"));
  CHECK(run.status == 1);
  CHECK(contains(run.output, "violation: self-in-surviving-set:"));
  CHECK(contains(run.output, "violations: 1\n"));
  CHECK(contains(run.output, "invalid\n"));
}

TEST_CASE("validate reports unreadable or malformed input as usage errors") {
  const RunResult missing = run_cli("validate " + fixture("no_such_file.json"));
  CHECK(missing.status == 2);
  CHECK(contains(missing.output, "cannot read"));

  const fs::path dir = scratch_dir("malformed");
  std::ofstream(dir / "broken.json") << "{";
  const RunResult broken = run_cli("validate " + (dir / "broken.json").string());
  CHECK(broken.status == 2);
  CHECK(contains(broken.output, "invalid JSON"));
}

TEST_CASE("capacity reports the exact value with a witness") {
  const RunResult run = run_cli("capacity " + fixture("table1.json"));
  CHECK(run.status == 0);
  CHECK(contains(run.output, "capacity = 3 (3.00000000000)\n"));
  CHECK(contains(run.output, "argmin = [(U1,S1),(U2,S1)]\n"));
  CHECK(contains(run.output, "term 1: min(storage 2, download 2) = 2\n"));
  CHECK(contains(run.output, "term 2: min(storage 2, download 1) = 1\n"));
  CHECK(contains(run.output, "sequences_examined: "));
}

TEST_CASE("capacity agrees with the flow oracle on small systems") {
  const RunResult run = run_cli("capacity " + fixture("table1.json") + " --oracle");
  CHECK(run.status == 0);
  CHECK(contains(run.output, "oracle: minimum flow 3 (3.00000000000) matches\n"));
}

TEST_CASE("capacity refuses the oracle beyond six nodes") {
  const RunResult refused = run_cli("capacity " + fixture("homogeneous_7_4_5.json") + " --oracle");
  CHECK(refused.status == 2);
  CHECK(contains(refused.output, "n <= 6"));

  const RunResult plain = run_cli("capacity " + fixture("homogeneous_7_4_5.json"));
  CHECK(plain.status == 0);
  CHECK(contains(plain.output, "capacity = 4 (4.00000000000)\n"));
}

TEST_CASE("capacity output is byte-identical across reruns and thread counts") {
  const RunResult first = run_cli("capacity " + fixture("table1.json"));
  const RunResult second = run_cli("capacity " + fixture("table1.json"));
  const RunResult threaded = run_cli("--threads 4 capacity " + fixture("table1.json"));
  REQUIRE(first.status == 0);
  REQUIRE(second.status == 0);
  REQUIRE(threaded.status == 0);
  CHECK(strip_timing(first.output) == strip_timing(second.output));
  CHECK(strip_timing(first.output) == strip_timing(threaded.output));
  CHECK(strip_timing(first.output) != first.output);  // the timing line was there
}

TEST_CASE("a zero download unit degrades to capacity zero with a warning") {
  const fs::path dir = scratch_dir("beta0");
  std::string text = slurp(fixture("table1.json"));
  const std::size_t pos = text.find("\"beta\": 1");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, std::string("\"beta\": 1").size(), "\"beta\": 0");
  std::ofstream(dir / "beta0.json") << text;

  const RunResult run = run_cli("capacity " + (dir / "beta0.json").string());
  CHECK(run.status == 0);
  CHECK(contains(run.output, "warning: beta-positive"));
  CHECK(contains(run.output, "capacity = 0 (0)\n"));

  const RunResult strict = run_cli("validate " + (dir / "beta0.json").string());
  CHECK(strict.status == 1);
  CHECK(contains(strict.output, "violation: beta-positive"));
}

TEST_CASE("points reports extremal settings and flags the storage-minimal caveat") {
  const RunResult run = run_cli("points " + fixture("table1.json") + " --B 3");
  CHECK(run.status == 0);
  CHECK(contains(run.output, "file_size = 3 (3.00000000000)\n"));
  CHECK(contains(run.output, "star: sequence = [(U1,S1),(U2,S1)]\n"));
  CHECK(contains(run.output, "star: fresh helpers per position = 2 1 (sum 3, min 1)\n"));
  CHECK(contains(run.output, "msr: beta_max = 3/2 (1.50000000000)\n"));
  CHECK(contains(run.output, "msr: allocation rule inverse-degree\n"));
  CHECK(contains(run.output, "msr: alpha[U1] = 3/2 (1.50000000000)\n"));
  CHECK(contains(run.output, "msr: alpha[U4] = 1 (1.00000000000)\n"));
  CHECK(contains(run.output, "msr: alpha along the star sequence = 3/2 3/2\n"));
  CHECK(contains(run.output,
                 "note: capacity under the minimum-storage allocation is 5/2 (2.50000000000)"));
  CHECK(contains(run.output, "mbr: beta = 1 (1.00000000000)\n"));
  CHECK(contains(run.output, "mbr: alpha[U1] = 2 (2.00000000000)\n"));
  CHECK(contains(run.output, "mbr: alpha[U4] = 3 (3.00000000000)\n"));
  CHECK(contains(run.output, "mbr: capacity check = 3 (3.00000000000), equals the file size\n"));
}

TEST_CASE("points rejects bad file sizes") {
  CHECK(run_cli("points " + fixture("table1.json") + " --B 0").status == 2);
  CHECK(contains(run_cli("points " + fixture("table1.json") + " --B 0").output, "must be > 0"));
  CHECK(run_cli("points " + fixture("table1.json") + " --B 1.5").status == 2);
  CHECK(run_cli("points " + fixture("table1.json") + " --B -3").status == 2);
  CHECK(run_cli("points " + fixture("table1.json")).status == 2);  // --B is required
}

TEST_CASE("tradeoff writes exact csv rows under the output directory") {
  const fs::path dir = scratch_dir("curve");
  const std::string invocation = "DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                                 " tradeoff --profile 2:2:3:3 --k 2 --B 1"
                                 " --beta-grid 1/6,1/4,1/3,1/2";
  const RunResult run = run_command(invocation);
  CHECK(run.status == 0);
  CHECK(contains(run.output, "helper sets: all degree-sized subsets\n"));
  CHECK(contains(run.output, "k = 2\n"));
  CHECK(contains(run.output, "curve_csv = " + (dir / "curve.csv").string() + "\n"));
  CHECK(contains(run.output, "feasible_points = 2 of 4\n"));

  const std::vector<std::string> rows = lines_of(slurp(dir / "curve.csv"));
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == kCsvHeader);
  CHECK(rows[1] == "1/6,0.166666666667,5/12,0.416666666667,,,0,,");
  CHECK(rows[2] == "1/4,0.250000000000,5/8,0.625000000000,,,0,,");
  CHECK(rows[3] == "1/3,0.333333333333,5/6,0.833333333333,5/6,0.833333333333,1,1/3,0.333333333333");
  CHECK(rows[4] == "1/2,0.500000000000,5/4,1.25000000000,5/8,0.625000000000,1,1/4,0.250000000000");

  // Rerunning, with any thread count, reproduces the file byte for byte.
  const std::string bytes = slurp(dir / "curve.csv");
  REQUIRE(run_command(invocation).status == 0);
  CHECK(slurp(dir / "curve.csv") == bytes);
  const std::string threaded = "DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                               " --threads 4 tradeoff --profile 2:2:3:3 --k 2 --B 1"
                               " --beta-grid 1/6,1/4,1/3,1/2";
  REQUIRE(run_command(threaded).status == 0);
  CHECK(slurp(dir / "curve.csv") == bytes);
}

TEST_CASE("tradeoff emits the homogeneous comparator alongside the curve") {
  const fs::path dir = scratch_dir("comparator");
  const RunResult run =
      run_command("DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                  " tradeoff --profile 3:3:3:3 --k 2 --B 2 --beta-grid 1/3,1/2"
                  " --homogeneous-d 3");
  CHECK(run.status == 0);
  CHECK(contains(run.output, "homogeneous_csv = " + (dir / "homogeneous.csv").string() + "\n"));

  const std::vector<std::string> rows = lines_of(slurp(dir / "curve.csv"));
  REQUIRE(rows.size() == 3);
  CHECK(rows[1] == "1/3,0.333333333333,1,1.00000000000,,,0,,");
  CHECK(rows[2] == "1/2,0.500000000000,3/2,1.50000000000,1,1.00000000000,1,1/3,0.333333333333");

  // A uniform profile and the closed-form comparator produce the same curve.
  CHECK(slurp(dir / "homogeneous.csv") == slurp(dir / "curve.csv"));
}

TEST_CASE("tradeoff reproduces the seven-node comparison setup") {
  const fs::path dir = scratch_dir("sevennode");
  const RunResult run =
      run_command("DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                  " tradeoff --profile 4:4:5:5:5:6:6 --k 4 --B 1 --beta-grid 1/18,1/12,1/6"
                  " --homogeneous-d 5 --homogeneous-output closed.csv");
  CHECK(run.status == 0);
  CHECK(contains(run.output, "feasible_points = 2 of 3\n"));

  const std::vector<std::string> rows = lines_of(slurp(dir / "curve.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(contains(rows[1], ",,0,,"));  // below the feasibility threshold 1/12
  CHECK(rows[2] ==
        "1/12,0.0833333333333,5/12,0.416666666667,5/12,0.416666666667,1,1/12,0.0833333333333");

  const std::vector<std::string> closed = lines_of(slurp(dir / "closed.csv"));
  REQUIRE(closed.size() == 4);
  CHECK(closed[0] == kCsvHeader);
}

TEST_CASE("an entirely infeasible grid is an analysis failure") {
  const fs::path dir = scratch_dir("infeasible");
  const RunResult run = run_command("DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                                    " tradeoff --profile 2:2:3:3 --k 2 --B 1 --beta-grid 1/6,1/4");
  CHECK(run.status == 1);
  CHECK(contains(run.output, "no grid point is feasible"));
  CHECK(contains(run.output, "feasible_points = 0 of 2\n"));
  CHECK(lines_of(slurp(dir / "curve.csv")).size() == 3);  // the csv is still written

  const RunResult zero = run_command("DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                                     " tradeoff --profile 2:2:3:3 --k 2 --B 1 --beta-grid 0");
  CHECK(zero.status == 1);
}

TEST_CASE("tradeoff requires exactly one input source") {
  const RunResult both = run_cli("tradeoff " + fixture("table1.json") +
                                 " --profile 2:2:2 --k 2 --B 1 --beta-grid 1");
  CHECK(both.status == 2);
  CHECK(contains(both.output, "either a system file or --profile"));

  const RunResult neither = run_cli("tradeoff --B 1 --beta-grid 1");
  CHECK(neither.status == 2);

  const RunResult no_k = run_cli("tradeoff --profile 2:2:2 --B 1 --beta-grid 1");
  CHECK(no_k.status == 2);
  CHECK(contains(no_k.output, "--k is required"));

  const RunResult bad_profile = run_cli("tradeoff --profile 2:x:2 --k 2 --B 1 --beta-grid 1");
  CHECK(bad_profile.status == 2);
  CHECK(contains(bad_profile.output, "not a positive integer"));
}

TEST_CASE("tradeoff from a system file uses its degrees and reconstruction degree") {
  const fs::path dir = scratch_dir("fromspec");
  const RunResult run = run_command("DSSCAP_OUTPUT_DIR=" + dir.string() + " " + DSSCAP_CLI_PATH +
                                    " tradeoff " + fixture("table1.json") +
                                    " --B 3 --beta-grid 1");
  CHECK(run.status == 0);
  CHECK(contains(run.output, "k = 2\n"));
  CHECK(contains(run.output, "feasible_points = 1 of 1\n"));

  // The single grid point sits at the bandwidth-minimal beta for B=3, where
  // storage d_i * beta is exactly enough, so the scale equals beta.
  const std::vector<std::string> rows = lines_of(slurp(dir / "curve.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == "1,1.00000000000,13/6,2.16666666667,13/6,2.16666666667,1,1,1.00000000000");
}

TEST_CASE("usage problems and help have distinct exit statuses") {
  CHECK(run_cli("").status == 2);                       // a subcommand is required
  CHECK(run_cli("frobnicate").status == 2);             // unknown subcommand
  CHECK(run_cli("capacity").status == 2);               // missing spec path
  CHECK(run_cli("--threads 0 validate x.json").status == 2);

  const RunResult help = run_cli("--help");
  CHECK(help.status == 0);
  CHECK(contains(help.output, "exact capacity analysis"));
}
