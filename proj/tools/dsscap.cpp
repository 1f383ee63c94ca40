#include <CLI11.hpp>

#include "dsscap/capacity.hpp"
#include "dsscap/floworacle.hpp"
#include "dsscap/model.hpp"
#include "dsscap/rational.hpp"
#include "dsscap/tradeoff.hpp"

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace {

constexpr int kExitOk = 0;        // analysis succeeded
constexpr int kExitNegative = 1;  // ran fine, but the answer is "no"
constexpr int kExitUsage = 2;     // unusable input or flags

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char byte : data) {
    hash ^= byte;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string digest_of(std::string_view data) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(data)));
  return buf;
}

std::string both(const dsscap::Rational& r) {
  return dsscap::format_rational(r) + " (" + dsscap::format_decimal(r) + ")";
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct LoadedSpec {
  dsscap::DssSpec spec;
  std::string text;
};

/// Reads and parses a system description, printing the report header on
/// success. Parse problems go to stderr and yield nullopt.
std::optional<LoadedSpec> load_spec(const std::string& command, const std::string& path) {
  const auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  LoadedSpec loaded;
  loaded.text = *text;
  try {
    loaded.spec = dsscap::parse_spec(loaded.text);
  } catch (const dsscap::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return std::nullopt;
  }
  std::cout << "command: " << command << "\n";
  std::cout << "input: " << path << "\n";
  std::cout << "digest: " << digest_of(loaded.text) << "\n";
  return loaded;
}

/// Analysis commands accept a system whose only flaw is a zero download
/// unit (the degenerate capacity-0 case); anything else is an input error.
bool pass_validation(const dsscap::DssSpec& spec) {
  const auto report = dsscap::validate_spec(spec);
  if (report.ok) return true;
  bool only_zero_beta = spec.beta == 0;
  for (const auto& v : report.violations)
    if (v.rule != "beta-positive") only_zero_beta = false;
  if (only_zero_beta) {
    std::cout << "warning: beta-positive: download unit is 0, so every repair "
                 "moves nothing and the capacity is 0\n";
    return true;
  }
  for (const auto& v : report.violations)
    std::cerr << "violation: " << v.rule << ": " << v.detail << "\n";
  return false;
}

int cmd_validate(const std::string& path) {
  const auto loaded = load_spec("validate", path);
  if (!loaded) return kExitUsage;
  const auto report = dsscap::validate_spec(loaded->spec);
  for (const auto& v : report.violations)
    std::cout << "violation: " << v.rule << ": " << v.detail << "\n";
  std::cout << "violations: " << report.violations.size() << "\n";
  std::cout << (report.ok ? "ok\n" : "invalid\n");
  return report.ok ? kExitOk : kExitNegative;
}

int cmd_capacity(const std::string& path, bool oracle, const dsscap::SearchOptions& options) {
  const auto loaded = load_spec("capacity", path);
  if (!loaded) return kExitUsage;
  const dsscap::DssSpec& spec = loaded->spec;
  if (oracle && spec.n > 6) {
    std::cerr << "error: --oracle solves a max-flow per surviving sequence and is "
                 "limited to n <= 6 (got n = "
              << spec.n << "); rerun without --oracle\n";
    return kExitUsage;
  }
  if (!pass_validation(spec)) return kExitUsage;

  const dsscap::CapacityResult result = dsscap::capacity(spec, options);
  std::cout << "capacity = " << both(result.capacity) << "\n";
  std::cout << "argmin = " << dsscap::format_sequence(result.argmin_sequence) << "\n";
  for (std::size_t j = 0; j < result.argmin_terms.terms.size(); ++j) {
    const auto& term = result.argmin_terms.terms[j];
    std::cout << "term " << j + 1 << ": min(storage " << dsscap::format_rational(term.storage)
              << ", download " << dsscap::format_rational(term.bandwidth) << ") = "
              << dsscap::format_rational(std::min(term.storage, term.bandwidth)) << "\n";
  }
  std::cout << "sequences_examined: " << result.sequences_examined << "\n";

  if (oracle) {
    const dsscap::Rational flow = dsscap::capacity_via_flow(spec);
    if (flow != result.capacity) {
      std::cout << "oracle: DISAGREES, minimum flow " << both(flow) << "\n";
      return kExitNegative;
    }
    std::cout << "oracle: minimum flow " << both(flow) << " matches\n";
  }
  return kExitOk;
}

int cmd_points(const std::string& path, const std::string& file_size_text,
               const dsscap::SearchOptions& options) {
  dsscap::Rational file_size;
  try {
    file_size = dsscap::parse_rational(file_size_text);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: --B: " << e.what() << "\n";
    return kExitUsage;
  }
  if (file_size <= 0) {
    std::cerr << "error: --B: file size must be > 0\n";
    return kExitUsage;
  }
  const auto loaded = load_spec("points", path);
  if (!loaded) return kExitUsage;
  const dsscap::DssSpec& spec = loaded->spec;
  if (!pass_validation(spec)) return kExitUsage;
  std::cout << "file_size = " << both(file_size) << "\n";

  dsscap::MsrPoint msr;
  dsscap::MbrPoint mbr;
  try {
    msr = dsscap::msr_point(spec, file_size, options);
    mbr = dsscap::mbr_point(spec, file_size, options);
  } catch (const std::domain_error& e) {
    std::cout << "no operating point: " << e.what() << "\n";
    return kExitNegative;
  }

  const dsscap::StarSequence star = dsscap::star_sequence(spec, options);
  std::cout << "star: sequence = " << dsscap::format_sequence(star.sequence) << "\n";
  std::cout << "star: fresh helpers per position =";
  for (int size : star.term_sizes) std::cout << " " << size;
  std::cout << " (sum " << star.size_sum << ", min " << star.size_min << ")\n";

  std::cout << "msr: beta_max = " << both(msr.beta_max) << "\n";
  std::cout << "msr: allocation rule " << msr.allocation_rule << "\n";
  for (std::size_t i = 0; i < msr.alpha.size(); ++i)
    std::cout << "msr: alpha[U" << i + 1 << "] = " << both(msr.alpha[i]) << "\n";
  // The theory sorts the storage of the sequence's nodes; that ordering is
  // shown rather than enforced.
  std::cout << "msr: alpha along the star sequence =";
  for (const auto& entry : star.sequence.entries)
    std::cout << " " << dsscap::format_rational(msr.alpha[entry.node_id - 1]);
  std::cout << "\n";
  const dsscap::Rational msr_capacity =
      dsscap::capacity(dsscap::with_parameters(spec, msr.alpha, msr.beta_max), options)
          .capacity;
  if (msr_capacity < file_size) {
    std::cout << "note: capacity under the minimum-storage allocation is "
              << both(msr_capacity) << ", short of the file size "
              << dsscap::format_rational(file_size)
              << "; the bound holds but this allocation does not serve every "
                 "collector\n";
  }

  std::cout << "mbr: beta = " << both(mbr.beta) << "\n";
  for (std::size_t i = 0; i < mbr.alpha.size(); ++i)
    std::cout << "mbr: alpha[U" << i + 1 << "] = " << both(mbr.alpha[i]) << "\n";
  const dsscap::Rational mbr_capacity =
      dsscap::capacity(dsscap::with_parameters(spec, mbr.alpha, mbr.beta), options).capacity;
  std::cout << "mbr: capacity check = " << both(mbr_capacity)
            << (mbr_capacity == file_size ? ", equals the file size\n"
                                          : ", DOES NOT equal the file size\n");
  return mbr_capacity == file_size ? kExitOk : kExitNegative;
}

std::filesystem::path resolve_output(const std::string& name) {
  std::filesystem::path path(name);
  if (path.is_relative()) {
    if (const char* dir = std::getenv("DSSCAP_OUTPUT_DIR")) path = std::filesystem::path(dir) / path;
  }
  return path;
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path.string() << "'\n";
    return false;
  }
  out << content;
  return static_cast<bool>(out);
}

struct TradeoffArgs {
  std::string spec_path;
  std::string profile_text;
  int k = 0;
  std::string file_size_text;
  std::string grid_text;
  std::string output = "curve.csv";
  int homogeneous_d = 0;
  std::string homogeneous_output = "homogeneous.csv";
};

int cmd_tradeoff(const TradeoffArgs& args, const dsscap::SearchOptions& options) {
  const bool from_spec = !args.spec_path.empty();
  if (from_spec == !args.profile_text.empty()) {
    std::cerr << "error: give either a system file or --profile, not both\n";
    return kExitUsage;
  }

  std::vector<int> profile;
  int k = args.k;
  if (from_spec) {
    const auto loaded = load_spec("tradeoff", args.spec_path);
    if (!loaded) return kExitUsage;
    if (!pass_validation(loaded->spec)) return kExitUsage;
    for (const auto& node : loaded->spec.nodes) profile.push_back(node.repair_degree());
    if (k == 0) k = loaded->spec.k;
  } else {
    std::stringstream stream(args.profile_text);
    std::string item;
    while (std::getline(stream, item, ':')) {
      try {
        std::size_t used = 0;
        const int degree = std::stoi(item, &used);
        if (used != item.size() || degree < 1) throw std::invalid_argument(item);
        profile.push_back(degree);
      } catch (const std::exception&) {
        std::cerr << "error: --profile: '" << item << "' is not a positive integer\n";
        return kExitUsage;
      }
    }
    if (k == 0) {
      std::cerr << "error: --k is required with --profile\n";
      return kExitUsage;
    }
    std::cout << "command: tradeoff\n";
    std::cout << "input: profile " << args.profile_text << "\n";
    std::cout << "digest: " << digest_of(args.profile_text) << "\n";
  }
  // The curve model always repairs from any degree-sized helper set.
  std::cout << "helper sets: all degree-sized subsets\n";
  std::cout << "k = " << k << "\n";

  dsscap::Rational file_size;
  std::vector<dsscap::Rational> betas;
  try {
    file_size = dsscap::parse_rational(args.file_size_text);
    std::stringstream stream(args.grid_text);
    std::string item;
    while (std::getline(stream, item, ',')) betas.push_back(dsscap::parse_rational(item));
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  std::cout << "file_size = " << both(file_size) << "\n";
  std::cout << "beta_grid = " << betas.size() << " values\n";

  std::vector<dsscap::TradeoffPoint> curve;
  std::vector<dsscap::TradeoffPoint> comparator;
  try {
    curve = dsscap::tradeoff_curve(profile, k, file_size, betas, options);
    if (args.homogeneous_d > 0)
      comparator = dsscap::homogeneous_curve(static_cast<int>(profile.size()), k,
                                             args.homogeneous_d, file_size, betas);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  const auto curve_path = resolve_output(args.output);
  if (!write_file(curve_path, dsscap::curve_to_csv(curve))) return kExitUsage;
  std::cout << "curve_csv = " << curve_path.string() << "\n";
  if (args.homogeneous_d > 0) {
    const auto comparator_path = resolve_output(args.homogeneous_output);
    if (!write_file(comparator_path, dsscap::curve_to_csv(comparator))) return kExitUsage;
    std::cout << "homogeneous_csv = " << comparator_path.string() << "\n";
  }

  std::size_t feasible = 0;
  for (const auto& point : curve) feasible += point.feasible ? 1 : 0;
  std::cout << "feasible_points = " << feasible << " of " << curve.size() << "\n";
  if (feasible == 0) {
    std::cout << "error: no grid point is feasible: at every requested download "
                 "unit the repairs deliver less than the file size even with "
                 "unlimited storage\n";
    return kExitNegative;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  const auto start = std::chrono::steady_clock::now();

  CLI::App app{"exact capacity analysis for heterogeneous distributed storage"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads,
                 "worker threads; results are identical for every count")
      ->check(CLI::PositiveNumber);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "check a system description");
  validate->add_option("spec", validate_path, "system description (json)")->required();

  std::string capacity_path;
  bool oracle = false;
  auto* capacity = app.add_subcommand("capacity", "exact capacity with a minimizing witness");
  capacity->add_option("spec", capacity_path, "system description (json)")->required();
  capacity->add_flag("--oracle", oracle,
                     "cross-check every sequence against a max-flow (n <= 6)");

  std::string points_path, points_file_size;
  auto* points = app.add_subcommand("points", "extremal storage and bandwidth settings");
  points->add_option("spec", points_path, "system description (json)")->required();
  points->add_option("--B", points_file_size, "file size, as integer or p/q")->required();

  TradeoffArgs tradeoff;
  auto* tradeoff_cmd =
      app.add_subcommand("tradeoff", "storage-bandwidth curve over a beta grid (csv)");
  tradeoff_cmd->add_option("spec", tradeoff.spec_path, "system description (degrees are used)");
  tradeoff_cmd->add_option("--profile", tradeoff.profile_text,
                           "colon-separated repair degrees, e.g. 4:4:5:5:5:6:6");
  tradeoff_cmd->add_option("--k", tradeoff.k, "reconstruction degree");
  tradeoff_cmd->add_option("--B", tradeoff.file_size_text, "file size, as integer or p/q")
      ->required();
  tradeoff_cmd->add_option("--beta-grid", tradeoff.grid_text,
                           "comma-separated download units, e.g. 1/18,1/12,1/6")
      ->required();
  tradeoff_cmd->add_option("--output", tradeoff.output,
                           "curve csv path, relative to DSSCAP_OUTPUT_DIR when set");
  tradeoff_cmd->add_option("--homogeneous-d", tradeoff.homogeneous_d,
                           "also emit the uniform comparator curve for this degree");
  tradeoff_cmd->add_option("--homogeneous-output", tradeoff.homogeneous_output,
                           "comparator csv path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const dsscap::SearchOptions options{threads, true};
  int code = kExitUsage;
  try {
    if (validate->parsed()) code = cmd_validate(validate_path);
    if (capacity->parsed()) code = cmd_capacity(capacity_path, oracle, options);
    if (points->parsed()) code = cmd_points(points_path, points_file_size, options);
    if (tradeoff_cmd->parsed()) code = cmd_tradeoff(tradeoff, options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    code = kExitUsage;
  }

  const auto elapsed = std::chrono::steady_clock::now() - start;
  std::cout << "timing_ms: "
            << std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count() << "\n";
  return code;
}
