// Command-line front end: every subcommand reads one self-describing JSON
// config and writes machine-readable reports. See README for the schema.

#include <CLI11.hpp>
#include <cstdint>
#include <string>
#include <vector>

#include "sobscale/driver.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::string out_dir = ".";
  int jobs = 1;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::vector<std::string> tolerance_pairs;
};

int parse_tolerances(const std::vector<std::string>& pairs,
                     std::vector<std::pair<std::string, double>>& out) {
  for (const auto& pair : pairs) {
    const auto eq = pair.find('=');
    if (eq == std::string::npos || eq == 0) {
      std::fprintf(stderr, "error: --tolerance expects NAME=VALUE, got '%s'\n", pair.c_str());
      return 1;
    }
    try {
      out.emplace_back(pair.substr(0, eq), std::stod(pair.substr(eq + 1)));
    } catch (const std::exception&) {
      std::fprintf(stderr, "error: --tolerance value in '%s' is not a number\n", pair.c_str());
      return 1;
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended Sobolev scale toolkit: ellipticity, solvability and "
               "embedding checks on the torus"};
  app.require_subcommand(1);

  CliArgs args;
  std::string chosen;
  for (const auto& name : sobscale::subcommand_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", args.config_path, "path to the JSON config")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out_dir, "directory for report files (default: .)");
    sub->add_option("--jobs", args.jobs, "number of parallel experiment jobs")
        ->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
           "--seed",
           [&args](const std::uint64_t& v) {
             args.seed = v;
             args.seed_given = true;
           },
           "override the config seed");
    sub->add_option("--tolerance", args.tolerance_pairs,
                    "override a named tolerance, NAME=VALUE (repeatable)");
    sub->callback([&chosen, name]() { chosen = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // usage errors exit 1; --help exits 0
  }

  sobscale::RunOptions opts;
  opts.subcommand = chosen;
  opts.config_path = args.config_path;
  opts.out_dir = args.out_dir;
  opts.jobs = args.jobs;
  if (args.seed_given) opts.seed = args.seed;
  if (parse_tolerances(args.tolerance_pairs, opts.tolerances) != 0) return 1;
  return sobscale::run(opts);
}
