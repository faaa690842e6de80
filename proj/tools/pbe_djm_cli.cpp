// Command-line front end: runs the series/exact/oracle reports for a case file
// (or a reference problem) and writes one CSV per table into --out.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pbe_djm/cli_reports.hpp"
#include "pbe_djm/error.hpp"

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_path;
  int example = 0;
  std::string out_dir = ".";
};

void add_common(CLI::App* cmd, Options& opts) {
  auto* config = cmd->add_option("--config", opts.config_path, "case file (key = value lines)");
  auto* example = cmd->add_option("--example", opts.example, "use the canonical case of reference problem 1..6")
                      ->check(CLI::Range(1, 6));
  config->excludes(example);
  cmd->add_option("--out", opts.out_dir, "output directory")->capture_default_str();
}

pbe::CaseConfig resolve(const Options& opts) {
  if (!opts.config_path.empty()) return pbe::load_config(opts.config_path);
  if (opts.example != 0) return pbe::canonical_config(opts.example);
  throw pbe::Error(pbe::ErrorCode::InvalidConfig, "one of --config or --example is required");
}

int run(const Options& opts, const std::vector<pbe::OutputKind>& kinds) {
  const pbe::CaseConfig config = resolve(opts);
  fs::create_directories(opts.out_dir);
  int status = 0;
  for (auto kind : kinds) {
    try {
      for (const auto& table : pbe::run_output(config, kind)) {
        const fs::path path = fs::path(opts.out_dir) / (config.case_name + "_" + table.name + ".csv");
        std::ofstream out(path, std::ios::binary);
        out << table.to_csv();
        if (!out) throw pbe::Error(pbe::ErrorCode::InvalidArgument, "cannot write " + path.string());
        std::cout << "wrote " << path.string() << '\n';
      }
    } catch (const pbe::Error& e) {
      std::cerr << pbe::to_string(kind) << ": " << e.what() << '\n';
      status = 1;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Daftardar-Jafari series solutions of breakage and aggregation-breakage equations"};
  app.require_subcommand(1);

  Options opts;
  auto* density = app.add_subcommand("density", "number density profiles");
  auto* error_table = app.add_subcommand("error-table", "sup-norm error against the exact solution");
  auto* moments = app.add_subcommand("moments", "moments mu_0..mu_2 of the truncated series");
  auto* oracle = app.add_subcommand("oracle-compare", "series against the grid oracle, successive truncations");
  auto* all = app.add_subcommand("all", "every output listed in the case file");
  auto* emit = app.add_subcommand("emit-config", "print the canonical case file of a reference problem");
  for (auto* cmd : {density, error_table, moments, oracle, all}) add_common(cmd, opts);
  emit->add_option("--example", opts.example, "reference problem 1..6")->required()->check(CLI::Range(1, 6));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*emit) {
      std::cout << pbe::emit_config(pbe::canonical_config(opts.example));
      return 0;
    }
    if (*density) return run(opts, {pbe::OutputKind::Density});
    if (*error_table) return run(opts, {pbe::OutputKind::ErrorTable});
    if (*moments) return run(opts, {pbe::OutputKind::Moments});
    if (*oracle) return run(opts, {pbe::OutputKind::OracleCompare});
    const auto config = resolve(opts);
    return run(opts, config.outputs);
  } catch (const pbe::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
