#pragma once

// Batch reports behind the density profiles, error tables, moment curves and
// oracle comparisons. A case is described by a flat `key = value` file:
//
//   # comment
//   case_name = example1
//   problem   = 1                     # 1..6, or custom(k=2, aggregation=none, initial=exp(-u))
//   n_terms   = 10                    # repeated keys (or commas) form lists
//   n_terms   = 15
//   t_values  = 0.4
//   u_min     = 0.01
//   u_max     = 10
//   u_step    = 0.01
//   r_value   = 1                     # only for delta initial data
//   outputs   = density
//   outputs   = error_table
//
// Optional oracle grid keys: oracle_u_max, oracle_cells, oracle_dt.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pbe_djm/djm_engine.hpp"

namespace pbe {

enum class OutputKind { Density, ErrorTable, Moments, OracleCompare };

std::string_view to_string(OutputKind kind);
std::optional<OutputKind> parse_output_kind(std::string_view text);

struct CaseConfig {
  std::string case_name = "case";
  int example_id = 0;  // 0 means custom problem
  unsigned selection_power = 1;
  Aggregation aggregation = Aggregation::None;
  Expr initial;
  std::vector<unsigned> n_terms;
  std::vector<Rational> t_values;
  Rational u_min{1, 100};
  Rational u_max{10};
  Rational u_step{1, 100};
  std::optional<Rational> r_value;
  std::vector<OutputKind> outputs;

  Rational oracle_u_max{20};
  unsigned oracle_cells = 2000;
  Rational oracle_dt{1, 1000};

  ProblemSpec problem() const;
  std::vector<Rational> u_grid() const;
  /// Largest entry of n_terms; the order used for density, moments and oracle runs.
  unsigned max_terms() const;

  friend bool operator==(const CaseConfig&, const CaseConfig&) = default;
};

/// Parses the key = value format. Errors carry the line number and key.
CaseConfig parse_config(std::string_view text);
CaseConfig load_config(const std::string& path);
std::string emit_config(const CaseConfig& config);

/// Canonical case for reference problem 1..6.
CaseConfig canonical_config(int example_id);

/// Initial data grammar: sums of [coeff*]u^b*exp(-rate*u), delta(u-r), theta(r-u).
Expr parse_initial(std::string_view text);
std::string format_initial(const Expr& e);

struct CsvTable {
  std::string name;                   // file suffix, e.g. "density"
  std::vector<std::string> comments;  // emitted as leading "# ..." lines
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

/// Scientific notation, 17 significant digits.
std::string format_real(double x);

std::vector<CsvTable> run_density(const CaseConfig& config);
std::vector<CsvTable> run_error_table(const CaseConfig& config);
std::vector<CsvTable> run_moments(const CaseConfig& config);
std::vector<CsvTable> run_oracle_compare(const CaseConfig& config);
std::vector<CsvTable> run_output(const CaseConfig& config, OutputKind kind);

/// Worker count for independent cells: hardware concurrency, capped by the
/// PBE_DJM_THREADS environment variable when set.
unsigned worker_count();

}  // namespace pbe
