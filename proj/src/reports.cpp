#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "pbe_djm/cli_reports.hpp"
#include "pbe_djm/error.hpp"
#include "pbe_djm/exact_solutions.hpp"
#include "pbe_djm/numerical_oracle.hpp"

namespace pbe {

namespace {

template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::optional<ExactCase> exact_case(const CaseConfig& config) {
  if (config.example_id < 1 || config.example_id > 4) return std::nullopt;
  ExactCase c{config.example_id, std::nullopt};
  if (config.r_value) c.radius = to_double(*config.r_value);
  return c;
}

bool smooth_initial(const ProblemSpec& spec) { return !spec.has_radius; }

std::string problem_comment(const CaseConfig& config) {
  std::ostringstream os;
  os << "case=" << config.case_name << " problem=";
  if (config.example_id != 0)
    os << config.example_id;
  else
    os << "custom k=" << config.selection_power << " initial=" << format_initial(config.initial);
  if (config.r_value) os << " r=" << format_rational(*config.r_value);
  return os.str();
}

std::vector<Rational> sorted_times(const CaseConfig& config) {
  auto ts = config.t_values;
  std::sort(ts.begin(), ts.end());
  return ts;
}

/// Oracle profile at each requested time (ascending advance, one run).
std::vector<std::pair<Rational, GridState>> oracle_profiles(const CaseConfig& config, const ProblemSpec& spec) {
  GridState state = init_grid(to_double(config.oracle_u_max), config.oracle_cells, spec.initial);
  std::vector<std::pair<Rational, GridState>> out;
  for (const auto& t : sorted_times(config)) {
    state = advance(std::move(state), spec, to_double(config.oracle_dt), to_double(t));
    out.emplace_back(t, state);
  }
  return out;
}

const GridState& profile_at(const std::vector<std::pair<Rational, GridState>>& profiles, const Rational& t) {
  for (const auto& [time, state] : profiles)
    if (time == t) return state;
  throw Error(ErrorCode::InvalidArgument, "no oracle profile at t = " + format_rational(t));
}

std::string n_label(unsigned n) { return "n=" + std::to_string(n); }

}  // namespace

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* cap = std::getenv("PBE_DJM_THREADS")) {
    const long v = std::strtol(cap, nullptr, 10);
    if (v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::string CsvTable::to_csv() const {
  std::string out;
  for (const auto& c : comments) out += "# " + c + "\n";
  auto join = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  join(header);
  for (const auto& row : rows) join(row);
  return out;
}

std::vector<CsvTable> run_density(const CaseConfig& config) {
  const ProblemSpec spec = config.problem();
  const unsigned n = config.max_terms();
  const SeriesSolution series = compute_series(spec, n);
  const Expr& phi = series.phi(n);
  const auto exact = exact_case(config);
  const bool with_oracle = !exact && smooth_initial(spec);
  const auto us = config.u_grid();
  const auto ts = config.t_values;

  CsvTable table{"density", {problem_comment(config), "djm_value is Phi_" + std::to_string(n) + ", smooth part"}, {"t", "u", "djm_value"}, {}};
  if (exact) table.header.push_back("exact_value");
  if (with_oracle) table.header.push_back("oracle_value");

  std::vector<std::pair<Rational, GridState>> profiles;
  if (with_oracle && !ts.empty()) profiles = oracle_profiles(config, spec);

  std::vector<std::vector<PointValue>> values(ts.size());
  parallel_for(ts.size(), [&](std::size_t i) { values[i] = evaluate_many(phi, ts[i], us, config.r_value); });

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double t = to_double(ts[i]);
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double u = to_double(us[k]);
      std::vector<std::string> row{format_real(t), format_real(u), format_real(values[i][k].smooth)};
      if (exact) row.push_back(format_real(eval_exact(*exact, t, u).smooth));
      if (with_oracle) row.push_back(format_real(profile_at(profiles, ts[i]).interpolate(u)));
      table.rows.push_back(std::move(row));
    }
  }

  std::vector<CsvTable> out{std::move(table)};
  if (spec.has_radius) {
    CsvTable dirac{"density_dirac", {problem_comment(config), "coefficient of delta(u-r)"}, {"t", "r", "djm_dirac"}, {}};
    if (exact) dirac.header.push_back("exact_dirac");
    const Rational r = *config.r_value;
    for (const auto& t : ts) {
      std::vector<std::string> row{format_real(to_double(t)), format_real(to_double(r)),
                                   format_real(evaluate(phi, t, r, r).dirac_coefficient)};
      if (exact) row.push_back(format_real(eval_exact(*exact, to_double(t), to_double(r)).dirac_coefficient));
      dirac.rows.push_back(std::move(row));
    }
    out.push_back(std::move(dirac));
  }
  return out;
}

std::vector<CsvTable> run_error_table(const CaseConfig& config) {
  const auto exact = exact_case(config);
  if (!exact) throw Error(ErrorCode::NoExactSolution, "error tables need one of the reference problems 1..4");
  const ProblemSpec spec = config.problem();
  const SeriesSolution series = compute_series(spec, config.max_terms());
  const auto us = config.u_grid();
  const auto& ts = config.t_values;
  const auto& ns = config.n_terms;

  std::vector<double> exact_values(ts.size() * us.size());
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t k = 0; k < us.size(); ++k)
      exact_values[i * us.size() + k] = eval_exact(*exact, to_double(ts[i]), to_double(us[k])).smooth;

  std::vector<double> sup(ts.size() * ns.size()), dirac_err(ts.size() * ns.size());
  parallel_for(ts.size() * ns.size(), [&](std::size_t cell) {
    const std::size_t i = cell / ns.size(), j = cell % ns.size();
    const auto values = evaluate_many(series.phi(ns[j]), ts[i], us, config.r_value);
    double worst = 0.0;
    for (std::size_t k = 0; k < us.size(); ++k)
      worst = std::max(worst, std::abs(values[k].smooth - exact_values[i * us.size() + k]));
    sup[cell] = worst;
    if (spec.has_radius) {
      const double r = to_double(*config.r_value);
      const double approx = evaluate(series.phi(ns[j]), ts[i], *config.r_value, config.r_value).dirac_coefficient;
      dirac_err[cell] = std::abs(approx - eval_exact(*exact, to_double(ts[i]), r).dirac_coefficient);
    }
  });

  auto make = [&](std::string name, std::string metric, const std::vector<double>& data) {
    CsvTable table{std::move(name), {problem_comment(config), std::move(metric)}, {"t"}, {}};
    for (unsigned n : ns) table.header.push_back(n_label(n));
    for (std::size_t i = 0; i < ts.size(); ++i) {
      std::vector<std::string> row{format_real(to_double(ts[i]))};
      for (std::size_t j = 0; j < ns.size(); ++j) row.push_back(format_real(data[i * ns.size() + j]));
      table.rows.push_back(std::move(row));
    }
    return table;
  };
  std::vector<CsvTable> out;
  out.push_back(make("error_table",
                     "metric: max over u in [" + format_rational(config.u_min) + ", " + format_rational(config.u_max) +
                         "] step " + format_rational(config.u_step) + " of |Phi_n(t,u) - exact(t,u)|, smooth parts",
                     sup));
  if (spec.has_radius)
    out.push_back(make("error_table_dirac", "metric: |delta coefficient of Phi_n(t) - exact delta coefficient(t)|",
                       dirac_err));
  return out;
}

std::vector<CsvTable> run_moments(const CaseConfig& config) {
  const ProblemSpec spec = config.problem();
  const unsigned n = config.max_terms();
  const SeriesSolution series = compute_series(spec, n);
  const auto exact = exact_case(config);
  const Rational r = config.r_value.value_or(Rational(0));

  std::vector<TPoly> djm, ref;
  for (unsigned j = 0; j <= 2; ++j) {
    djm.push_back(total_moment(series.phi(n), j));
    if (!exact) ref.push_back(total_moment(series.phi(n == 0 ? 0 : n - 1), j));
  }

  CsvTable table{"moments",
                 {problem_comment(config),
                  "djm: moments of Phi_" + std::to_string(n) + "; ref: " +
                      (exact ? std::string("exact solution") : "Phi_" + std::to_string(n == 0 ? 0 : n - 1))},
                 {"t", "mu0_djm", "mu1_djm", "mu2_djm", "mu0_ref", "mu1_ref", "mu2_ref"},
                 {}};
  for (const auto& t : config.t_values) {
    std::vector<std::string> row{format_real(to_double(t))};
    for (unsigned j = 0; j <= 2; ++j) row.push_back(format_real(djm[j].evaluate(t, r)));
    for (unsigned j = 0; j <= 2; ++j)
      row.push_back(format_real(exact ? exact_moment(*exact, j, to_double(t)) : ref[j].evaluate(t, r)));
    table.rows.push_back(std::move(row));
  }
  return {table};
}

std::vector<CsvTable> run_oracle_compare(const CaseConfig& config) {
  const ProblemSpec spec = config.problem();
  if (!smooth_initial(spec)) throw Error(ErrorCode::UnsupportedClass, "oracle comparison needs smooth initial data");
  const unsigned n = config.max_terms();
  const SeriesSolution series = compute_series(spec, n);
  const auto us = config.u_grid();
  const auto& ts = config.t_values;
  const auto profiles = ts.empty() ? std::vector<std::pair<Rational, GridState>>{} : oracle_profiles(config, spec);

  // values[i][j][k]: Phi_j at (t_i, u_k)
  std::vector<std::vector<std::vector<PointValue>>> values(ts.size(), std::vector<std::vector<PointValue>>(n + 1));
  parallel_for(ts.size() * (n + 1), [&](std::size_t cell) {
    const std::size_t i = cell / (n + 1), j = cell % (n + 1);
    values[i][j] = evaluate_many(series.phi(j), ts[i], us);
  });

  const std::string grid = "oracle grid: u_max=" + format_rational(config.oracle_u_max) +
                           " cells=" + std::to_string(config.oracle_cells) + " dt=" + format_rational(config.oracle_dt);
  CsvTable compare{"oracle_compare", {problem_comment(config), grid}, {"t", "u", "djm_n", "oracle", "abs_diff"}, {}};
  CsvTable successive{"successive", {problem_comment(config), "|Phi_j - Phi_" + std::to_string(n) + "|"}, {"t", "u"}, {}};
  for (unsigned j = 0; j < n; ++j) successive.header.push_back("j=" + std::to_string(j));

  for (std::size_t i = 0; i < ts.size(); ++i) {
    const GridState& state = profile_at(profiles, ts[i]);
    const double t = to_double(ts[i]);
    for (std::size_t k = 0; k < us.size(); ++k) {
      const double u = to_double(us[k]);
      const double djm = values[i][n][k].smooth;
      const double oracle = state.interpolate(u);
      compare.rows.push_back({format_real(t), format_real(u), format_real(djm), format_real(oracle),
                              format_real(std::abs(djm - oracle))});
      std::vector<std::string> row{format_real(t), format_real(u)};
      for (unsigned j = 0; j < n; ++j) row.push_back(format_real(std::abs(values[i][j][k].smooth - djm)));
      successive.rows.push_back(std::move(row));
    }
  }
  return {compare, successive};
}

std::vector<CsvTable> run_output(const CaseConfig& config, OutputKind kind) {
  switch (kind) {
    case OutputKind::Density: return run_density(config);
    case OutputKind::ErrorTable: return run_error_table(config);
    case OutputKind::Moments: return run_moments(config);
    case OutputKind::OracleCompare: return run_oracle_compare(config);
  }
  return {};
}

}  // namespace pbe
