#include "pbe_djm/numerical_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbe_djm/error.hpp"

namespace pbe {

namespace {

constexpr double kBlowupLimit = 1e12;

GridState empty_grid(double u_max, std::size_t n_cells) {
  if (!(u_max > 0) || n_cells == 0) throw Error(ErrorCode::InvalidArgument, "grid needs u_max > 0 and n_cells > 0");
  GridState s;
  s.u_max = u_max;
  s.n_cells = n_cells;
  s.nodes.resize(n_cells);
  s.density.assign(n_cells, 0.0);
  const double h = s.cell_width();
  for (std::size_t i = 0; i < n_cells; ++i) s.nodes[i] = (static_cast<double>(i) + 0.5) * h;
  return s;
}

void check_finite(const GridState& s) {
  for (std::size_t i = 0; i < s.density.size(); ++i) {
    const double c = s.density[i];
    if (!std::isfinite(c) || std::abs(c) > kBlowupLimit)
      throw Error(ErrorCode::Blowup, "density " + std::to_string(c) + " at u = " + std::to_string(s.nodes[i]) +
                                         ", t = " + std::to_string(s.time));
  }
}

}  // namespace

double GridState::first_moment() const { return moment(1); }

double GridState::moment(unsigned j) const {
  double sum = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) sum += std::pow(nodes[i], j) * density[i];
  return sum * cell_width();
}

double GridState::interpolate(double u) const {
  if (density.empty()) return 0.0;
  const double h = cell_width();
  const double x = u / h - 0.5;
  if (x <= 0) return density.front();
  const auto i = static_cast<std::size_t>(x);
  if (i + 1 >= density.size()) return density.back();
  const double w = x - static_cast<double>(i);
  return (1 - w) * density[i] + w * density[i + 1];
}

GridState init_grid(double u_max, std::size_t n_cells, const Expr& initial) {
  for (const auto& t : initial.terms())
    if (t.dist != DistFactor::One)
      throw Error(ErrorCode::UnsupportedClass, "grid oracle handles smooth initial data only");
  GridState s = empty_grid(u_max, n_cells);
  std::vector<Rational> us;
  us.reserve(n_cells);
  for (double u : s.nodes) us.emplace_back(u);  // exact binary value of the node
  const auto values = evaluate_many(initial, Rational(0), us);
  for (std::size_t i = 0; i < n_cells; ++i) s.density[i] = values[i].smooth;
  return s;
}

GridState init_grid(double u_max, std::size_t n_cells, const std::function<double(double)>& initial) {
  GridState s = empty_grid(u_max, n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) s.density[i] = initial(s.nodes[i]);
  return s;
}

RateBreakdown rhs_breakdown(const GridState& state, const ProblemSpec& spec) {
  const std::size_t n = state.density.size();
  const double h = state.cell_width();
  const auto& c = state.density;
  const auto& u = state.nodes;
  const int k = static_cast<int>(spec.selection_power);

  RateBreakdown out;
  out.rates.assign(n, 0.0);
  if (n == 0) return out;

  // Breakage.
  std::vector<double> f(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) f[i] = std::pow(u[i], k - 1) * c[i];
  double suffix = 0.0;  // sum_{j>i} f_j
  for (std::size_t i = n; i-- > 0;) {
    const double birth = 2 * h * (suffix + 0.375 * f[i] + 0.125 * f[i + 1]);
    const double death = std::pow(u[i], k) * c[i];
    out.rates[i] = birth - death;
    suffix += f[i];
  }
  // The 1/8 share of the first parent's half cell belongs below the grid; it is
  // dropped, and the 3/8 kept at u_0 overstates that half cell's volume.
  out.lower_leak = h * (0.375 * 2 * h * f[0] * u[0]) - h * (2 * h * 0.5 * f[0] * (h / 4));

  if (spec.aggregation == Aggregation::ConstantUnit) {
    double total = 0.0;
    for (double ci : c) total += ci;
    total *= h;

    std::vector<double> pair_sum(n, 0.0);  // P_s for s < n
    for (std::size_t s = 0; s < n; ++s) {
      double acc = 0.0;
      for (std::size_t a = 0; a <= s; ++a) acc += c[a] * c[s - a];
      pair_sum[s] = acc;
    }
    double inside_mass = 0.0, death_mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double birth = 0.25 * h * (pair_sum[i] + (i > 0 ? pair_sum[i - 1] : 0.0));
      const double death = c[i] * total;
      out.rates[i] += birth - death;
      inside_mass += u[i] * birth;
      death_mass += u[i] * death;
    }
    out.upper_leak = h * (death_mass - inside_mass);
  }
  return out;
}

std::vector<double> rhs(const GridState& state, const ProblemSpec& spec) {
  return rhs_breakdown(state, spec).rates;
}

GridState advance(GridState state, const ProblemSpec& spec, double dt, double t_final) {
  if (!(dt > 0)) throw Error(ErrorCode::InvalidArgument, "dt must be positive");
  if (t_final < state.time) throw Error(ErrorCode::InvalidArgument, "t_final precedes the current time");

  const double mass0 = state.first_moment();
  const double mass_scale = std::abs(mass0) > 0 ? std::abs(mass0) : 1.0;
  state.max_mass_drift = 0.0;
  state.leak_bound = 0.0;

  const std::size_t n = state.density.size();
  GridState stage = state;
  std::vector<double> k1, k2, k3, k4;
  const auto steps = static_cast<std::size_t>(std::ceil((t_final - state.time) / dt - 1e-9));
  const double t0 = state.time;

  for (std::size_t step = 0; step < steps; ++step) {
    const double t_next = step + 1 == steps ? t_final : t0 + static_cast<double>(step + 1) * dt;
    const double tau = t_next - state.time;

    auto eval_at = [&](const std::vector<double>* incr, double w, std::vector<double>& out) {
      for (std::size_t i = 0; i < n; ++i) stage.density[i] = state.density[i] + (incr ? w * (*incr)[i] : 0.0);
      auto b = rhs_breakdown(stage, spec);
      out = std::move(b.rates);
      return std::abs(b.upper_leak) + std::abs(b.lower_leak);
    };
    const double leak1 = eval_at(nullptr, 0.0, k1);
    const double leak2 = eval_at(&k1, tau / 2, k2);
    const double leak3 = eval_at(&k2, tau / 2, k3);
    const double leak4 = eval_at(&k3, tau, k4);
    for (std::size_t i = 0; i < n; ++i)
      state.density[i] += tau / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    state.time = t_next;
    state.leak_bound += tau / 6 * (leak1 + 2 * leak2 + 2 * leak3 + leak4) / mass_scale;

    check_finite(state);
    state.max_mass_drift =
        std::max(state.max_mass_drift, std::abs(state.first_moment() - mass0) / mass_scale);
  }
  return state;
}

}  // namespace pbe
