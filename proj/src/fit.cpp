#include "somp/fit.hpp"

#include "somp/error.hpp"
#include "somp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace somp {

namespace {

struct Candidate {
  double cost = std::numeric_limits<double>::infinity();
  std::size_t a = 0, b = 0, g = 0;
  bool found = false;
};

// Exhaustive search over the (alpha, beta, gamma) nodes of `grid`. Each alpha
// slice is scanned in (beta, gamma) order with strict improvement, and the
// slices are reduced in alpha order, so ties resolve to the lexicographically
// smallest node regardless of scheduling.
Candidate search(const FitDataset& data, const FitGrid& grid, unsigned jobs) {
  const std::size_t rows = data.size();
  std::vector<double> u(rows), v(rows), log_p(rows);
  double max_log_p = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < rows; ++r) {
    const double root_k = std::sqrt(data[r].k_min);
    u[r] = root_k * data[r].snr_min;
    v[r] = root_k * data[r].omega_sigma;
    log_p[r] = std::log(data[r].p_err);
    max_log_p = std::max(max_log_p, log_p[r]);
  }
  // target[g * rows + r] = sqrt(8 (gamma_g - log p_r)) for feasible gamma nodes.
  std::vector<std::size_t> feasible;
  std::vector<double> target;
  for (std::size_t g = 0; g < grid.gamma.points; ++g) {
    const double gamma = grid.gamma.node(g);
    if (gamma < max_log_p) continue;
    feasible.push_back(g);
    for (std::size_t r = 0; r < rows; ++r) target.push_back(std::sqrt(8.0 * (gamma - log_p[r])));
  }
  if (feasible.empty()) throw Error(Errc::NoFeasiblePoint, "no gamma node satisfies gamma >= log p_err");

  std::vector<Candidate> slices(grid.alpha.points);
  parallel_for(grid.alpha.points, jobs, [&](std::size_t a) {
    const double alpha = grid.alpha.node(a);
    std::vector<double> lhs(rows);
    Candidate best;
    for (std::size_t b = 0; b < grid.beta.points; ++b) {
      const double beta = grid.beta.node(b);
      for (std::size_t r = 0; r < rows; ++r) lhs[r] = alpha * u[r] - beta * v[r];
      for (std::size_t f = 0; f < feasible.size(); ++f) {
        const double* t = target.data() + f * rows;
        double cost = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          const double d = lhs[r] - t[r];
          cost += d * d;
        }
        if (cost < best.cost) best = Candidate{cost, a, b, feasible[f], true};
      }
    }
    slices[a] = best;
  });
  Candidate best;
  for (const Candidate& c : slices) {
    if (c.found && c.cost < best.cost) best = c;
  }
  if (!best.found) throw Error(Errc::NoFeasiblePoint, "cost is not finite at any grid node");
  return best;
}

void validate_axis(const GridAxis& axis, const char* name) {
  if (axis.points < 1 || !std::isfinite(axis.lo) || !std::isfinite(axis.hi) || axis.hi < axis.lo ||
      (axis.points == 1 && axis.hi != axis.lo)) {
    throw Error(Errc::InvalidArgument, std::string("invalid ") + name + " grid axis");
  }
}

GridAxis refine(const GridAxis& coarse, std::size_t index, std::size_t points) {
  const double step = coarse.step();
  GridAxis out;
  out.lo = std::max(coarse.lo, coarse.node(index) - step);
  out.hi = std::min(coarse.hi, coarse.node(index) + step);
  out.points = out.hi > out.lo ? points : 1;
  return out;
}

}  // namespace

void validate(const FitDataset& dataset) {
  for (std::size_t r = 0; r < dataset.size(); ++r) {
    const FitRow& row = dataset[r];
    const std::string where = "fit dataset row " + std::to_string(r) + ": ";
    if (!(row.p_err > 0.0 && row.p_err < 1.0)) throw Error(Errc::InvalidArgument, where + "p_err must lie in (0,1)");
    if (!std::isfinite(row.snr_min)) throw Error(Errc::InvalidArgument, where + "snr_min must be finite");
    if (!std::isfinite(row.omega_sigma)) throw Error(Errc::InvalidArgument, where + "omega_sigma must be finite");
    if (!(row.k_min >= 1.0) || !std::isfinite(row.k_min)) {
      throw Error(Errc::InvalidArgument, where + "k_min must be finite and >= 1");
    }
  }
}

double GridAxis::step() const {
  return points > 1 ? (hi - lo) / static_cast<double>(points - 1) : 0.0;
}

double GridAxis::node(std::size_t i) const {
  if (i + 1 == points) return hi;  // exact endpoint
  return lo + static_cast<double>(i) * step();
}

FitGrid FitGrid::paper_default() {
  FitGrid grid;
  grid.alpha = GridAxis{0.1, 1.4, 500};
  grid.beta = GridAxis{0.0, std::sqrt(2.0 / std::numbers::pi), 500};
  grid.gamma = GridAxis{0.0, 5.0, 500};
  return grid;
}

double fit_cost(const FitParams& params, const FitDataset& dataset) {
  double cost = 0.0;
  for (const FitRow& row : dataset) {
    const double slack = params.gamma - std::log(row.p_err);
    if (slack < 0.0) throw Error(Errc::InfeasibleGamma, "gamma < log p_err makes the cost undefined");
    const double d = std::sqrt(row.k_min) * (params.alpha * row.snr_min - params.beta * row.omega_sigma) -
                     std::sqrt(8.0 * slack);
    cost += d * d;
  }
  return cost;
}

FitResult grid_fit(const FitDataset& dataset, const FitGrid& grid, unsigned jobs) {
  if (dataset.empty()) throw Error(Errc::InvalidArgument, "cannot fit an empty dataset");
  validate(dataset);
  validate_axis(grid.alpha, "alpha");
  validate_axis(grid.beta, "beta");
  validate_axis(grid.gamma, "gamma");

  FitResult result;
  result.grid = grid;
  Candidate best;
  FitGrid searched = grid;
  if (grid.mode == FitMode::Full) {
    best = search(dataset, grid, jobs);
  } else {
    if (grid.coarse_points < 2) throw Error(Errc::InvalidArgument, "coarse-to-fine needs >= 2 points per stage");
    FitGrid coarse = grid;
    for (GridAxis* axis : {&coarse.alpha, &coarse.beta, &coarse.gamma}) {
      if (axis->points > 1) axis->points = grid.coarse_points;
    }
    const Candidate first = search(dataset, coarse, jobs);
    searched.alpha = refine(coarse.alpha, first.a, grid.coarse_points);
    searched.beta = refine(coarse.beta, first.b, grid.coarse_points);
    searched.gamma = refine(coarse.gamma, first.g, grid.coarse_points);
    best = search(dataset, searched, jobs);
    result.refined_stage = searched;
  }
  result.params = FitParams{searched.alpha.node(best.a), searched.beta.node(best.b), searched.gamma.node(best.g)};
  result.cost = fit_cost(result.params, dataset);
  return result;
}

double predict_kmin(const FitParams& params, double snr_min, double omega_sigma, double p_err) {
  if (!(p_err > 0.0 && p_err <= 1.0)) throw Error(Errc::InvalidArgument, "p_err must lie in (0,1]");
  const double margin = params.alpha * snr_min - params.beta * omega_sigma;
  if (!(margin > 0.0)) {
    throw Error(Errc::BelowSnrFloor, "alpha * SNR must exceed beta * omega_sigma");
  }
  const double slack = params.gamma - std::log(p_err);
  if (slack < 0.0) throw Error(Errc::InfeasibleGamma, "gamma < log p_err");
  return 8.0 / (margin * margin) * slack;
}

std::string to_string(FitMode mode) {
  return mode == FitMode::Full ? "full" : "coarse_to_fine";
}

}  // namespace somp
