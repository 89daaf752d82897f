#include "gpf/norm_est.hpp"

#include "gpf/errors.hpp"
#include "gpf/rng.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <thread>
#include <vector>

namespace gpf {

std::string_view to_string(BoundKind kind) noexcept {
  return kind == BoundKind::Sup ? "sup" : "inf";
}

std::string_view to_string(EstimateMethod method) noexcept {
  switch (method) {
    case EstimateMethod::ExactP2:
      return "exact-p2";
    case EstimateMethod::GradientRestarts:
      return "gradient-restarts";
    case EstimateMethod::GridOracle:
      return "grid-oracle";
  }
  return "unknown";
}

namespace {

struct RestartResult {
  double value = 0.0;
  Vector x;
  int iterations = 0;
  bool converged = false;
};

// Runs fn(i) for i in [0, count). Results land in index order, so the outcome
// does not depend on how the work was scheduled.
template <typename Fn>
std::vector<RestartResult> run_indexed(int count, Fn&& fn) {
  std::vector<RestartResult> results(static_cast<std::size_t>(count));
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int workers = static_cast<int>(std::min<unsigned>(hw, static_cast<unsigned>(count)));
  if (workers <= 1 || count < 4) {
    for (int i = 0; i < count; ++i) results[static_cast<std::size_t>(i)] = fn(i);
    return results;
  }
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < count; i += workers) results[static_cast<std::size_t>(i)] = fn(i);
    });
  }
  pool.clear();
  return results;
}

Vector random_sphere_point(int dim, double p, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  Vector x(dim);
  do {
    for (int k = 0; k < dim; ++k) x[k] = rng.generalized_gaussian(p);
  } while (x.cwiseAbs().maxCoeff() == 0.0);
  return x / p_norm(x, p);
}

RestartResult ascend(const HomogeneousObjective& phi, Vector x, double p,
                     const EstimatorOptions& opt) {
  RestartResult out;
  x /= p_norm(x, p);
  Vector grad_phi;
  double value = phi(x, &grad_phi);
  std::deque<double> history{value};
  double step = 1.0;
  int it = 0;
  bool converged = false;
  Vector y;
  Vector grad_y;
  for (; it < opt.max_iterations; ++it) {
    // Gradient of phi(x) / ||x||_p at a unit x.
    const Vector grad = grad_phi - value * duality_map(x, p);
    const double g2 = grad.squaredNorm();
    if (!(g2 > 1e-30 * (1.0 + value * value))) {
      converged = true;
      break;
    }
    bool accepted = false;
    double t = step;
    double vy = 0.0;
    for (int k = 0; k < 80; ++k, t *= 0.5) {
      y = x + t * grad;
      const double ny = p_norm(y, p);
      if (ny == 0.0) continue;
      y /= ny;
      vy = phi(y, &grad_y);
      if (vy >= value + opt.armijo * t * g2) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      converged = true;
      break;
    }
    x.swap(y);
    grad_phi.swap(grad_y);
    value = vy;
    step = std::min(2.0 * t, 1e8);
    history.push_back(value);
    if (static_cast<int>(history.size()) > opt.stall_window) {
      const double gain = value - history.front();
      history.pop_front();
      if (gain <= opt.stall_tolerance * std::max(std::abs(value), 1e-300)) {
        converged = true;
        ++it;
        break;
      }
    }
  }
  out.value = value;
  out.x = std::move(x);
  out.iterations = it;
  out.converged = converged;
  return out;
}

// phi(x) = sign * ||M x||_b with its gradient sign * M^T J_b(M x).
HomogeneousObjective norm_objective(const Matrix& m, double codomain_p, double sign) {
  return [&m, codomain_p, sign](const Vector& x, Vector* gradient) {
    const Vector y = m * x;
    const double ny = p_norm(y, codomain_p);
    if (gradient) {
      if (ny > 0.0)
        *gradient = sign * (m.transpose() * duality_map(y, codomain_p));
      else
        *gradient = Vector::Zero(x.size());
    }
    return sign * ny;
  };
}

double ratio_at(const Matrix& m, const Vector& x, double domain_p, double codomain_p) {
  const double nx = p_norm(x, domain_p);
  return nx == 0.0 ? 0.0 : p_norm(m * x, codomain_p) / nx;
}

void check_exponent(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw DomainError("exponent must satisfy 1 < p < inf");
}

void check_restarts(const EstimatorOptions& opt) {
  if (opt.restarts < 1) throw ContractError("estimator needs at least one restart");
}

}  // namespace

BoundEstimate maximize_on_sphere(const HomogeneousObjective& phi, int dim, double p,
                                 const EstimatorOptions& options) {
  check_exponent(p);
  check_restarts(options);
  if (dim < 1) throw DimensionError("sphere dimension must be >= 1");
  auto results = run_indexed(options.restarts, [&](int i) {
    return ascend(phi, random_sphere_point(dim, p, options.seed, static_cast<std::uint64_t>(i)), p,
                  options);
  });
  int best = 0;
  for (int i = 1; i < options.restarts; ++i)
    if (results[static_cast<std::size_t>(i)].value > results[static_cast<std::size_t>(best)].value)
      best = i;
  auto& winner = results[static_cast<std::size_t>(best)];
  BoundEstimate est;
  est.witness = winner.x;
  est.value = phi(winner.x, nullptr);
  est.kind = BoundKind::Sup;
  est.method = EstimateMethod::GradientRestarts;
  est.certified = false;
  est.restarts = options.restarts;
  est.seed = options.seed;
  est.best_restart = best;
  est.iterations = winner.iterations;
  est.converged = winner.converged;
  return est;
}

BoundEstimate sup_ratio(const LinOp& m, double domain_p, double codomain_p,
                        const EstimatorOptions& options) {
  check_exponent(domain_p);
  check_exponent(codomain_p);
  const Matrix& a = m.matrix();
  auto est = maximize_on_sphere(norm_objective(a, codomain_p, 1.0), m.cols(), domain_p, options);
  est.value = ratio_at(a, est.witness, domain_p, codomain_p);
  est.kind = BoundKind::Sup;
  return est;
}

BoundEstimate inf_ratio(const LinOp& m, double domain_p, double codomain_p,
                        const EstimatorOptions& options) {
  check_exponent(domain_p);
  check_exponent(codomain_p);
  check_restarts(options);
  const Matrix& a = m.matrix();
  if (numerical_rank(m, options.rank_tolerance) < m.cols()) {
    BoundEstimate est;
    Vector w = smallest_right_singular_vector(m);
    est.witness = w / p_norm(w, domain_p);
    est.value = ratio_at(a, est.witness, domain_p, codomain_p);
    est.kind = BoundKind::Inf;
    est.method = EstimateMethod::GradientRestarts;
    est.restarts = options.restarts;
    est.seed = options.seed;
    est.kernel_detected = true;
    return est;
  }
  auto est = maximize_on_sphere(norm_objective(a, codomain_p, -1.0), m.cols(), domain_p, options);
  est.value = ratio_at(a, est.witness, domain_p, codomain_p);
  est.kind = BoundKind::Inf;
  return est;
}

LinOp materialize(const BlockMap& map, int dim, std::uint64_t seed, double* codomain_p) {
  if (dim < 1) throw DimensionError("map domain dimension must be >= 1");
  const MixedSeq probe = map(Vector::Zero(dim));
  const std::vector<int> dims = probe.block_dims();
  const int rows = probe.total_dim();
  if (codomain_p) *codomain_p = probe.p();
  if (rows == 0) throw ContractError("map has an empty codomain");
  if (p_norm(probe.flatten(), 2.0) != 0.0) throw ContractError("map is not linear: f = 0 maps to nonzero");

  auto eval = [&](const Vector& f) {
    const MixedSeq s = map(f);
    if (s.block_dims() != dims) throw ContractError("map changed its block shape between calls");
    return s.flatten();
  };

  Matrix a(rows, dim);
  for (int k = 0; k < dim; ++k) a.col(k) = eval(Vector::Unit(dim, k));

  CounterRng rng(seed, 0x6c696e6561720000ULL);
  for (int trial = 0; trial < 3; ++trial) {
    Vector x(dim), y(dim);
    for (int k = 0; k < dim; ++k) {
      x[k] = rng.normal();
      y[k] = rng.normal();
    }
    const double alpha = rng.normal();
    const double beta = rng.normal();
    const Vector fx = eval(x);
    const Vector fy = eval(y);
    const Vector combo = eval(alpha * x + beta * y);
    const double residual = (combo - alpha * fx - beta * fy).norm();
    const double scale = 1.0 + std::abs(alpha) * fx.norm() + std::abs(beta) * fy.norm();
    if (residual > 1e-9 * scale) throw ContractError("map is not linear (spot check failed)");
    if ((a * x - fx).norm() > 1e-9 * (1.0 + fx.norm()))
      throw ContractError("map is not linear (basis expansion mismatch)");
  }
  return LinOp(std::move(a));
}

BoundEstimate sup_ratio(const BlockMap& map, int dim, double p, const EstimatorOptions& options) {
  double codomain_p = p;
  const LinOp m = materialize(map, dim, options.seed, &codomain_p);
  return sup_ratio(m, p, codomain_p, options);
}

BoundEstimate inf_ratio(const BlockMap& map, int dim, double p, const EstimatorOptions& options) {
  double codomain_p = p;
  const LinOp m = materialize(map, dim, options.seed, &codomain_p);
  return inf_ratio(m, p, codomain_p, options);
}

ExactBounds p2_exact_bounds(const LinOp& stacked) {
  const Vector s = singular_values(stacked);
  ExactBounds b;
  b.upper = s.size() ? s[0] : 0.0;
  b.lower = stacked.rows() < stacked.cols() ? 0.0 : s[s.size() - 1];
  return b;
}

BoundEstimate exact_p2_sup(const LinOp& m) {
  Eigen::JacobiSVD<Matrix> svd(m.matrix(), Eigen::ComputeFullV);
  BoundEstimate est;
  est.witness = svd.matrixV().col(0);
  est.value = ratio_at(m.matrix(), est.witness, 2.0, 2.0);
  est.kind = BoundKind::Sup;
  est.method = EstimateMethod::ExactP2;
  est.certified = true;
  return est;
}

BoundEstimate exact_p2_inf(const LinOp& m, double rank_tolerance) {
  BoundEstimate est;
  est.witness = smallest_right_singular_vector(m);
  est.value = ratio_at(m.matrix(), est.witness, 2.0, 2.0);
  est.kind = BoundKind::Inf;
  est.method = EstimateMethod::ExactP2;
  est.certified = true;
  est.kernel_detected = numerical_rank(m, rank_tolerance) < m.cols();
  return est;
}

namespace {

struct GridSweep {
  const Matrix& m;
  double domain_p;
  double codomain_p;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  Vector lo_x{}, hi_x{};
  double jump = 0.0;
  std::size_t points = 0;

  double visit(const Vector& direction) {
    const Vector x = direction / p_norm(direction, domain_p);
    const double r = p_norm(m * x, codomain_p);
    ++points;
    if (r < lo) {
      lo = r;
      lo_x = x;
    }
    if (r > hi) {
      hi = r;
      hi_x = x;
    }
    return r;
  }
  void neighbour(double a, double b) { jump = std::max(jump, std::abs(a - b)); }
};

}  // namespace

GridBounds grid_oracle(const LinOp& m, double domain_p, double codomain_p, double resolution) {
  check_exponent(domain_p);
  check_exponent(codomain_p);
  const int dim = m.cols();
  if (dim > 3) throw UnsupportedError("grid oracle supports dimension <= 3");
  if (!(resolution > 0.0)) throw DomainError("grid resolution must be positive");
  GridSweep sweep{m.matrix(), domain_p, codomain_p};
  const double pi = std::numbers::pi;
  // The ratio is even, so half of each angular range covers the sphere.
  if (dim == 1) {
    sweep.visit(Vector::Ones(1));
  } else if (dim == 2) {
    const auto steps = static_cast<long>(std::ceil(pi / resolution));
    double first = 0.0, prev = 0.0;
    for (long k = 0; k < steps; ++k) {
      const double theta = pi * static_cast<double>(k) / static_cast<double>(steps);
      const double r = sweep.visit(Vector{{std::cos(theta), std::sin(theta)}});
      if (k == 0) first = r;
      else sweep.neighbour(r, prev);
      prev = r;
    }
    sweep.neighbour(prev, first);
  } else {
    const auto polar = static_cast<long>(std::ceil(pi / resolution));
    const auto azimuth = static_cast<long>(std::ceil(pi / resolution));
    std::vector<double> prev_row(static_cast<std::size_t>(azimuth), 0.0);
    for (long i = 0; i <= polar; ++i) {
      const double theta = pi * static_cast<double>(i) / static_cast<double>(polar);
      double prev = 0.0;
      for (long j = 0; j < azimuth; ++j) {
        const double phi = pi * static_cast<double>(j) / static_cast<double>(azimuth);
        const double r = sweep.visit(Vector{{std::sin(theta) * std::cos(phi),
                                             std::sin(theta) * std::sin(phi), std::cos(theta)}});
        if (j > 0) sweep.neighbour(r, prev);
        if (i > 0) sweep.neighbour(r, prev_row[static_cast<std::size_t>(j)]);
        prev_row[static_cast<std::size_t>(j)] = r;
        prev = r;
      }
    }
  }
  GridBounds out;
  out.resolution = resolution;
  out.points = sweep.points;
  out.certified = resolution <= 0.01;
  for (auto* est : {&out.lower, &out.upper}) {
    est->method = EstimateMethod::GridOracle;
    est->certified = out.certified;
    est->slack = sweep.jump;
  }
  out.lower.kind = BoundKind::Inf;
  out.lower.value = sweep.lo;
  out.lower.witness = sweep.lo_x;
  out.upper.kind = BoundKind::Sup;
  out.upper.value = sweep.hi;
  out.upper.witness = sweep.hi_x;
  return out;
}

GridBounds grid_oracle(const BlockMap& map, int dim, double p, double resolution) {
  if (dim > 3) throw UnsupportedError("grid oracle supports dimension <= 3");
  double codomain_p = p;
  const LinOp m = materialize(map, dim, 0, &codomain_p);
  return grid_oracle(m, p, codomain_p, resolution);
}

}  // namespace gpf
