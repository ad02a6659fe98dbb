#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracgraph/error.hpp"
#include "fracgraph/generators.hpp"
#include "fracgraph/graph.hpp"
#include "fracgraph/matfun.hpp"

namespace fracgraph {

// Target formation: rows are vehicles, columns spatial coordinates.
struct TargetTrajectory {
  std::function<Eigen::MatrixXd(double)> position;
  std::function<Eigen::MatrixXd(double)> velocity;
  std::function<Eigen::MatrixXd(double)> acceleration;

  // x*(t) = p for all t, v* = 0.
  static TargetTrajectory fixed(Eigen::MatrixXd p) {
    Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(p.rows(), p.cols());
    return {[p](double) { return p; }, [zero](double) { return zero; },
            [zero](double) { return zero; }};
  }

  // Vehicle i at center + r (cos(w t + phi_i), sin(w t + phi_i)); analytic derivatives.
  static TargetTrajectory circle(Eigen::Vector2d center, double r, double w,
                                 std::vector<double> phase) {
    auto build = [=](double t, int deriv) {
      Eigen::MatrixXd m(phase.size(), 2);
      for (std::size_t i = 0; i < phase.size(); ++i) {
        double a = w * t + phase[i];
        double s = deriv == 0 ? r : deriv == 1 ? r * w : r * w * w;
        Eigen::Vector2d u;
        if (deriv == 0) u = {std::cos(a), std::sin(a)};
        if (deriv == 1) u = {-std::sin(a), std::cos(a)};
        if (deriv == 2) u = {-std::cos(a), -std::sin(a)};
        m.row(i) = (deriv == 0 ? center : Eigen::Vector2d::Zero()) + s * u;
      }
      return m;
    };
    return {[=](double t) { return build(t, 0); }, [=](double t) { return build(t, 1); },
            [=](double t) { return build(t, 2); }};
  }

  // User trajectory: acceleration by central differences of the velocity.
  static TargetTrajectory from_functions(std::function<Eigen::MatrixXd(double)> x,
                                         std::function<Eigen::MatrixXd(double)> v,
                                         double horizon) {
    double h = 1e-4 * horizon;
    auto a = [v, h](double t) { return Eigen::MatrixXd((v(t + h) - v(t - h)) / (2.0 * h)); };
    return {std::move(x), std::move(v), a};
  }
};

struct ConsensusConfig {
  std::size_t vehicles = 0;
  std::size_t dim = 2;
  double beta = 0.5;
  std::optional<double> gamma;  // explicit value; unset means bound + margin
  double gamma_margin = 1.0;
  double alpha = 1.0;
  Graph graph;
  Eigen::MatrixXd x0, v0;
  TargetTrajectory target;
  double horizon = 5.0;
  double step = 0.0;  // 0 means horizon / 5000
  std::size_t output_every = 1;
};

struct GammaBound {
  bool defined = false;
  double value = 0.0;
  std::vector<Eigen::Index> valid;
  std::vector<Eigen::Index> excluded;  // Im(nu) = 0 or nonpositive radicand
  Eigen::VectorXcd nu;
  std::string note;
};

// gamma > max_i sqrt(2) (|nu_i| cos(pi/2) - atan(-Re nu_i / Im nu_i))^{-1/2},
// nu_i = -beta + mu_i, mu_i the eigenvalues of -L^a. Evaluated as printed,
// with cos(pi/2) = 0 exactly. Indices with Im(nu_i) = 0 take the atan term as
// its limit 0 (Re nu < 0), giving a zero radicand, and are excluded.
inline GammaBound gamma_lower_bound(const DenseOperator& lalpha, double beta) {
  require_square(lalpha.entries, "gamma bound");
  if (!(beta > 0)) throw InputError("beta must be positive");
  Eigen::EigenSolver<Eigen::MatrixXd> es(lalpha.entries, false);
  Eigen::VectorXcd mu = -es.eigenvalues();
  GammaBound gb;
  gb.nu = mu.array() - beta;
  const double imag_tol = 1e-12 * std::max(1.0, mu.cwiseAbs().maxCoeff());
  const double cos_half_pi = 0.0;
  for (Eigen::Index i = 0; i < gb.nu.size(); ++i) {
    auto v = gb.nu[i];
    if (std::abs(v.imag()) <= imag_tol) {
      gb.excluded.push_back(i);
      continue;
    }
    double rad = std::abs(v) * cos_half_pi - std::atan(-v.real() / v.imag());
    if (!(rad > 0)) {
      gb.excluded.push_back(i);
      continue;
    }
    double b = std::sqrt(2.0) / std::sqrt(rad);
    gb.valid.push_back(i);
    if (!gb.defined || b > gb.value) gb.value = b;
    gb.defined = true;
  }
  std::ostringstream os;
  os << "literal formula; " << gb.valid.size() << " valid, " << gb.excluded.size()
     << " excluded (real or nonpositive radicand)";
  gb.note = os.str();
  return gb;
}

struct ConsensusState {
  double t = 0.0;
  Eigen::MatrixXd x, v;
  double error = 0.0;           // sqrt(|x - x*|^2 + |v - v*|^2)
  double position_error = 0.0;  // |x - x*|
};

struct ConsensusRun {
  std::vector<ConsensusState> states;
  double gamma = 0.0;
  GammaBound bound;
  DenseOperator lalpha;
  double lalpha_imag_residue = 0.0;
};

// L^a of the communication graph: out-degree Laplacian for digraphs.
inline FractionalPowerResult communication_power(const Graph& g, double alpha) {
  auto kind = g.directed() ? LaplacianKind::DirectedOut : LaplacianKind::UndirectedCombinatorial;
  return fractional_power(build_laplacian(g, kind), alpha);
}

inline ConsensusState make_state(double t, const Eigen::MatrixXd& x, const Eigen::MatrixXd& v,
                                 const TargetTrajectory& tg) {
  ConsensusState s{t, x, v, 0.0, 0.0};
  double ex = (x - tg.position(t)).squaredNorm();
  double ev = (v - tg.velocity(t)).squaredNorm();
  s.error = std::sqrt(ex + ev);
  s.position_error = std::sqrt(ex);
  return s;
}

// x' = v,  v' = a* - K (x - x*) - gamma K (v - v*),  K = beta I + L^a; classical RK4.
inline ConsensusRun simulate_consensus(const ConsensusConfig& cfg,
                                       const FractionalPowerResult* precomputed = nullptr) {
  const auto n = static_cast<Eigen::Index>(cfg.vehicles);
  if (n == 0 || cfg.graph.n() != cfg.vehicles) throw InputError("vehicle count must match the graph");
  if (cfg.x0.rows() != n || cfg.v0.rows() != n || cfg.x0.cols() != Eigen::Index(cfg.dim) ||
      cfg.v0.cols() != Eigen::Index(cfg.dim))
    throw InputError("initial state has wrong shape");
  if (!(cfg.beta > 0)) throw InputError("beta must be positive");
  if (!(cfg.horizon > 0)) throw InputError("horizon must be positive");

  ConsensusRun run;
  FractionalPowerResult fp = precomputed ? *precomputed : communication_power(cfg.graph, cfg.alpha);
  run.lalpha = fp.op;
  run.lalpha_imag_residue = fp.imag_residue;
  run.bound = gamma_lower_bound(fp.op, cfg.beta);
  if (cfg.gamma) {
    run.gamma = *cfg.gamma;
  } else {
    if (!run.bound.defined) throw NumericalError("gamma bound undefined: " + run.bound.note);
    run.gamma = run.bound.value + cfg.gamma_margin;
  }
  if (!(run.gamma > 0)) throw InputError("gamma must be positive");

  Eigen::MatrixXd k = fp.op.entries;
  k.diagonal().array() += cfg.beta;
  const auto& tg = cfg.target;
  const double gamma = run.gamma;
  auto accel = [&](double t, const Eigen::MatrixXd& x, const Eigen::MatrixXd& v) {
    return Eigen::MatrixXd(tg.acceleration(t) - k * (x - tg.position(t)) -
                           gamma * (k * (v - tg.velocity(t))));
  };

  const double h0 = cfg.step > 0 ? cfg.step : cfg.horizon / 5000.0;
  const auto steps = static_cast<std::size_t>(std::ceil(cfg.horizon / h0 - 1e-9));
  const double h = cfg.horizon / double(steps);
  Eigen::MatrixXd x = cfg.x0, v = cfg.v0;
  run.states.push_back(make_state(0.0, x, v, tg));
  const double limit = 1e6 * std::max(run.states.front().error, 1e-12);
  for (std::size_t s = 0; s < steps; ++s) {
    double t = h * double(s);
    Eigen::MatrixXd k1x = v, k1v = accel(t, x, v);
    Eigen::MatrixXd k2x = v + 0.5 * h * k1v, k2v = accel(t + 0.5 * h, x + 0.5 * h * k1x, k2x);
    Eigen::MatrixXd k3x = v + 0.5 * h * k2v, k3v = accel(t + 0.5 * h, x + 0.5 * h * k2x, k3x);
    Eigen::MatrixXd k4x = v + h * k3v, k4v = accel(t + h, x + h * k3x, k4x);
    x += h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
    v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    bool emit = (s + 1) % std::max<std::size_t>(cfg.output_every, 1) == 0 || s + 1 == steps;
    auto st = make_state(h * double(s + 1), x, v, tg);
    if (!x.allFinite() || !v.allFinite() || st.error > limit)
      throw NumericalError("integration unstable at t=" + std::to_string(st.t) +
                           "; try a smaller step");
    if (emit) run.states.push_back(std::move(st));
  }
  return run;
}

struct ErrorCurveRow {
  double t, error, position_error;
};

inline std::vector<ErrorCurveRow> consensus_error_curve(const std::vector<ConsensusState>& states) {
  if (states.empty()) throw InputError("no states");
  std::vector<ErrorCurveRow> c;
  for (const auto& s : states) c.push_back({s.t, s.error, s.position_error});
  return c;
}

// Reference experiment: N vehicles in uniform circular motion on the unit
// circle, steered to the static circle of radius 1 centred at (3, 3) over a
// directed cycle; gamma = bound + 1.
inline ConsensusConfig circle_experiment(double alpha, std::size_t n = 120, double beta = 0.5,
                                         double horizon = 5.0) {
  ConsensusConfig c;
  c.vehicles = n;
  c.dim = 2;
  c.beta = beta;
  c.alpha = alpha;
  c.graph = gen::cycle(n, true);
  c.horizon = horizon;
  c.x0.resize(n, 2);
  c.v0.resize(n, 2);
  Eigen::MatrixXd goal(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    double th = 2.0 * std::numbers::pi * double(i + 1) / double(n);
    c.x0.row(i) << std::cos(th), std::sin(th);
    c.v0.row(i) << -std::sin(th), std::cos(th);
    goal.row(i) << 3.0 + std::cos(th), 3.0 + std::sin(th);
  }
  c.target = TargetTrajectory::fixed(goal);
  return c;
}

}  // namespace fracgraph
