#include "uavnet/convex/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace uavnet::convex {

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal:
      return "Optimal";
    case SolveStatus::Infeasible:
      return "Infeasible";
    case SolveStatus::IterationLimit:
      return "IterationLimit";
    case SolveStatus::NumericalFailure:
      return "NumericalFailure";
  }
  return "Unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

/// Constraint compiled to a slack h(x) > 0 with barrier -log h. With the affine part
/// w(x) = a.x + b and parts r_k(x) = m_k.x + q_k:
///   Linear: h = w;  Quadratic: h = w - sum r_k^2;  Cone: h = w^2 - sum r_k^2, w > 0;
///   Smooth: h = w - fn(x).
struct Term {
  ConstraintKind kind = ConstraintKind::Linear;
  int source = -1;  // constraint index; -1 for variable bounds
  std::vector<int> support;
  std::vector<double> a;
  double b = 0.0;
  std::vector<std::vector<double>> m;
  std::vector<double> q;
  const SmoothFn* fn = nullptr;
  std::vector<int> fn_local;
  std::vector<int> pos;  // value slots of the lower triangle, row-major over local pairs
  double theta = 1.0;
};

struct Workspace {
  std::vector<double> xl, gh, hh, fg, fh, fx;
};

class Engine {
 public:
  Engine(const ConvexProgram& program, bool phase_one);

  int n = 0;
  int shift_index = -1;
  double degree = 0.0;
  std::vector<double> cost;  // minimize cost.x
  std::vector<Term> terms;

  /// Slack of every term; false when x leaves the domain.
  bool slacks(const std::vector<double>& x, std::vector<double>& h) const;
  /// Gradient and Hessian of t cost.x - sum log h.
  void assemble(const std::vector<double>& x, const std::vector<double>& h, double t,
                Eigen::VectorXd& grad);
  bool factor_and_solve(const Eigen::VectorXd& grad, Eigen::VectorXd& dx);

 private:
  double term_slack(const Term& term, const double* x, bool derivs, Workspace& ws) const;
  void build_pattern();

  SpMat hessian_;
  std::vector<double> assembled_;
  std::vector<int> diag_pos_;
  std::vector<int> value_row_, value_col_;
  Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
  mutable Workspace ws_;
};

void append_affine(const AffineExpr& e, double scale, std::vector<std::pair<int, double>>& out,
                   double& constant) {
  for (const auto& [i, c] : e.terms) out.emplace_back(i, scale * c);
  constant += scale * e.constant;
}

std::vector<int> collect_support(const Constraint& c) {
  std::vector<int> s;
  auto take = [&](const AffineExpr& e) {
    for (const auto& [i, coeff] : e.terms) {
      (void)coeff;
      s.push_back(i);
    }
  };
  take(c.lhs);
  take(c.rhs);
  for (const auto& p : c.parts) take(p);
  s.insert(s.end(), c.support.begin(), c.support.end());
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

int local_index(const std::vector<int>& support, int global) {
  return static_cast<int>(std::lower_bound(support.begin(), support.end(), global) - support.begin());
}

std::vector<double> dense_local(const std::vector<int>& support,
                                const std::vector<std::pair<int, double>>& coeffs) {
  std::vector<double> out(support.size(), 0.0);
  for (const auto& [i, c] : coeffs) out[static_cast<std::size_t>(local_index(support, i))] += c;
  return out;
}

Engine::Engine(const ConvexProgram& program, bool phase_one) {
  n = program.variable_count() + (phase_one ? 1 : 0);
  shift_index = phase_one ? n - 1 : -1;
  cost.assign(static_cast<std::size_t>(n), 0.0);
  if (phase_one) {
    cost[static_cast<std::size_t>(shift_index)] = 1.0;
  } else {
    const double sign = program.sense() == Sense::Maximize ? -1.0 : 1.0;
    for (int i = 0; i < program.variable_count(); ++i) {
      cost[static_cast<std::size_t>(i)] = sign * program.objective()[static_cast<std::size_t>(i)];
    }
  }

  for (int i = 0; i < program.variable_count(); ++i) {
    const Variable& v = program.variables()[static_cast<std::size_t>(i)];
    if (std::isfinite(v.lower)) {
      Term t;
      t.support = {i};
      t.a = {1.0};
      t.b = -v.lower;
      terms.push_back(std::move(t));
    }
    if (std::isfinite(v.upper)) {
      Term t;
      t.support = {i};
      t.a = {-1.0};
      t.b = v.upper;
      terms.push_back(std::move(t));
    }
  }

  const auto& constraints = program.constraints();
  for (std::size_t ci = 0; ci < constraints.size(); ++ci) {
    const Constraint& c = constraints[ci];
    Term t;
    t.kind = c.kind;
    t.source = static_cast<int>(ci);
    t.support = collect_support(c);
    if (phase_one) t.support.push_back(shift_index);
    std::vector<std::pair<int, double>> affine;
    double constant = 0.0;
    switch (c.kind) {
      case ConstraintKind::Linear:
        append_affine(c.lhs, -1.0, affine, constant);
        break;
      case ConstraintKind::Quadratic:
      case ConstraintKind::Cone:
        append_affine(c.rhs, 1.0, affine, constant);
        for (const auto& p : c.parts) {
          t.m.push_back(dense_local(t.support, p.terms));
          t.q.push_back(p.constant);
        }
        t.theta = c.kind == ConstraintKind::Cone ? 2.0 : 1.0;
        break;
      case ConstraintKind::Smooth:
        t.fn = &c.fn;
        for (int g : c.support) t.fn_local.push_back(local_index(t.support, g));
        break;
    }
    if (phase_one) affine.emplace_back(shift_index, 1.0);
    t.a = dense_local(t.support, affine);
    t.b = constant;
    terms.push_back(std::move(t));
  }
  for (const Term& t : terms) degree += t.theta;
  build_pattern();
}

void Engine::build_pattern() {
  std::vector<std::vector<int>> rows_of_col(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) rows_of_col[static_cast<std::size_t>(i)].push_back(i);
  for (const Term& t : terms) {
    for (std::size_t i = 0; i < t.support.size(); ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        rows_of_col[static_cast<std::size_t>(t.support[j])].push_back(t.support[i]);
      }
    }
  }
  std::vector<Eigen::Triplet<double>> trip;
  for (int col = 0; col < n; ++col) {
    auto& rows = rows_of_col[static_cast<std::size_t>(col)];
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    for (int r : rows) trip.emplace_back(r, col, 0.0);
  }
  hessian_.resize(n, n);
  hessian_.setFromTriplets(trip.begin(), trip.end());
  hessian_.makeCompressed();

  const int* outer = hessian_.outerIndexPtr();
  const int* inner = hessian_.innerIndexPtr();
  auto slot = [&](int row, int col) {
    const int* begin = inner + outer[col];
    const int* end = inner + outer[col + 1];
    return static_cast<int>(std::lower_bound(begin, end, row) - inner);
  };
  diag_pos_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) diag_pos_[static_cast<std::size_t>(i)] = slot(i, i);
  for (Term& t : terms) {
    const std::size_t k = t.support.size();
    t.pos.reserve(k * (k + 1) / 2);
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j <= i; ++j) t.pos.push_back(slot(t.support[i], t.support[j]));
    }
  }
  value_row_.resize(static_cast<std::size_t>(hessian_.nonZeros()));
  value_col_.resize(value_row_.size());
  for (int col = 0; col < n; ++col) {
    for (int p = outer[col]; p < outer[col + 1]; ++p) {
      value_row_[static_cast<std::size_t>(p)] = inner[p];
      value_col_[static_cast<std::size_t>(p)] = col;
    }
  }
  ldlt_.analyzePattern(hessian_);
  assembled_.assign(static_cast<std::size_t>(hessian_.nonZeros()), 0.0);
}

double Engine::term_slack(const Term& term, const double* x, bool derivs, Workspace& ws) const {
  const std::size_t k = term.support.size();
  ws.xl.resize(k);
  for (std::size_t i = 0; i < k; ++i) ws.xl[i] = x[term.support[i]];
  double w = term.b;
  for (std::size_t i = 0; i < k; ++i) w += term.a[i] * ws.xl[i];
  if (derivs) {
    ws.gh.assign(k, 0.0);
    if (term.kind != ConstraintKind::Linear) ws.hh.assign(k * k, 0.0);
  }
  switch (term.kind) {
    case ConstraintKind::Linear:
      if (derivs) ws.gh = term.a;
      return w;
    case ConstraintKind::Quadratic:
    case ConstraintKind::Cone: {
      const bool cone = term.kind == ConstraintKind::Cone;
      if (cone && !(w > 0.0)) return -kInf;
      double sq = 0.0;
      for (std::size_t p = 0; p < term.m.size(); ++p) {
        const auto& row = term.m[p];
        double r = term.q[p];
        for (std::size_t i = 0; i < k; ++i) r += row[i] * ws.xl[i];
        sq += r * r;
        if (derivs) {
          for (std::size_t i = 0; i < k; ++i) {
            if (row[i] == 0.0) continue;
            ws.gh[i] -= 2.0 * r * row[i];
            for (std::size_t j = 0; j < k; ++j) ws.hh[i * k + j] -= 2.0 * row[i] * row[j];
          }
        }
      }
      if (derivs) {
        const double scale = cone ? 2.0 * w : 1.0;
        for (std::size_t i = 0; i < k; ++i) ws.gh[i] += scale * term.a[i];
        if (cone) {
          for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) ws.hh[i * k + j] += 2.0 * term.a[i] * term.a[j];
          }
        }
      }
      return cone ? w * w - sq : w - sq;
    }
    case ConstraintKind::Smooth: {
      const std::size_t kf = term.fn_local.size();
      ws.fx.resize(kf);
      for (std::size_t i = 0; i < kf; ++i) ws.fx[i] = ws.xl[static_cast<std::size_t>(term.fn_local[i])];
      if (derivs) {
        ws.fg.assign(kf, 0.0);
        ws.fh.assign(kf * kf, 0.0);
      }
      const double f = (*term.fn)(ws.fx, derivs ? std::span<double>(ws.fg) : std::span<double>(),
                                  derivs ? std::span<double>(ws.fh) : std::span<double>());
      if (!std::isfinite(f)) return -kInf;
      if (derivs) {
        for (std::size_t i = 0; i < k; ++i) ws.gh[i] = term.a[i];
        for (std::size_t i = 0; i < kf; ++i) {
          const auto li = static_cast<std::size_t>(term.fn_local[i]);
          ws.gh[li] -= ws.fg[i];
          for (std::size_t j = 0; j < kf; ++j) {
            ws.hh[li * k + static_cast<std::size_t>(term.fn_local[j])] -= ws.fh[i * kf + j];
          }
        }
      }
      return w - f;
    }
  }
  return -kInf;
}

bool Engine::slacks(const std::vector<double>& x, std::vector<double>& h) const {
  h.resize(terms.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    h[i] = term_slack(terms[i], x.data(), false, ws_);
    if (!(h[i] > 0.0) || !std::isfinite(h[i])) return false;
  }
  return true;
}

void Engine::assemble(const std::vector<double>& x, const std::vector<double>& h, double t,
                      Eigen::VectorXd& grad) {
  grad.resize(n);
  for (int i = 0; i < n; ++i) grad[i] = t * cost[static_cast<std::size_t>(i)];
  std::fill(assembled_.begin(), assembled_.end(), 0.0);
  for (std::size_t ti = 0; ti < terms.size(); ++ti) {
    const Term& term = terms[ti];
    term_slack(term, x.data(), true, ws_);
    const double inv = 1.0 / h[ti];
    const double inv2 = inv * inv;
    const std::size_t k = term.support.size();
    for (std::size_t i = 0; i < k; ++i) grad[term.support[i]] -= ws_.gh[i] * inv;
    const bool curved = term.kind != ConstraintKind::Linear;
    std::size_t p = 0;
    for (std::size_t i = 0; i < k; ++i) {
      const double gi = ws_.gh[i] * inv2;
      for (std::size_t j = 0; j <= i; ++j, ++p) {
        double v = gi * ws_.gh[j];
        if (curved) v -= ws_.hh[i * k + j] * inv;
        assembled_[static_cast<std::size_t>(term.pos[p])] += v;
      }
    }
  }
}

bool Engine::factor_and_solve(const Eigen::VectorXd& grad, Eigen::VectorXd& dx) {
  // Symmetric diagonal equilibration: factor S H S with S = diag(H)^(-1/2), so the
  // regularization below acts relative to each variable's curvature.
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) {
    const double d = assembled_[static_cast<std::size_t>(diag_pos_[static_cast<std::size_t>(i)])];
    scale[i] = d > 0.0 && std::isfinite(d) ? 1.0 / std::sqrt(d) : 1.0;
  }
  const Eigen::VectorXd rhs = -scale.cwiseProduct(grad);
  double* values = hessian_.valuePtr();
  for (double lambda = 1e-10; lambda <= 1e-2 * (1.0 + 1e-9); lambda *= 10.0) {
    for (std::size_t p = 0; p < assembled_.size(); ++p) {
      values[p] = assembled_[p] * scale[value_row_[p]] * scale[value_col_[p]];
    }
    for (int d : diag_pos_) values[d] += lambda;
    ldlt_.factorize(hessian_);
    if (ldlt_.info() != Eigen::Success) continue;
    if (!(ldlt_.vectorD().minCoeff() > 0.0)) continue;
    dx = ldlt_.solve(rhs);
    if (ldlt_.info() != Eigen::Success || !dx.allFinite()) continue;
    dx = dx.cwiseProduct(scale);
    if (!(grad.dot(dx) < 0.0) && grad.norm() > 0.0) continue;
    return true;
  }
  return false;
}

enum class Centering { Centered, PhaseOneDone, IterationLimit, Failure };

struct CenteringOutcome {
  Centering result = Centering::Centered;
  std::string diagnostic;
};

/// Newton's method on t cost.x - sum log h from a strictly interior x.
CenteringOutcome center(Engine& engine, std::vector<double>& x, std::vector<double>& h, double t,
                        const SolveOptions& opts, int& newton_steps,
                        std::vector<double>* merit_trace) {
  Eigen::VectorXd grad;
  Eigen::VectorXd dx;
  std::vector<double> trial(x.size());
  std::vector<double> h_trial;
  double merit = 0.0;
  if (merit_trace) {
    for (std::size_t i = 0; i < x.size(); ++i) merit += t * engine.cost[i] * x[i];
    for (std::size_t i = 0; i < h.size(); ++i) merit -= std::log(h[i]);
    merit_trace->push_back(merit);
  }
  for (;;) {
    engine.assemble(x, h, t, grad);
    if (!engine.factor_and_solve(grad, dx)) {
      return {Centering::Failure, "Newton system singular after regularization"};
    }
    const double slope = grad.dot(dx);
    if (-slope / 2.0 <= opts.newton_tol) return {Centering::Centered, {}};

    double alpha = 1.0;
    double change = 0.0;
    bool accepted = false;
    while (alpha > 1e-20) {
      for (std::size_t i = 0; i < x.size(); ++i) trial[i] = x[i] + alpha * dx[static_cast<Eigen::Index>(i)];
      if (engine.slacks(trial, h_trial)) {
        // Merit change summed term by term keeps precision when t is large.
        change = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) change += t * engine.cost[i] * (trial[i] - x[i]);
        for (std::size_t i = 0; i < h.size(); ++i) change -= std::log(h_trial[i] / h[i]);
        if (change <= opts.armijo * alpha * slope) {
          accepted = true;
          break;
        }
      }
      alpha *= opts.backtrack;
    }
    if (!accepted) {
      if (-slope / 2.0 <= std::sqrt(opts.newton_tol)) return {Centering::Centered, {}};
      return {Centering::Failure, "line search stalled"};
    }
    double scale = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) scale += std::abs(t * engine.cost[i] * x[i]);
    const bool roundoff = std::abs(change) <= 1e-13 * scale;
    x.swap(trial);
    h.swap(h_trial);
    ++newton_steps;
    if (merit_trace) {
      merit += change;
      merit_trace->push_back(merit);
    }
    // Progress at the rounding level of the merit: as centered as arithmetic allows.
    if (roundoff) return {Centering::Centered, {}};
    if (engine.shift_index >= 0 && x[static_cast<std::size_t>(engine.shift_index)] < 0.0) {
      return {Centering::PhaseOneDone, {}};
    }
    if (newton_steps >= opts.max_newton) return {Centering::IterationLimit, "Newton step limit"};
  }
}

/// Start point clipped into the strict interior of the variable bounds.
std::vector<double> interior_start(const ConvexProgram& program) {
  const int n = program.variable_count();
  std::vector<double> x(static_cast<std::size_t>(n), 0.0);
  const auto& hint = program.start();
  for (int i = 0; i < n; ++i) {
    const Variable& v = program.variables()[static_cast<std::size_t>(i)];
    double xi = static_cast<std::size_t>(i) < hint.size() ? hint[static_cast<std::size_t>(i)] : 0.0;
    const bool lo = std::isfinite(v.lower);
    const bool hi = std::isfinite(v.upper);
    const bool inside = (!lo || xi > v.lower) && (!hi || xi < v.upper);
    if (inside) {
      // keep the hint
    } else if (lo && hi) {
      const double margin = 1e-3 * (v.upper - v.lower);
      xi = v.lower < v.upper ? std::clamp(xi, v.lower + margin, v.upper - margin) : v.lower;
    } else if (lo) {
      xi = v.lower + 1e-3 * (1.0 + std::abs(v.lower));
    } else {
      xi = v.upper - 1e-3 * (1.0 + std::abs(v.upper));
    }
    x[static_cast<std::size_t>(i)] = xi;
  }
  return x;
}

/// Largest shift needed to make every general constraint strictly satisfied at x.
double required_shift(const Engine& engine, const std::vector<double>& x_with_shift, bool& ok) {
  std::vector<double> probe = x_with_shift;
  const auto s = static_cast<std::size_t>(engine.shift_index);
  probe[s] = 0.0;
  double worst = -kInf;
  ok = true;
  for (const Term& term : engine.terms) {
    if (term.source < 0) continue;
    // Slack without shift; for cones measure w - ||r|| instead of w^2 - ||r||^2.
    double slack = 0.0;
    const std::size_t k = term.support.size();
    std::vector<double> xl(k);
    for (std::size_t i = 0; i < k; ++i) xl[i] = probe[static_cast<std::size_t>(term.support[i])];
    double w = term.b;
    for (std::size_t i = 0; i < k; ++i) w += term.a[i] * xl[i];
    double sq = 0.0;
    for (std::size_t p = 0; p < term.m.size(); ++p) {
      double r = term.q[p];
      for (std::size_t i = 0; i < k; ++i) r += term.m[p][i] * xl[i];
      sq += r * r;
    }
    switch (term.kind) {
      case ConstraintKind::Linear:
        slack = w;
        break;
      case ConstraintKind::Quadratic:
        slack = w - sq;
        break;
      case ConstraintKind::Cone:
        slack = w - std::sqrt(sq);
        break;
      case ConstraintKind::Smooth: {
        std::vector<double> fx(term.fn_local.size());
        for (std::size_t i = 0; i < fx.size(); ++i) fx[i] = xl[static_cast<std::size_t>(term.fn_local[i])];
        const double f = (*term.fn)(fx, {}, {});
        if (!std::isfinite(f)) ok = false;
        slack = w - f;
        break;
      }
    }
    worst = std::max(worst, -slack);
  }
  return worst;
}

SolveReport finish(const ConvexProgram& program, SolveReport report) {
  const auto [violation, name] = program.max_violation(report.x);
  report.max_violation = violation;
  if (report.status == SolveStatus::Infeasible) report.worst_constraint = name;
  report.objective = program.objective_value(report.x);
  return report;
}

}  // namespace

SolveReport find_feasible_point(const ConvexProgram& program, const SolveOptions& options) {
  SolveReport report;
  report.used_phase_one = true;
  std::vector<double> x0 = interior_start(program);

  {
    Engine plain(program, false);
    std::vector<double> h;
    if (plain.slacks(x0, h)) {
      report.status = SolveStatus::Optimal;
      report.used_phase_one = false;
      report.x = std::move(x0);
      return finish(program, std::move(report));
    }
  }

  Engine engine(program, true);
  std::vector<double> x = x0;
  x.push_back(0.0);
  bool domain_ok = true;
  const double worst = required_shift(engine, x, domain_ok);
  if (!domain_ok) {
    report.status = SolveStatus::NumericalFailure;
    report.diagnostic = "start point lies outside the domain of a smooth constraint";
    report.x = std::move(x0);
    return finish(program, std::move(report));
  }
  // Cones use w^2 - ||r||^2, so a unit margin on w - ||r|| keeps them interior too.
  x.back() = std::max(worst, 0.0) + 1.0;
  std::vector<double> h;
  if (!engine.slacks(x, h)) {
    report.status = SolveStatus::NumericalFailure;
    report.diagnostic = "phase-I start is not interior";
    x.pop_back();
    report.x = std::move(x);
    return finish(program, std::move(report));
  }

  double t = std::max(options.initial_t, engine.degree / x.back());
  for (;;) {
    ++report.outer_iterations;
    std::vector<double>* trace = nullptr;
    if (options.record_merit) trace = &report.merit_history.emplace_back();
    const CenteringOutcome out = center(engine, x, h, t, options, report.newton_steps, trace);
    const double s = x.back();
    report.gap = engine.degree / t;
    if (out.result == Centering::PhaseOneDone) {
      report.status = SolveStatus::Optimal;
      break;
    }
    if (out.result == Centering::IterationLimit) {
      report.status = SolveStatus::IterationLimit;
      report.diagnostic = out.diagnostic;
      break;
    }
    if (out.result == Centering::Failure) {
      report.status = SolveStatus::NumericalFailure;
      report.diagnostic = "phase-I: " + out.diagnostic;
      break;
    }
    if (s - report.gap > 0.0 || (report.gap <= options.gap_tol && s >= 0.0)) {
      report.status = SolveStatus::Infeasible;
      report.diagnostic = "no strictly feasible point; common violation is at least " + std::to_string(std::max(s - report.gap, 0.0));
      break;
    }
    t *= options.barrier_mu;
  }
  x.pop_back();
  report.x = std::move(x);
  return finish(program, std::move(report));
}

SolveReport solve(const ConvexProgram& program, const SolveOptions& options) {
  SolveReport report = find_feasible_point(program, options);
  const bool used_phase_one = report.used_phase_one;
  if (report.status != SolveStatus::Optimal) return report;
  if (options.audit_smooth) audit_smooth_constraints(program, report.x, options.audit_seed);

  Engine engine(program, false);
  std::vector<double> x = report.x;
  std::vector<double> h;
  if (!engine.slacks(x, h)) {
    report.status = SolveStatus::NumericalFailure;
    report.diagnostic = "feasible point lost strict interiority";
    return finish(program, std::move(report));
  }
  report.used_phase_one = used_phase_one;
  double t = options.initial_t;
  for (;;) {
    ++report.outer_iterations;
    std::vector<double>* trace = nullptr;
    if (options.record_merit) trace = &report.merit_history.emplace_back();
    const CenteringOutcome out = center(engine, x, h, t, options, report.newton_steps, trace);
    report.gap = engine.degree / t;
    if (out.result == Centering::IterationLimit) {
      report.status = SolveStatus::IterationLimit;
      report.diagnostic = out.diagnostic;
      break;
    }
    if (out.result == Centering::Failure) {
      report.status = SolveStatus::NumericalFailure;
      report.diagnostic = out.diagnostic;
      break;
    }
    if (report.gap <= options.gap_tol) {
      report.status = SolveStatus::Optimal;
      break;
    }
    t *= options.barrier_mu;
  }
  report.x = std::move(x);
  report = finish(program, std::move(report));
  if (report.status == SolveStatus::Optimal && report.max_violation > options.feas_tol) {
    report.status = SolveStatus::NumericalFailure;
    report.diagnostic = "final point violates " + program.max_violation(report.x).second;
  }
  return report;
}

void audit_smooth_constraints(const ConvexProgram& program, std::span<const double> x,
                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (const Constraint& c : program.constraints()) {
    if (c.kind != ConstraintKind::Smooth) continue;
    const std::size_t k = c.support.size();
    std::vector<double> xl(k);
    for (std::size_t i = 0; i < k; ++i) xl[i] = x[static_cast<std::size_t>(c.support[i])];
    std::vector<double> g(k), hess(k * k);
    const double f = c.fn(xl, g, hess);
    if (!std::isfinite(f)) throw std::logic_error("smooth constraint '" + c.name + "' undefined at audit point");

    std::vector<double> probe = xl;
    std::vector<double> gp(k), gm(k), scratch(k * k);
    for (std::size_t i = 0; i < k; ++i) {
      const double step = 1e-5 * std::max(1.0, std::abs(xl[i]));
      probe[i] = xl[i] + step;
      const double fp = c.fn(probe, gp, scratch);
      probe[i] = xl[i] - step;
      const double fm = c.fn(probe, gm, scratch);
      probe[i] = xl[i];
      if (!std::isfinite(fp) || !std::isfinite(fm)) continue;
      const double fd = (fp - fm) / (2.0 * step);
      if (std::abs(fd - g[i]) > 1e-4 * (1.0 + std::abs(g[i]))) {
        throw std::logic_error("smooth constraint '" + c.name + "': gradient disagrees with finite differences");
      }
      for (std::size_t j = 0; j < k; ++j) {
        const double hd = (gp[j] - gm[j]) / (2.0 * step);
        if (std::abs(hd - hess[j * k + i]) > 1e-4 * (1.0 + std::abs(hess[j * k + i]))) {
          throw std::logic_error("smooth constraint '" + c.name + "': Hessian disagrees with finite differences");
        }
      }
    }

    std::vector<double> ya(k), yb(k), mid(k);
    for (int trial = 0; trial < 16; ++trial) {
      for (std::size_t i = 0; i < k; ++i) {
        const double scale = 0.1 * (1.0 + std::abs(xl[i]));
        ya[i] = xl[i] + scale * unit(rng);
        yb[i] = xl[i] + scale * unit(rng);
        mid[i] = 0.5 * (ya[i] + yb[i]);
      }
      const double fa = c.fn(ya, {}, {});
      const double fb = c.fn(yb, {}, {});
      const double fmid = c.fn(mid, {}, {});
      if (!std::isfinite(fa) || !std::isfinite(fb)) continue;
      if (fmid > 0.5 * (fa + fb) + 1e-9 * (1.0 + std::abs(fa) + std::abs(fb))) {
        throw std::logic_error("smooth constraint '" + c.name + "' fails midpoint convexity");
      }
    }
  }
}

}  // namespace uavnet::convex
