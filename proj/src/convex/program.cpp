#include "uavnet/convex/program.hpp"

#include <cmath>
#include <stdexcept>

namespace uavnet::convex {

double AffineExpr::eval(std::span<const double> x) const {
  double v = constant;
  for (const auto& [i, c] : terms) v += c * x[static_cast<std::size_t>(i)];
  return v;
}

double Constraint::violation(std::span<const double> x) const {
  switch (kind) {
    case ConstraintKind::Linear:
      return lhs.eval(x);
    case ConstraintKind::Quadratic: {
      double sq = 0.0;
      for (const auto& p : parts) {
        const double r = p.eval(x);
        sq += r * r;
      }
      return sq - rhs.eval(x);
    }
    case ConstraintKind::Cone: {
      double sq = 0.0;
      for (const auto& p : parts) {
        const double r = p.eval(x);
        sq += r * r;
      }
      return std::sqrt(sq) - rhs.eval(x);
    }
    case ConstraintKind::Smooth: {
      std::vector<double> local(support.size());
      for (std::size_t k = 0; k < support.size(); ++k) {
        local[k] = x[static_cast<std::size_t>(support[k])];
      }
      return fn(local, {}, {});
    }
  }
  return 0.0;
}

int ConvexProgram::add_variable(std::string name, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("variable '" + name + "' has empty bounds");
  variables_.push_back({std::move(name), lower, upper});
  objective_.push_back(0.0);
  return variable_count() - 1;
}

void ConvexProgram::set_bounds(int index, double lower, double upper) {
  if (lower > upper) throw std::invalid_argument("empty bounds");
  variables_.at(static_cast<std::size_t>(index)).lower = lower;
  variables_.at(static_cast<std::size_t>(index)).upper = upper;
}

void ConvexProgram::set_objective_coeff(int index, double coeff) {
  objective_.at(static_cast<std::size_t>(index)) = coeff;
}

void ConvexProgram::check_expr(const AffineExpr& e) const {
  for (const auto& [i, c] : e.terms) {
    (void)c;
    if (i < 0 || i >= variable_count()) throw std::out_of_range("constraint references unknown variable");
  }
}

int ConvexProgram::add_linear(AffineExpr lhs, std::string name) {
  check_expr(lhs);
  Constraint c;
  c.kind = ConstraintKind::Linear;
  c.name = std::move(name);
  c.lhs = std::move(lhs);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

int ConvexProgram::add_quadratic(std::vector<AffineExpr> parts, AffineExpr rhs, std::string name) {
  for (const auto& p : parts) check_expr(p);
  check_expr(rhs);
  Constraint c;
  c.kind = ConstraintKind::Quadratic;
  c.name = std::move(name);
  c.parts = std::move(parts);
  c.rhs = std::move(rhs);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

int ConvexProgram::add_cone(std::vector<AffineExpr> parts, AffineExpr rhs, std::string name) {
  for (const auto& p : parts) check_expr(p);
  check_expr(rhs);
  Constraint c;
  c.kind = ConstraintKind::Cone;
  c.name = std::move(name);
  c.parts = std::move(parts);
  c.rhs = std::move(rhs);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

int ConvexProgram::add_smooth(std::vector<int> support, SmoothFn fn, std::string name) {
  for (int i : support) {
    if (i < 0 || i >= variable_count()) throw std::out_of_range("constraint references unknown variable");
  }
  Constraint c;
  c.kind = ConstraintKind::Smooth;
  c.name = std::move(name);
  c.support = std::move(support);
  c.fn = std::move(fn);
  constraints_.push_back(std::move(c));
  return static_cast<int>(constraints_.size()) - 1;
}

double ConvexProgram::objective_value(std::span<const double> x) const {
  double v = 0.0;
  for (std::size_t i = 0; i < objective_.size(); ++i) v += objective_[i] * x[i];
  return v;
}

std::pair<double, std::string> ConvexProgram::max_violation(std::span<const double> x) const {
  double worst = 0.0;
  std::string name;
  for (std::size_t i = 0; i < variables_.size(); ++i) {
    const double v = std::max(variables_[i].lower - x[i], x[i] - variables_[i].upper);
    if (v > worst) {
      worst = v;
      name = "bounds of " + variables_[i].name;
    }
  }
  for (const auto& c : constraints_) {
    const double v = c.violation(x);
    if (!(v <= worst)) {
      worst = std::isnan(v) ? kInf : v;
      name = c.name;
    }
  }
  return {worst, name};
}

}  // namespace uavnet::convex
