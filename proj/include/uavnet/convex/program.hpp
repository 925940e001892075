#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace uavnet::convex {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Sense { Maximize, Minimize };

/// Sparse affine form sum_i coeff_i * x[index_i] + constant.
struct AffineExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  AffineExpr& add(int index, double coeff) {
    terms.emplace_back(index, coeff);
    return *this;
  }
  AffineExpr& shift(double c) {
    constant += c;
    return *this;
  }
  [[nodiscard]] double eval(std::span<const double> x) const;
};

/// Scalar convex function of the variables listed in its support. Called with the
/// support values; fills grad (k) and the row-major Hessian (k x k) when those spans
/// are nonempty. Returns +inf outside its domain.
using SmoothFn =
    std::function<double(std::span<const double> x, std::span<double> grad, std::span<double> hess)>;

enum class ConstraintKind { Linear, Quadratic, Cone, Smooth };

/// One constraint. Every kind is stated as "lhs <= rhs":
///   Linear:    lhs(x) <= 0
///   Quadratic: sum_k parts_k(x)^2 <= rhs(x)
///   Cone:      ||parts(x)||_2 <= rhs(x)
///   Smooth:    fn(x[support]) <= 0
struct Constraint {
  ConstraintKind kind = ConstraintKind::Linear;
  std::string name;
  AffineExpr lhs;
  std::vector<AffineExpr> parts;
  AffineExpr rhs;
  std::vector<int> support;
  SmoothFn fn;

  /// Amount by which x violates the constraint (<= 0 when satisfied).
  [[nodiscard]] double violation(std::span<const double> x) const;
};

struct Variable {
  std::string name;
  double lower = -kInf;
  double upper = kInf;
};

/// Declarative convex program: optimize a linear objective subject to variable
/// bounds and convex constraints.
class ConvexProgram {
 public:
  explicit ConvexProgram(Sense sense = Sense::Maximize) : sense_(sense) {}

  int add_variable(std::string name, double lower = -kInf, double upper = kInf);
  void set_bounds(int index, double lower, double upper);
  void set_objective_coeff(int index, double coeff);

  int add_linear(AffineExpr lhs, std::string name);
  int add_quadratic(std::vector<AffineExpr> parts, AffineExpr rhs, std::string name);
  int add_cone(std::vector<AffineExpr> parts, AffineExpr rhs, std::string name);
  int add_smooth(std::vector<int> support, SmoothFn fn, std::string name);

  /// Preferred starting point; used directly when strictly feasible.
  void set_start(std::vector<double> x) { start_ = std::move(x); }

  [[nodiscard]] Sense sense() const { return sense_; }
  [[nodiscard]] int variable_count() const { return static_cast<int>(variables_.size()); }
  [[nodiscard]] const std::vector<Variable>& variables() const { return variables_; }
  [[nodiscard]] const std::vector<double>& objective() const { return objective_; }
  [[nodiscard]] const std::vector<Constraint>& constraints() const { return constraints_; }
  [[nodiscard]] const std::vector<double>& start() const { return start_; }

  /// Objective value c.x in the program's own sense.
  [[nodiscard]] double objective_value(std::span<const double> x) const;
  /// Largest violation over bounds and constraints, and the offending name.
  [[nodiscard]] std::pair<double, std::string> max_violation(std::span<const double> x) const;

 private:
  void check_expr(const AffineExpr& e) const;

  Sense sense_;
  std::vector<Variable> variables_;
  std::vector<double> objective_;
  std::vector<Constraint> constraints_;
  std::vector<double> start_;
};

}  // namespace uavnet::convex
