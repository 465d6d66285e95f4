#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

#include "fiberaudit/geometry.hpp"

// Least-squares descent on ||r(z)||^2 over a manifold described by a
// problem type P providing
//
//   Vector residual(const Vector& z) const;          // costs residual_cost() evals
//   Matrix residual_jacobian(const Vector& z) const; // costs jacobian_cost() evals
//   Matrix tangent_basis(const Vector& z) const;     // columns span T_z
//   Vector retract(const Vector& z, const Vector& step) const;
//   double max_step() const;                         // cap on tangent step length
//   std::size_t residual_cost() const, jacobian_cost() const;
//
// With derivatives: Gauss-Newton steps in tangent coordinates (lightly
// damped), backtracking by halving until the objective decreases.
// Without: compass search over the tangent basis with a shrinking step.
namespace fiberaudit::optimize {

struct DescentOptions {
  double tol = 1e-9;              // stop once ||r|| <= tol
  std::size_t budget = 500;       // map evaluations
  bool use_derivatives = true;
  double initial_step = 0.25;     // compass search only
  std::size_t max_halvings = 60;
  std::size_t max_iterations = std::numeric_limits<std::size_t>::max();
};

struct DescentResult {
  Vector z;
  double residual_norm = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  std::size_t iterations = 0;
  bool converged = false;
};

namespace detail {

template <typename P>
DescentResult gauss_newton(const P& problem, Vector z, const DescentOptions& opt) {
  DescentResult res;
  Vector r = problem.residual(z);
  res.evaluations += problem.residual_cost();
  double obj = r.squaredNorm();
  const double tol2 = opt.tol * opt.tol;

  while (obj > tol2 && res.iterations < opt.max_iterations &&
         res.evaluations + problem.jacobian_cost() + problem.residual_cost() <= opt.budget) {
    ++res.iterations;
    const Matrix tangent = problem.tangent_basis(z);
    const Matrix jac = problem.residual_jacobian(z) * tangent;
    res.evaluations += problem.jacobian_cost();

    const Matrix normal = jac.transpose() * jac;
    const Vector grad = jac.transpose() * r;
    const double scale = normal.diagonal().cwiseAbs().maxCoeff();
    const double damping = 1e-14 * scale + std::numeric_limits<double>::min();
    Vector step = -(normal + damping * Matrix::Identity(normal.rows(), normal.cols())).ldlt().solve(grad);
    if (!step.allFinite()) step = -grad;

    bool improved = false;
    for (int attempt = 0; attempt < 2 && !improved; ++attempt) {
      if (attempt == 1) step = -grad;  // fall back to steepest descent
      double len = step.norm();
      if (!(len > 0.0)) break;
      if (len > problem.max_step()) {
        step *= problem.max_step() / len;
        len = problem.max_step();
      }
      for (std::size_t h = 0; h <= opt.max_halvings; ++h) {
        if (res.evaluations + problem.residual_cost() > opt.budget) break;
        const Vector trial = problem.retract(z, step);
        const Vector tr = problem.residual(trial);
        res.evaluations += problem.residual_cost();
        const double tobj = tr.squaredNorm();
        if (tobj < obj) {
          z = trial;
          r = tr;
          obj = tobj;
          improved = true;
          break;
        }
        step *= 0.5;
      }
    }
    if (!improved) break;
  }
  res.z = std::move(z);
  res.residual_norm = std::sqrt(obj);
  res.converged = obj <= tol2;
  return res;
}

template <typename P>
DescentResult compass_search(const P& problem, Vector z, const DescentOptions& opt) {
  DescentResult res;
  Vector r = problem.residual(z);
  res.evaluations += problem.residual_cost();
  double obj = r.squaredNorm();
  const double tol2 = opt.tol * opt.tol;
  double step = opt.initial_step;

  while (obj > tol2 && step > 1e-15 && res.iterations < opt.max_iterations) {
    ++res.iterations;
    const Matrix tangent = problem.tangent_basis(z);
    Vector best_z = z;
    double best_obj = obj;
    bool out_of_budget = false;
    for (Eigen::Index k = 0; k < tangent.cols() && !out_of_budget; ++k) {
      for (double sign : {1.0, -1.0}) {
        if (res.evaluations + problem.residual_cost() > opt.budget) {
          out_of_budget = true;
          break;
        }
        const Vector trial = problem.retract(z, Vector(Vector::Unit(tangent.cols(), k) * (sign * step)));
        const double tobj = problem.residual(trial).squaredNorm();
        res.evaluations += problem.residual_cost();
        if (tobj < best_obj) {
          best_obj = tobj;
          best_z = trial;
        }
      }
    }
    if (best_obj < obj) {
      z = best_z;
      obj = best_obj;
    } else {
      step *= 0.5;
    }
    if (out_of_budget) break;
  }
  res.z = std::move(z);
  res.residual_norm = std::sqrt(obj);
  res.converged = obj <= tol2;
  return res;
}

}  // namespace detail

template <typename P>
DescentResult least_squares_descent(const P& problem, Vector start, const DescentOptions& opt) {
  if (opt.use_derivatives) return detail::gauss_newton(problem, std::move(start), opt);
  return detail::compass_search(problem, std::move(start), opt);
}

/// Orthonormal basis of the complement of unit vector u (columns).
inline Matrix sphere_tangent_basis(const Vector& u) {
  const Eigen::Index d = u.size();
  // Householder reflection mapping e_0 to u; its remaining columns are
  // orthonormal and orthogonal to u.
  Vector v = u;
  const double sign = u[0] >= 0.0 ? 1.0 : -1.0;
  v[0] += sign;
  const double vn2 = v.squaredNorm();
  Matrix h = Matrix::Identity(d, d) - (2.0 / vn2) * v * v.transpose();
  return h.rightCols(d - 1);
}

}  // namespace fiberaudit::optimize
