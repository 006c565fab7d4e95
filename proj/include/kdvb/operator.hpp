#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "kdvb/band_matrix.hpp"
#include "kdvb/grid.hpp"

namespace kdvb {

enum class OperatorKind { Forward, Adjoint, Weighted };

inline const char* kind_name(OperatorKind k) {
  switch (k) {
    case OperatorKind::Forward: return "forward";
    case OperatorKind::Adjoint: return "adjoint";
    case OperatorKind::Weighted: return "weighted";
  }
  return "?";
}

// Boundary triple closed by the assembly.
enum class BoundaryClosure {
  DirichletBoth_SlopeRight,  // u(left)=u(right)=u_x(right)=0
  DirichletBoth_SlopeLeft,   // phi(left)=phi(right)=phi_x(left)=0
};

struct DiscreteOperator {
  OperatorKind kind;
  BoundaryClosure closure;
  BandMatrix matrix;
  GridPtr grid;
  double weight_b = 0;  // only meaningful for Weighted

  Vec apply(const Vec& u) const { return matrix.apply(u); }
  int n() const { return matrix.n(); }
};

namespace stencil {

// Standard 3-point second difference with Dirichlet elimination.
inline void add_second_difference(BandMatrix& m, double h, double c) {
  const double w = c / (h * h);
  for (int i = 0; i < m.n(); ++i) {
    m.add(i, i - 1, w);
    m.add(i, i, -2 * w);
    m.add(i, i + 1, w);
  }
}

// Right-biased 4-point third difference (u_{i+2}-3u_{i+1}+3u_i-u_{i-1})/h^3.
// Columns past the right end are dropped: u_n is the Dirichlet value and the
// ghost u_{n+1} equals it by the one-sided slope condition.
inline void add_third_difference_right(BandMatrix& m, double h, double c) {
  const double w = c / (h * h * h);
  for (int i = 0; i < m.n(); ++i) {
    m.add(i, i - 1, -w);
    m.add(i, i, 3 * w);
    m.add(i, i + 1, -3 * w);
    m.add(i, i + 2, w);
  }
}

// Mirror image: (u_{i+1}-3u_i+3u_{i-1}-u_{i-2})/h^3 with the slope condition
// at the left end. Exactly minus the transpose of the right-biased stencil.
inline void add_third_difference_left(BandMatrix& m, double h, double c) {
  const double w = c / (h * h * h);
  for (int i = 0; i < m.n(); ++i) {
    m.add(i, i - 2, -w);
    m.add(i, i - 1, 3 * w);
    m.add(i, i, -3 * w);
    m.add(i, i + 1, w);
  }
}

inline void add_first_difference(BandMatrix& m, double h, double c) {
  const double w = c / (2 * h);
  for (int i = 0; i < m.n(); ++i) {
    m.add(i, i - 1, -w);
    m.add(i, i + 1, w);
  }
}

}  // namespace stencil

// Forward:  u_xx - u_xxx.   Adjoint: phi_xx + phi_xxx.
// Weighted: -u_xx - u_xxx, assembled as E^{-1} C E with E = diag(e^{b x}),
// C the conjugated operator acting on e^{bx}u.
inline DiscreteOperator build_operator(GridPtr grid, OperatorKind kind, std::optional<double> b = std::nullopt) {
  require(grid != nullptr, "operator: null grid");
  const int n = grid->n();
  const double h = grid->h();
  switch (kind) {
    case OperatorKind::Forward: {
      BandMatrix m(n, 1, 2);
      stencil::add_second_difference(m, h, 1.0);
      stencil::add_third_difference_right(m, h, -1.0);
      return {kind, BoundaryClosure::DirichletBoth_SlopeRight, std::move(m), grid, 0.0};
    }
    case OperatorKind::Adjoint: {
      BandMatrix m(n, 2, 1);
      stencil::add_second_difference(m, h, 1.0);
      stencil::add_third_difference_left(m, h, 1.0);
      return {kind, BoundaryClosure::DirichletBoth_SlopeLeft, std::move(m), grid, 0.0};
    }
    case OperatorKind::Weighted: {
      if (!b) throw InvalidArgument("operator: weighted kind needs the weight exponent b");
      const double bb = *b;
      require(std::isfinite(bb) && bb >= 0, "operator: weight exponent b must be >= 0");
      BandMatrix c(n, 1, 2);
      stencil::add_third_difference_right(c, h, -1.0);
      stencil::add_second_difference(c, h, 3 * bb - 1);
      stencil::add_first_difference(c, h, 2 * bb - 3 * bb * bb);
      for (int i = 0; i < n; ++i) c.ref(i, i) += bb * bb * bb - bb * bb;
      BandMatrix m(n, 1, 2);
      for (int i = 0; i < n; ++i)
        for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 2); ++j)
          m.ref(i, j) = c(i, j) * std::exp(bb * (grid->x(j) - grid->x(i)));
      return {kind, BoundaryClosure::DirichletBoth_SlopeRight, std::move(m), grid, bb};
    }
  }
  throw InvalidArgument("operator: unknown kind");
}

// The same operator with every entry scaled (used by small-operator probes).
inline DiscreteOperator scaled(const DiscreteOperator& op, double c) {
  DiscreteOperator r = op;
  r.matrix = op.matrix.affine(0.0, c);
  return r;
}

// ||D+ u||_h^2 over the extended vector (0, u, 0).
inline double forward_difference_energy(const Grid& g, const Vec& u) {
  const int n = g.n();
  const double h = g.h();
  double s = u[0] * u[0] + u[n - 1] * u[n - 1];
  for (int i = 0; i + 1 < n; ++i) s += (u[i + 1] - u[i]) * (u[i + 1] - u[i]);
  return s / h;
}

// Defect of the energy identity (Au,u) = -||u_x||^2 - u_x(left)^2/2.
inline double dissipativity_residual(const DiscreteOperator& op, const StateVector& u) {
  if (op.kind != OperatorKind::Forward) throw InvalidArgument("dissipativity_residual: needs the forward operator");
  require_same_grid(*op.grid, *u.grid);
  const Grid& g = *u.grid;
  const double quad = g.h() * u.values.dot(op.apply(u.values));
  const double slope_left = u.values[0] / g.h();
  return quad + forward_difference_energy(g, u.values) + 0.5 * slope_left * slope_left;
}

}  // namespace kdvb
