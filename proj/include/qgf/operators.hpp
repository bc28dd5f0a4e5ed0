// operators.hpp
// Discrete difference operators, inner products and norms on grid fields.
//
// Conventions (all componentwise unless stated):
//   D+_a f_i = (f_{i+1} - f_i)/h      D-_a f_i = (f_i - f_{i-1})/h
//   Dc_a f_i = (f_{i+1} - f_{i-1})/(2h)
//   laplacian_h = sum_a D-_a D+_a, evaluated at interior nodes, zero at
//     the boundary.
//   div_h(Q)_b = sum_a Dc_a Q_ab, evaluated at ALL real nodes 0..N+1;
//     boundary values read the zero ghosts. Including them is what makes
//     the summation-by-parts identities and the discrete energy law exact.
//   alpha_h: in 3D the central-difference mixed-derivative operator
//     alpha_h(Q)_ws = Dc_w u_s + Dc_s u_w - (2/d) (sum_b Dc_b u_b) delta_ws
//     with u_s = sum_b Dc_b Q_sb; in 2D it reduces to laplacian_h.
//   inner_h / norm_h: h^d-weighted sums over real nodes 0..N+1.

#pragma once

#include "qgf/field.hpp"

namespace qgf {

enum class DiffKind { forward, backward, central };

// Fixed-order reductions are the default so runs are bit-reproducible;
// the blocked mode reorders the accumulation for speed.
enum class ReductionMode { deterministic, blocked };
ReductionMode reduction_mode();
void set_reduction_mode(ReductionMode m);

// axis is 1-based (1..dim) per the operator definitions.
Field diff(const Field& f, int axis, DiffKind kind);

Field laplacian_h(const Field& q);

// Central-difference alpha operator for any dimension (2/d trace shift).
Field alpha_h_central(const Field& q);

// The scheme's alpha: alpha_h_central in 3D, laplacian_h in 2D.
Field alpha_h(const Field& q);

Field div_h(const Field& q);

double inner_h(const Field& a, const Field& b);
double norm_h(const Field& a);
double norm_h_sq(const Field& a);

// ||grad_h A||^2 = sum_a ||D-_a A||^2 over real nodes (the node-(N+1)
// backward differences carry the boundary-layer contribution).
double grad_norm_h_sq(const Field& a);

// ||div_h Q||^2 without materializing the divergence field.
double div_norm_h_sq(const Field& q);

// Max |tr| and max |Q - Q^T| entry over interior nodes of a tensor field.
struct StructureDrift {
  double trace = 0.0;
  double asym = 0.0;
};
StructureDrift structure_drift(const Field& q);

}  // namespace qgf
