#pragma once

#include "wellpose/field.hpp"

namespace wellpose {

// Second-order central-difference operators on the collocated grid.
// x derivatives wrap periodically; y derivatives use one-sided second-order
// closures on the wall rows. All operators are pure functions of their input
// and may run concurrently on distinct outputs.

void ddx_into(const ScalarField2D& f, ScalarField2D& out);
void ddy_into(const ScalarField2D& f, ScalarField2D& out);

VectorField2D gradient(const ScalarField2D& f);
void gradient_into(const ScalarField2D& f, VectorField2D& out);

ScalarField2D divergence(const VectorField2D& v);
void divergence_into(const VectorField2D& v, ScalarField2D& out);

/// Scalar vorticity: d(uy)/dx - d(ux)/dy.
ScalarField2D curl_z(const VectorField2D& v);

/// In 2D, curl(curl u) = (dw/dy, -dw/dx) with w = curl_z(u).
VectorField2D curl_of_curl(const VectorField2D& v);

/// Divergence form of the advection tensor: component i is
/// d(v_i v_x)/dx + d(v_i v_y)/dy.
VectorField2D advection_div(const VectorField2D& v);

/// 5-point Laplacian; one-sided second-order d2/dy2 on the wall rows.
ScalarField2D laplacian(const ScalarField2D& f);
void laplacian_into(const ScalarField2D& f, ScalarField2D& out);

/// y-quadrature weight, dy * (1/4, 5/4, 1, ..., 1, 5/4, 1/4).
///
/// These weights annihilate the weighted column sum of ddy applied to any
/// field that vanishes on both walls, so divergence-form budgets (mass, in
/// particular) telescope exactly to the wall fluxes. The weights sum to ly.
double quadrature_weight_y(const Grid2D& g, int j);

/// Integral of f over the domain: dx sum_i sum_j w_j f(i,j).
double integrate(const ScalarField2D& f);

}  // namespace wellpose
