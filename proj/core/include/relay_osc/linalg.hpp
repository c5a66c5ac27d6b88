#pragma once

#include <span>

#include "relay_osc/types.hpp"

namespace relay_osc {

// e^{M t}. Throws ErrorCode::kOverflow when the result is not finite.
Matrix expm(const Matrix& m, double t = 1.0);

// e^{At} together with w(t) = int_0^t e^{As} B ds, from one exponential of
// the bordered matrix [[A, B], [0, 0]].
struct AffineFlow {
  Matrix transition;
  Vector forced;
};
AffineFlow affine_flow(const Matrix& a, const Vector& b, double t);

struct EigenDecomposition {
  ComplexVector eigenvalues;
  ComplexMatrix eigenvectors;  // unit 2-norm columns
  bool is_diagonalizable = false;
};

EigenDecomposition eigen_decompose(const Matrix& m);

// kappa_2 of the unit-column eigenvector matrix. Throws kNonDiagonalizable.
double bauer_fike(const EigenDecomposition& e);

// Same quantity without the diagonalizability check; infinite when V is singular.
double eigenvector_condition(const EigenDecomposition& e);

ComplexVector eigenvalues(const Matrix& m);
double spectral_radius(const Matrix& m);
double spectral_abscissa(const Matrix& m);
double norm2(const Matrix& m);
double norm2(const Vector& v);

// Roots of c_0 + c_1 x + ... + c_d x^d via the companion matrix. Trailing
// zero coefficients are dropped first.
std::vector<Complex> polynomial_roots(std::span<const double> ascending);

// Eigenvalues whose modulus exceeds rel_tol * max(1, spectral radius).
std::vector<Complex> nonzero_eigenvalues(const Matrix& m, double rel_tol = 1e-9);

// Sort by (real, imag) for reproducible comparisons.
void sort_complex(std::vector<Complex>& values);

}  // namespace relay_osc
