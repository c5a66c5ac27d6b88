#include "relay_osc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <unsupported/Eigen/MatrixFunctions>

#include "relay_osc/error.hpp"

namespace relay_osc {

Matrix expm(const Matrix& m, double t) {
  if (!m.allFinite() || !std::isfinite(t)) {
    throw Error(ErrorCode::kInvalidArgument, "expm: non-finite input");
  }
  const Matrix scaled = m * t;
  Matrix result = scaled.exp();
  if (!result.allFinite()) {
    throw Error(ErrorCode::kOverflow, "expm: result overflows (||Mt||_1 = " +
                                          std::to_string(scaled.lpNorm<1>()) + ")");
  }
  return result;
}

AffineFlow affine_flow(const Matrix& a, const Vector& b, double t) {
  const Eigen::Index n = a.rows();
  Matrix bordered = Matrix::Zero(n + 1, n + 1);
  bordered.topLeftCorner(n, n) = a;
  bordered.topRightCorner(n, 1) = b;
  const Matrix e = expm(bordered, t);
  return AffineFlow{e.topLeftCorner(n, n), e.topRightCorner(n, 1)};
}

EigenDecomposition eigen_decompose(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, true);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::kInvalidArgument, "eigensolver did not converge");
  }
  EigenDecomposition e;
  e.eigenvalues = solver.eigenvalues();
  e.eigenvectors = solver.eigenvectors();
  for (Eigen::Index j = 0; j < e.eigenvectors.cols(); ++j) {
    const double nrm = e.eigenvectors.col(j).norm();
    if (nrm > 0.0) e.eigenvectors.col(j) /= nrm;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(e.eigenvectors);
  const auto& s = svd.singularValues();
  e.is_diagonalizable = s.size() == 0 || s(s.size() - 1) > 1e-10 * s(0);
  return e;
}

double bauer_fike(const EigenDecomposition& e) {
  if (!e.is_diagonalizable) {
    throw Error(ErrorCode::kNonDiagonalizable, "non-diagonalizable");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(e.eigenvectors);
  const auto& s = svd.singularValues();
  return s(0) / s(s.size() - 1);
}

double eigenvector_condition(const EigenDecomposition& e) {
  Eigen::JacobiSVD<ComplexMatrix> svd(e.eigenvectors);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

ComplexVector eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> solver(m, false);
  return solver.eigenvalues();
}

double spectral_radius(const Matrix& m) { return eigenvalues(m).cwiseAbs().maxCoeff(); }

double spectral_abscissa(const Matrix& m) { return eigenvalues(m).real().maxCoeff(); }

double norm2(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

double norm2(const Vector& v) { return v.norm(); }

std::vector<Complex> polynomial_roots(std::span<const double> ascending) {
  std::size_t d = ascending.size();
  while (d > 0 && ascending[d - 1] == 0.0) --d;
  if (d <= 1) return {};
  const std::size_t deg = d - 1;
  const double lead = ascending[deg];
  Matrix companion = Matrix::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  for (std::size_t i = 0; i < deg; ++i) companion(i, deg - 1) = -ascending[i] / lead;
  const ComplexVector ev = eigenvalues(companion);
  std::vector<Complex> roots(ev.data(), ev.data() + ev.size());
  sort_complex(roots);
  return roots;
}

std::vector<Complex> nonzero_eigenvalues(const Matrix& m, double rel_tol) {
  const ComplexVector ev = eigenvalues(m);
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  std::vector<Complex> out;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (std::abs(ev(i)) > rel_tol * scale) out.push_back(ev(i));
  }
  sort_complex(out);
  return out;
}

void sort_complex(std::vector<Complex>& values) {
  std::sort(values.begin(), values.end(), [](const Complex& x, const Complex& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
}

}  // namespace relay_osc
