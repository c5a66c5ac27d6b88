#include "relay_osc/plant.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "relay_osc/error.hpp"
#include "relay_osc/linalg.hpp"

namespace relay_osc {

namespace {

void require_finite(std::span<const double> c, const char* what) {
  for (double v : c) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidPlant, std::string(what) + " has a non-finite coefficient");
    }
  }
}

int degree(std::span<const double> c) {
  int d = static_cast<int>(c.size()) - 1;
  while (d >= 0 && c[static_cast<std::size_t>(d)] == 0.0) --d;
  return d;
}

}  // namespace

int TransferFunction::numerator_degree() const { return degree(num); }

Complex TransferFunction::evaluate(Complex s) const {
  Complex p = 0.0;
  for (auto it = num.rbegin(); it != num.rend(); ++it) p = p * s + *it;
  Complex q = 1.0;
  for (auto it = den.rbegin(); it != den.rend(); ++it) q = q * s + *it;
  return p / q;
}

TransferFunction parse_plant(std::span<const double> num, std::span<const double> den) {
  require_finite(num, "numerator");
  require_finite(den, "denominator");
  if (den.empty()) throw Error(ErrorCode::kInvalidPlant, "denominator is empty");
  const double lead = den.back();
  if (lead == 0.0) {
    throw Error(ErrorCode::kInvalidPlant, "leading denominator coefficient is zero");
  }
  const int n = static_cast<int>(den.size()) - 1;
  if (n < 1) throw Error(ErrorCode::kInvalidPlant, "denominator degree must be at least 1");
  const int m = degree(num);
  if (m >= n) {
    throw Error(ErrorCode::kInvalidPlant,
                "improper transfer function: numerator degree " + std::to_string(m) +
                    " >= denominator degree " + std::to_string(n));
  }
  TransferFunction tf;
  tf.den.resize(static_cast<std::size_t>(n));
  tf.num.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) tf.den[static_cast<std::size_t>(i)] = den[static_cast<std::size_t>(i)] / lead;
  for (int i = 0; i <= m; ++i) tf.num[static_cast<std::size_t>(i)] = num[static_cast<std::size_t>(i)] / lead;
  return tf;
}

TransferFunction make_monic_plant(std::span<const double> b, std::span<const double> a) {
  std::vector<double> den(a.begin(), a.end());
  den.push_back(1.0);
  return parse_plant(b, den);
}

TransferFunction parse_plant_descending(std::span<const double> num,
                                        std::span<const double> den) {
  std::vector<double> n(num.rbegin(), num.rend());
  std::vector<double> d(den.rbegin(), den.rend());
  return parse_plant(n, d);
}

Complex StateSpace::transfer(Complex s) const {
  const Eigen::Index n = a.rows();
  const ComplexMatrix m = s * ComplexMatrix::Identity(n, n) - a.cast<Complex>();
  const ComplexVector x = m.partialPivLu().solve(b.cast<Complex>());
  return (c.cast<Complex>() * x)(0);
}

Complex StateSpace::transfer_derivative(Complex s) const {
  const Eigen::Index n = a.rows();
  const ComplexMatrix m = s * ComplexMatrix::Identity(n, n) - a.cast<Complex>();
  const auto lu = m.partialPivLu();
  const ComplexVector x = lu.solve(lu.solve(b.cast<Complex>()));
  return -(c.cast<Complex>() * x)(0);
}

StateSpace realize(const TransferFunction& tf) {
  const int n = tf.order();
  StateSpace ss;
  ss.a = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) ss.a(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) ss.a(i, n - 1) = -tf.den[static_cast<std::size_t>(i)];
  ss.b = Eigen::Map<const Vector>(tf.num.data(), n);
  ss.c = RowVector::Zero(n);
  ss.c(n - 1) = 1.0;
  return ss;
}

PlantClass classify(const TransferFunction& tf, const ClassifyOptions& options) {
  PlantClass pc;
  const int n = tf.order();
  const StateSpace ss = realize(tf);
  const ComplexVector poles = eigenvalues(ss.a);
  pc.poles.assign(poles.data(), poles.data() + poles.size());
  sort_complex(pc.poles);
  pc.zeros = polynomial_roots(tf.num);

  pc.is_stable = true;
  for (const Complex& p : pc.poles) {
    if (std::abs(p.real()) <= options.stability_margin) pc.has_marginal_pole = true;
    if (!(p.real() < -options.stability_margin)) pc.is_stable = false;
  }
  if (pc.has_marginal_pole) pc.notes.emplace_back("marginal pole on the imaginary axis");

  pc.dc_gain = tf.num.front() / tf.den.front();

  const int m = tf.numerator_degree();
  if (m < 0) {
    pc.relative_degree = 0;
    pc.notes.emplace_back("numerator is identically zero");
  } else {
    pc.relative_degree = n - m;
  }
  for (const Complex& z : pc.zeros) {
    if (std::abs(z.imag()) < options.zero_tolerance && z.real() > options.zero_tolerance) {
      ++pc.n_positive_real_zeros;
    }
  }

  pc.is_brl_urf = m >= 0 && pc.relative_degree == 1 && pc.is_stable &&
                  !pc.has_marginal_pole && std::isfinite(pc.dc_gain) && pc.dc_gain > 0.0 &&
                  pc.n_positive_real_zeros % 2 == 1;
  if (m >= 0 && pc.relative_degree != 1) {
    pc.notes.emplace_back("relative degree " + std::to_string(pc.relative_degree) + " is not 1");
  }
  return pc;
}

}  // namespace relay_osc
