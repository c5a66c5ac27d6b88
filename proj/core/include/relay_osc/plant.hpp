#pragma once

#include <span>
#include <string>
#include <vector>

#include "relay_osc/types.hpp"

namespace relay_osc {

// G(s) = (b_0 + ... + b_{n-1} s^{n-1}) / (a_0 + ... + a_{n-1} s^{n-1} + s^n)
struct TransferFunction {
  std::vector<double> num;  // b_0..b_{n-1}, zero padded
  std::vector<double> den;  // a_0..a_{n-1}

  int order() const { return static_cast<int>(den.size()); }
  double leading_num() const { return num.back(); }
  int numerator_degree() const;  // -1 when the numerator is identically zero
  Complex evaluate(Complex s) const;
};

// num and den in ascending powers. den includes its leading coefficient and is
// divided through by it.
TransferFunction parse_plant(std::span<const double> num, std::span<const double> den);

// b = b_0..b_{n-1} and a = a_0..a_{n-1} with the s^n coefficient implied.
TransferFunction make_monic_plant(std::span<const double> b, std::span<const double> a);

// Same as parse_plant but for coefficient lists in descending powers.
TransferFunction parse_plant_descending(std::span<const double> num,
                                        std::span<const double> den);

struct StateSpace {
  Matrix a;
  Vector b;
  RowVector c;

  int order() const { return static_cast<int>(a.rows()); }
  double leading_num() const { return b(b.size() - 1); }
  Complex transfer(Complex s) const;             // C (sI - A)^{-1} B
  Complex transfer_derivative(Complex s) const;  // -C (sI - A)^{-2} B
};

// Observer canonical form: companion A with -a in the last column, B = b, C = e_n.
StateSpace realize(const TransferFunction& tf);

struct ClassifyOptions {
  double stability_margin = 1e-9;
  double zero_tolerance = 1e-9;
};

struct PlantClass {
  bool is_stable = false;
  bool has_marginal_pole = false;
  double dc_gain = 0.0;
  int relative_degree = 0;
  int n_positive_real_zeros = 0;
  bool is_brl_urf = false;
  std::vector<Complex> zeros;
  std::vector<Complex> poles;
  std::vector<std::string> notes;
};

PlantClass classify(const TransferFunction& tf, const ClassifyOptions& options = {});

}  // namespace relay_osc
