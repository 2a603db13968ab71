#pragma once
// Central-difference gradient checks against the analytic backward pass.

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "socnav/nn.hpp"

namespace gradcheck {

using socnav::nn::Matrix;

struct Report {
  double max_relative_error = 0.0;
  int checked = 0;
};

inline double relative_error(double analytic, double numeric) {
  const double diff = std::abs(analytic - numeric);
  if (diff < 1e-9) return 0.0;
  return diff / std::max({std::abs(analytic), std::abs(numeric), 1e-6});
}

inline void record(Report& r, double analytic, double numeric) {
  r.max_relative_error = std::max(r.max_relative_error, relative_error(analytic, numeric));
  ++r.checked;
}

/**
 * Checks d(sum(weights .* net(x)))/d(params) and, when `check_input` is set,
 * d/dx. At most `per_tensor` entries of each tensor are probed.
 */
template <class Net>
Report check(Net& net, const Matrix& x, std::mt19937_64& rng, bool check_input = true,
             int per_tensor = 60, double h = 1e-5) {
  Matrix probe = net.forward(x);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Matrix weights = probe.unaryExpr([&](double) { return u(rng); });
  const auto loss = [&](const Matrix& input) { return (net.forward(input).cwiseProduct(weights)).sum(); };

  auto params = net.parameters();
  socnav::nn::zero_grad(params);
  net.forward(x);
  const Matrix grad_input = net.backward(weights);

  Report report;
  const auto pick = [&](Eigen::Index size) {
    std::vector<Eigen::Index> idx;
    if (size <= per_tensor) {
      for (Eigen::Index i = 0; i < size; ++i) idx.push_back(i);
    } else {
      std::uniform_int_distribution<Eigen::Index> d(0, size - 1);
      for (int i = 0; i < per_tensor; ++i) idx.push_back(d(rng));
    }
    return idx;
  };
  for (auto* p : params) {
    for (Eigen::Index i : pick(p->value.size())) {
      double& w = p->value.data()[i];
      const double saved = w;
      w = saved + h;
      const double up = loss(x);
      w = saved - h;
      const double down = loss(x);
      w = saved;
      record(report, p->grad.data()[i], (up - down) / (2 * h));
    }
  }
  if (check_input) {
    Matrix xp = x;
    for (Eigen::Index i : pick(x.size())) {
      const double saved = xp.data()[i];
      xp.data()[i] = saved + h;
      const double up = loss(xp);
      xp.data()[i] = saved - h;
      const double down = loss(xp);
      xp.data()[i] = saved;
      record(report, grad_input.data()[i], (up - down) / (2 * h));
    }
  }
  return report;
}

}  // namespace gradcheck
