#pragma once

// Convergence rate in the period: least squares of log(err) = c + p log(eps).
// With a reference k_ref, err_i = |k(eps_i) - k_ref|; without one the
// epsilons must form a halving chain and err_i = |k(eps_i) - k(eps_i/2)| / k(eps_i/2).

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tehom/error.hpp"

namespace tehom {

struct RateFit {
  std::vector<double> epsilons;
  std::vector<double> k1s;
  std::optional<double> k_ref;  // none = successive relative errors
  std::vector<double> fit_eps;  // abscissae actually fitted
  std::vector<double> errors;
  double p = 0.0;  // slope
  double c = 0.0;  // intercept, log C
  std::vector<std::string> warnings;

  bool relative() const { return !k_ref.has_value(); }
};

namespace detail {

inline std::pair<double, double> line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double p = sxy / sxx;
  return {p, my - p * mx};
}

}  // namespace detail

inline RateFit fit_rate(const std::vector<double>& epsilons, const std::vector<double>& k1s,
                        std::optional<double> k_ref = std::nullopt) {
  require(epsilons.size() == k1s.size(), ErrorKind::InvalidParameter, "epsilons and k1 values differ in length");
  require(epsilons.size() >= 3, ErrorKind::InvalidParameter, "a rate fit needs at least three points");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    require(epsilons[i] > 0.0 && std::isfinite(k1s[i]), ErrorKind::InvalidParameter,
            "epsilons must be positive and k1 values finite");
  }
  RateFit fit;
  fit.epsilons = epsilons;
  fit.k1s = k1s;
  fit.k_ref = k_ref;

  std::vector<std::size_t> order(epsilons.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return epsilons[a] > epsilons[b]; });

  if (k_ref) {
    for (std::size_t i : order) {
      const double err = std::abs(k1s[i] - *k_ref);
      if (err == 0.0) {
        fit.warnings.push_back("eps = " + std::to_string(epsilons[i]) + " has zero error and is excluded");
        continue;
      }
      fit.fit_eps.push_back(epsilons[i]);
      fit.errors.push_back(err);
    }
  } else {
    for (std::size_t j = 0; j + 1 < order.size(); ++j) {
      const double e0 = epsilons[order[j]], e1 = epsilons[order[j + 1]];
      require(std::abs(e1 - 0.5 * e0) <= 1e-9 * e0, ErrorKind::InvalidParameter,
              "relative-error mode needs a halving chain of epsilons");
      const double k0 = k1s[order[j]], k1 = k1s[order[j + 1]];
      const double err = std::abs(k0 - k1) / std::abs(k1);
      if (err == 0.0) {
        fit.warnings.push_back("eps = " + std::to_string(e0) + " has zero relative error and is excluded");
        continue;
      }
      fit.fit_eps.push_back(e0);
      fit.errors.push_back(err);
    }
  }
  require(fit.errors.size() >= 2, ErrorKind::InvalidParameter, "fewer than two nonzero errors to fit");

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < fit.errors.size(); ++i) {
    lx.push_back(std::log(fit.fit_eps[i]));
    ly.push_back(std::log(fit.errors[i]));
  }
  std::tie(fit.p, fit.c) = detail::line_fit(lx, ly);
  return fit;
}

}  // namespace tehom
