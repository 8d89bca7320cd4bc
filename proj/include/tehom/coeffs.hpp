#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>

#include "tehom/error.hpp"

namespace tehom {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

enum class FieldKind { Constant, Smooth, Piecewise };

inline std::string_view to_string(FieldKind k) {
  switch (k) {
    case FieldKind::Constant: return "constant";
    case FieldKind::Smooth: return "smooth-formula";
    case FieldKind::Piecewise: return "piecewise-cellwise";
  }
  return "unknown";
}

/// Symmetric tensor A(y) on the unit cell with spectral bounds.
struct TensorField {
  std::string name;
  FieldKind kind = FieldKind::Constant;
  std::function<Mat2(const Vec2&)> eval;
  double min_eig = 1.0;
  double max_eig = 1.0;
};

/// Scalar index n(y) on the unit cell. `mean` holds the analytic cell
/// average when one is known, NaN otherwise.
struct ScalarField {
  std::string name;
  FieldKind kind = FieldKind::Constant;
  std::function<double(const Vec2&)> eval;
  double min = 1.0;
  double max = 1.0;
  double mean = std::numeric_limits<double>::quiet_NaN();
};

struct Bounds {
  double a_min, a_max, n_min, n_max;
};

/// A periodic pair (A, n) observed at period `epsilon`: at a physical point
/// x it evaluates A(x/eps mod 1), n(x/eps mod 1).
struct CoefficientField {
  TensorField a;
  ScalarField n;
  double epsilon = 1.0;

  FieldKind kind() const {
    if (a.kind == FieldKind::Piecewise || n.kind == FieldKind::Piecewise) return FieldKind::Piecewise;
    if (a.kind == FieldKind::Smooth || n.kind == FieldKind::Smooth) return FieldKind::Smooth;
    return FieldKind::Constant;
  }

  Bounds bounds() const { return {a.min_eig, a.max_eig, n.min, n.max}; }

  bool isotropic_identity() const {
    return a.kind == FieldKind::Constant && a.min_eig == 1.0 && a.max_eig == 1.0;
  }

  bool unit_index() const { return n.kind == FieldKind::Constant && n.min == 1.0 && n.max == 1.0; }

  std::string describe() const { return a.name + " + " + n.name; }
};

inline Vec2 wrap_to_cell(const Vec2& y) {
  Vec2 out(y.x() - std::floor(y.x()), y.y() - std::floor(y.y()));
  // floor of values like -1e-17 gives exactly 1.0 after subtraction
  if (out.x() >= 1.0) out.x() = 0.0;
  if (out.y() >= 1.0) out.y() = 0.0;
  return out;
}

inline std::pair<Mat2, double> evaluate(const CoefficientField& field, const Vec2& x) {
  const Vec2 y = wrap_to_cell(x / field.epsilon);
  return {field.a.eval(y), field.n.eval(y)};
}

inline Mat2 evaluate_a(const CoefficientField& field, const Vec2& x) {
  return field.a.eval(wrap_to_cell(x / field.epsilon));
}

inline double evaluate_n(const CoefficientField& field, const Vec2& x) {
  return field.n.eval(wrap_to_cell(x / field.epsilon));
}

inline CoefficientField rescale(CoefficientField field, double epsilon) {
  require(epsilon > 0.0 && std::isfinite(epsilon), ErrorKind::InvalidParameter,
          "rescale needs epsilon > 0");
  field.epsilon *= epsilon;
  return field;
}

/// The same field sampled at period one (cell coordinates).
inline CoefficientField at_unit_period(CoefficientField field) {
  field.epsilon = 1.0;
  return field;
}

inline CoefficientField combine(TensorField a, ScalarField n, double epsilon = 1.0) {
  return rescale(CoefficientField{std::move(a), std::move(n), 1.0}, epsilon);
}

// ---------------------------------------------------------------------------
// Presets. Cell coordinates y in [0,1)^2.

namespace presets {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kVoidRadius = 0.25;

inline TensorField tensor_constant(double a) {
  require(a > 0.0, ErrorKind::InvalidParameter, "constant tensor needs a > 0");
  return {"constant-A(" + std::to_string(a) + ")", FieldKind::Constant,
          [a](const Vec2&) -> Mat2 { return a * Mat2::Identity(); }, a, a};
}

inline TensorField identity_tensor() {
  auto t = tensor_constant(1.0);
  t.name = "I";
  return t;
}

/// (1/3) diag(sin^2(2 pi y2) + 1, cos^2(2 pi y1) + 1); divergence free per
/// column, so the cell correctors vanish and A_h = I/2.
inline TensorField tensor_sincos() {
  return {"sincos-A", FieldKind::Smooth,
          [](const Vec2& y) -> Mat2 {
            const double s = std::sin(kTwoPi * y.y());
            const double c = std::cos(kTwoPi * y.x());
            Mat2 m = Mat2::Zero();
            m(0, 0) = (s * s + 1.0) / 3.0;
            m(1, 1) = (c * c + 1.0) / 3.0;
            return m;
          },
          1.0 / 3.0, 2.0 / 3.0};
}

/// Clockwise rotation by `angle` radians.
inline Mat2 clockwise_rotation(double angle) {
  Mat2 t;
  t << std::cos(angle), std::sin(angle), -std::sin(angle), std::cos(angle);
  return t;
}

/// T A T^T with A = sincos-A and T the clockwise rotation by one radian.
inline TensorField tensor_rotated(double angle = 1.0) {
  const Mat2 t = clockwise_rotation(angle);
  const TensorField base = tensor_sincos();
  return {"rotated-A", FieldKind::Smooth,
          [t, f = base.eval](const Vec2& y) -> Mat2 { return t * f(y) * t.transpose(); },
          base.min_eig, base.max_eig};
}

inline bool checker_first_phase(const Vec2& y) { return (y.x() < 0.5) == (y.y() < 0.5); }

inline bool in_void(const Vec2& y) {
  const double dx = y.x() - 0.5;
  const double dy = y.y() - 0.5;
  return dx * dx + dy * dy < kVoidRadius * kVoidRadius;
}

inline TensorField tensor_checkerboard(double a1, double a2) {
  require(a1 > 0.0 && a2 > 0.0, ErrorKind::InvalidParameter, "checkerboard needs a1, a2 > 0");
  return {"checkerboard-A", a1 == a2 ? FieldKind::Constant : FieldKind::Piecewise,
          [a1, a2](const Vec2& y) -> Mat2 {
            return (checker_first_phase(y) ? a1 : a2) * Mat2::Identity();
          },
          std::min(a1, a2), std::max(a1, a2)};
}

/// a_out I outside a centred disk of radius 1/4, I inside.
inline TensorField tensor_voids(double a_out) {
  require(a_out > 0.0, ErrorKind::InvalidParameter, "voids needs a_out > 0");
  return {"voids-A", a_out == 1.0 ? FieldKind::Constant : FieldKind::Piecewise,
          [a_out](const Vec2& y) -> Mat2 { return (in_void(y) ? 1.0 : a_out) * Mat2::Identity(); },
          std::min(1.0, a_out), std::max(1.0, a_out)};
}

inline ScalarField scalar_constant(double n) {
  require(n > 0.0, ErrorKind::InvalidParameter, "constant index needs n > 0");
  return {"constant-n(" + std::to_string(n) + ")", FieldKind::Constant,
          [n](const Vec2&) { return n; }, n, n, n};
}

/// sin^2(2 pi y1) + cos^2(2 pi y2) + 2, mean 3.
inline ScalarField scalar_sincos() {
  return {"sincos-n", FieldKind::Smooth,
          [](const Vec2& y) {
            const double s = std::sin(kTwoPi * y.x());
            const double c = std::cos(kTwoPi * y.y());
            return s * s + c * c + 2.0;
          },
          2.0, 4.0, 3.0};
}

/// sin^2(2 pi y1) + 2, mean 5/2.
inline ScalarField scalar_layered() {
  return {"layered-n", FieldKind::Smooth,
          [](const Vec2& y) {
            const double s = std::sin(kTwoPi * y.x());
            return s * s + 2.0;
          },
          2.0, 3.0, 2.5};
}

inline ScalarField scalar_checkerboard(double n1, double n2) {
  require(n1 > 0.0 && n2 > 0.0, ErrorKind::InvalidParameter, "checkerboard needs n1, n2 > 0");
  return {"checkerboard-n", n1 == n2 ? FieldKind::Constant : FieldKind::Piecewise,
          [n1, n2](const Vec2& y) { return checker_first_phase(y) ? n1 : n2; },
          std::min(n1, n2), std::max(n1, n2), 0.5 * (n1 + n2)};
}

/// n_out outside a centred disk of radius 1/4, 1 inside.
inline ScalarField scalar_voids(double n_out) {
  require(n_out > 0.0, ErrorKind::InvalidParameter, "voids needs n_out > 0");
  const double frac = std::numbers::pi * kVoidRadius * kVoidRadius;
  return {"voids-n", n_out == 1.0 ? FieldKind::Constant : FieldKind::Piecewise,
          [n_out](const Vec2& y) { return in_void(y) ? 1.0 : n_out; },
          std::min(1.0, n_out), std::max(1.0, n_out), n_out * (1.0 - frac) + frac};
}

}  // namespace presets

// ---------------------------------------------------------------------------
// Cell averages.

namespace detail {

// Piecewise-constant integrand on a square: split while any of the 3x3
// sample points disagree, otherwise the square is treated as uniform.
template <typename F>
double adaptive_square(const F& f, double x0, double y0, double size, int depth) {
  double first = 0.0;
  bool uniform = true;
  for (int j = 0; j <= 2 && uniform; ++j) {
    for (int i = 0; i <= 2; ++i) {
      const double v = f(Vec2(x0 + 0.5 * i * size, y0 + 0.5 * j * size));
      if (i == 0 && j == 0) {
        first = v;
      } else if (v != first) {
        uniform = false;
        break;
      }
    }
  }
  if (uniform || depth <= 0) return f(Vec2(x0 + 0.5 * size, y0 + 0.5 * size)) * size * size;
  const double h = 0.5 * size;
  return adaptive_square(f, x0, y0, h, depth - 1) + adaptive_square(f, x0 + h, y0, h, depth - 1) +
         adaptive_square(f, x0, y0 + h, h, depth - 1) + adaptive_square(f, x0 + h, y0 + h, h, depth - 1);
}

}  // namespace detail

/// Cell average of a scalar function of y. Smooth integrands use the
/// composite midpoint rule (spectrally accurate for periodic data);
/// piecewise ones are refined adaptively around the interfaces.
template <typename F>
double cell_average(const F& f, FieldKind kind) {
  if (kind == FieldKind::Constant) return f(Vec2(0.5, 0.5));
  const int base = 64;
  const double h = 1.0 / base;
  double sum = 0.0;
  for (int j = 0; j < base; ++j) {
    for (int i = 0; i < base; ++i) {
      const Vec2 y((i + 0.5) * h, (j + 0.5) * h);
      if (kind == FieldKind::Smooth) {
        sum += f(y) * h * h;
      } else {
        sum += detail::adaptive_square(f, i * h, j * h, h, 12);
      }
    }
  }
  return sum;
}

inline double mean_n(const ScalarField& n) {
  return cell_average([&](const Vec2& y) { return n.eval(y); }, n.kind);
}

}  // namespace tehom
