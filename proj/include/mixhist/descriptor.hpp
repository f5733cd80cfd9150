#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include <Eigen/Core>

#include "mixhist/error.hpp"
#include "mixhist/imaging.hpp"

namespace mixhist {

/// Bin layout of the descriptor: uniform H/S/V color bins and edge-orientation bins.
struct QuantizationScheme {
  int n_h = 10;
  int n_s = 4;
  int n_v = 4;
  int n_q = 4;

  int n_c() const noexcept { return n_h * n_s * n_v; }
  int feature_length() const noexcept { return n_q * n_c(); }

  /// Throws InvalidArgument unless every count is in [1, 65535].
  void validate() const;

  /// Named color factorizations: 72 = 8x3x3, 90 = 10x3x3, 160 = 10x4x4, 240 = 15x4x4.
  static QuantizationScheme from_color_preset(int n_c, int n_q);

  bool operator==(const QuantizationScheme&) const = default;
};

template <typename Scalar>
struct GradientField {
  Plane<Scalar> gxx;
  Plane<Scalar> gyy;
  Plane<Scalar> gxy;
};

struct ColorMap {
  Plane<std::int32_t> bins;
  int n_c = 0;
};

struct OrientationMap {
  Plane<std::int32_t> bins;
  int n_q = 0;
};

/// n_q x n_c joint probability of (orientation bin, color bin) over all pixels.
struct MixHistogram {
  Eigen::MatrixXd values;
  QuantizationScheme scheme;
};

struct FeatureVector {
  Eigen::VectorXd values;
  QuantizationScheme scheme;

  Eigen::Index size() const noexcept { return values.size(); }
};

/// Color bin c = qh*(n_s*n_v) + qs*n_v + qv, uniform bins with the upper edge folded
/// into the last bin.
int quantize_color(double h, double s, double v, const QuantizationScheme& scheme);

/// 3x3 Sobel derivatives (unnormalized) with replicate padding at the borders.
/// Returns (d/dx, d/dy) where x runs along columns and y along rows.
template <typename Derived>
std::pair<Plane<typename Derived::Scalar>, Plane<typename Derived::Scalar>> sobel_partials(
    const Eigen::DenseBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index rows = plane.rows();
  const Eigen::Index cols = plane.cols();
  if (rows < kMinImageSide || cols < kMinImageSide) {
    throw Error(ErrorCode::ImageTooSmall, "sobel_partials needs at least a 3x3 plane");
  }
  const auto& p = plane.derived();
  Plane<Scalar> dx(rows, cols);
  Plane<Scalar> dy(rows, cols);
  for (Eigen::Index y = 0; y < rows; ++y) {
    const Eigen::Index up = y == 0 ? 0 : y - 1;
    const Eigen::Index dn = y + 1 == rows ? y : y + 1;
    for (Eigen::Index x = 0; x < cols; ++x) {
      const Eigen::Index lf = x == 0 ? 0 : x - 1;
      const Eigen::Index rt = x + 1 == cols ? x : x + 1;
      // Opposite taps are differenced first so a constant neighborhood gives exactly 0.
      dx(y, x) = (p(up, rt) - p(up, lf)) + Scalar(2) * (p(y, rt) - p(y, lf)) +
                 (p(dn, rt) - p(dn, lf));
      dy(y, x) = (p(dn, lf) - p(up, lf)) + Scalar(2) * (p(dn, x) - p(up, x)) +
                 (p(dn, rt) - p(up, rt));
    }
  }
  return {std::move(dx), std::move(dy)};
}

/// Per-pixel multi-channel structure tensor from the partials of the three channels:
/// gxx = sum (dC/dx)^2, gyy = sum (dC/dy)^2, gxy = sum dC/dx * dC/dy.
template <typename D0, typename D1, typename D2, typename D3, typename D4, typename D5>
GradientField<typename D0::Scalar> structure_tensor(
    const Eigen::ArrayBase<D0>& dh_x, const Eigen::ArrayBase<D1>& dh_y,
    const Eigen::ArrayBase<D2>& ds_x, const Eigen::ArrayBase<D3>& ds_y,
    const Eigen::ArrayBase<D4>& dv_x, const Eigen::ArrayBase<D5>& dv_y) {
  const auto same = [&](const auto& other) {
    return other.rows() == dh_x.rows() && other.cols() == dh_x.cols();
  };
  if (!same(dh_y) || !same(ds_x) || !same(ds_y) || !same(dv_x) || !same(dv_y)) {
    throw Error(ErrorCode::DimensionMismatch, "structure_tensor: partial planes differ in size");
  }
  GradientField<typename D0::Scalar> g;
  g.gxx = dh_x.square() + ds_x.square() + dv_x.square();
  g.gyy = dh_y.square() + ds_y.square() + dv_y.square();
  g.gxy = dh_x * dh_y + ds_x * ds_y + dv_x * dv_y;
  return g;
}

/// Rate of change of the multi-channel image along direction theta.
template <typename Scalar>
Scalar rate_of_change(Scalar gxx, Scalar gyy, Scalar gxy, Scalar theta) {
  using std::cos;
  using std::sin;
  using std::sqrt;
  const Scalar sq = Scalar(0.5) * ((gxx + gyy) + (gxx - gyy) * cos(Scalar(2) * theta) +
                                   Scalar(2) * gxy * sin(Scalar(2) * theta));
  return sqrt(sq > Scalar(0) ? sq : Scalar(0));
}

/// Direction in [0, pi) of maximum rate of change. The two orthogonal candidates from
/// the half-angle arctangent are compared by rate_of_change; a tie (isotropic or zero
/// gradient) yields 0.
template <typename Scalar>
Scalar edge_orientation(Scalar gxx, Scalar gyy, Scalar gxy) {
  using std::atan2;
  if (!(gxx >= Scalar(0)) || !(gyy >= Scalar(0))) {
    throw Error(ErrorCode::InvalidArgument, "edge_orientation: negative tensor diagonal");
  }
  constexpr Scalar kPi = std::numbers::pi_v<Scalar>;
  const Scalar first = Scalar(0.5) * atan2(Scalar(2) * gxy, gxx - gyy);
  const Scalar second = first + kPi / Scalar(2);
  const Scalar f_first = rate_of_change(gxx, gyy, gxy, first);
  const Scalar f_second = rate_of_change(gxx, gyy, gxy, second);
  if (f_first == f_second) return Scalar(0);
  Scalar best = f_first > f_second ? first : second;
  if (best < Scalar(0)) best += kPi;
  if (best >= kPi) best -= kPi;
  return best;
}

/// min(floor(theta * n_q / pi), n_q - 1); theta == pi folds into the last bin.
int quantize_orientation(double theta, int n_q);

/// Per-pixel HSV planes plus the edge orientation at each pixel. Independent of the
/// quantization scheme, so one analysis can be re-binned under many schemes.
struct PixelAnalysis {
  HSVImage hsv;
  Plane<double> orientation;
};

PixelAnalysis analyze(const RGBImage& img);
PixelAnalysis analyze(const HSVImage& hsv);

Plane<double> orientation_angles(const HSVImage& hsv);

ColorMap color_map(const HSVImage& hsv, const QuantizationScheme& scheme);
OrientationMap orientation_map(const Plane<double>& angles, int n_q);

MixHistogram mix_histogram(const ColorMap& colors, const OrientationMap& orients,
                           const QuantizationScheme& scheme);

/// Row-major flattening: index = orientation_bin * n_c + color_bin.
FeatureVector flatten(const MixHistogram& mh);

FeatureVector extract(const PixelAnalysis& analysis, const QuantizationScheme& scheme);
FeatureVector extract(const RGBImage& img, const QuantizationScheme& scheme);

}  // namespace mixhist
