#include "mixhist/descriptor.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace mixhist {

namespace {

int uniform_bin(double value, int bins) {
  const int q = static_cast<int>(std::floor(value * bins));
  return std::min(q, bins - 1);
}

}  // namespace

void QuantizationScheme::validate() const {
  for (int n : {n_h, n_s, n_v, n_q}) {
    if (n < 1 || n > 65535) {
      throw Error(ErrorCode::InvalidArgument,
                  "quantization counts must lie in [1, 65535], got " + std::to_string(n));
    }
  }
}

QuantizationScheme QuantizationScheme::from_color_preset(int n_c, int n_q) {
  QuantizationScheme s;
  switch (n_c) {
    case 72: s = {8, 3, 3, n_q}; break;
    case 90: s = {10, 3, 3, n_q}; break;
    case 160: s = {10, 4, 4, n_q}; break;
    case 240: s = {15, 4, 4, n_q}; break;
    default:
      throw Error(ErrorCode::InvalidArgument,
                  "no color preset for Nc=" + std::to_string(n_c) +
                      " (known: 72, 90, 160, 240)");
  }
  s.validate();
  return s;
}

int quantize_color(double h, double s, double v, const QuantizationScheme& scheme) {
  if (!(h >= 0.0 && h <= 1.0) || !(s >= 0.0 && s <= 1.0) || !(v >= 0.0 && v <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantize_color: HSV component outside [0,1]");
  }
  const int qh = uniform_bin(h, scheme.n_h);
  const int qs = uniform_bin(s, scheme.n_s);
  const int qv = uniform_bin(v, scheme.n_v);
  return qh * (scheme.n_s * scheme.n_v) + qs * scheme.n_v + qv;
}

int quantize_orientation(double theta, int n_q) {
  constexpr double kPi = std::numbers::pi;
  if (n_q < 1) throw Error(ErrorCode::InvalidArgument, "quantize_orientation: n_q < 1");
  if (!(theta >= 0.0 && theta <= kPi)) {
    throw Error(ErrorCode::InvalidArgument, "quantize_orientation: theta outside [0, pi)");
  }
  const int q = static_cast<int>(std::floor(theta * n_q / kPi));
  return std::min(q, n_q - 1);
}

Plane<double> orientation_angles(const HSVImage& hsv) {
  auto [dh_x, dh_y] = sobel_partials(hsv.h);
  auto [ds_x, ds_y] = sobel_partials(hsv.s);
  auto [dv_x, dv_y] = sobel_partials(hsv.v);
  const auto g = structure_tensor(dh_x, dh_y, ds_x, ds_y, dv_x, dv_y);
  Plane<double> theta(g.gxx.rows(), g.gxx.cols());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    theta(i) = edge_orientation(g.gxx(i), g.gyy(i), g.gxy(i));
  }
  return theta;
}

PixelAnalysis analyze(const HSVImage& hsv) {
  return {hsv, orientation_angles(hsv)};
}

PixelAnalysis analyze(const RGBImage& img) { return analyze(rgb_to_hsv(img)); }

ColorMap color_map(const HSVImage& hsv, const QuantizationScheme& scheme) {
  scheme.validate();
  ColorMap out{Plane<std::int32_t>(hsv.height(), hsv.width()), scheme.n_c()};
  for (Eigen::Index i = 0; i < out.bins.size(); ++i) {
    out.bins(i) = quantize_color(hsv.h(i), hsv.s(i), hsv.v(i), scheme);
  }
  return out;
}

OrientationMap orientation_map(const Plane<double>& angles, int n_q) {
  OrientationMap out{Plane<std::int32_t>(angles.rows(), angles.cols()), n_q};
  for (Eigen::Index i = 0; i < angles.size(); ++i) {
    out.bins(i) = quantize_orientation(angles(i), n_q);
  }
  return out;
}

MixHistogram mix_histogram(const ColorMap& colors, const OrientationMap& orients,
                           const QuantizationScheme& scheme) {
  if (colors.bins.rows() != orients.bins.rows() || colors.bins.cols() != orients.bins.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "mix_histogram: color and orientation maps differ");
  }
  if (colors.n_c != scheme.n_c() || orients.n_q != scheme.n_q) {
    throw Error(ErrorCode::SchemeMismatch, "mix_histogram: maps built for another scheme");
  }
  const int n_c = scheme.n_c();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(scheme.feature_length()), 0);
  for (Eigen::Index i = 0; i < colors.bins.size(); ++i) {
    const int c = colors.bins(i);
    const int q = orients.bins(i);
    if (c < 0 || c >= n_c || q < 0 || q >= scheme.n_q) {
      throw Error(ErrorCode::InvalidArgument, "mix_histogram: bin index out of range");
    }
    ++counts[static_cast<std::size_t>(q) * n_c + c];
  }
  const double total = static_cast<double>(colors.bins.size());
  MixHistogram mh{Eigen::MatrixXd(scheme.n_q, n_c), scheme};
  for (int q = 0; q < scheme.n_q; ++q) {
    for (int c = 0; c < n_c; ++c) {
      mh.values(q, c) = static_cast<double>(counts[static_cast<std::size_t>(q) * n_c + c]) / total;
    }
  }
  return mh;
}

FeatureVector flatten(const MixHistogram& mh) {
  const Eigen::Index rows = mh.values.rows();
  const Eigen::Index cols = mh.values.cols();
  FeatureVector fv{Eigen::VectorXd(rows * cols), mh.scheme};
  for (Eigen::Index i = 0; i < rows; ++i) {
    fv.values.segment(i * cols, cols) = mh.values.row(i).transpose();
  }
  return fv;
}

FeatureVector extract(const PixelAnalysis& analysis, const QuantizationScheme& scheme) {
  scheme.validate();
  const auto colors = color_map(analysis.hsv, scheme);
  const auto orients = orientation_map(analysis.orientation, scheme.n_q);
  return flatten(mix_histogram(colors, orients, scheme));
}

FeatureVector extract(const RGBImage& img, const QuantizationScheme& scheme) {
  scheme.validate();
  return extract(analyze(img), scheme);
}

}  // namespace mixhist
