#include "oracle/reference_pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace oracle {

namespace {

const double kPi = 3.14159265358979323846;

// Sobel x kernel rows [-1 0 1; -2 0 2; -1 0 1], y kernel its transpose.
const double kWeight[3] = {1.0, 2.0, 1.0};

int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

int bin_of(double value, int bins) {
  int q = (int)std::floor(value * bins);
  return q > bins - 1 ? bins - 1 : q;
}

int color_bin(int r, int g, int b, int nh, int ns, int nv) {
  double h, s, v;
  hsv_of(r, g, b, h, s, v);
  return bin_of(h, nh) * ns * nv + bin_of(s, ns) * nv + bin_of(v, nv);
}

}  // namespace

void hsv_of(int r, int g, int b, double& h, double& s, double& v) {
  int mx = r;
  if (g > mx) mx = g;
  if (b > mx) mx = b;
  int mn = r;
  if (g < mn) mn = g;
  if (b < mn) mn = b;
  int c = mx - mn;
  v = mx / 255.0;
  s = (mx == 0) ? 0.0 : (double)c / (double)mx;
  if (c == 0) {
    h = 0.0;
    return;
  }
  // hue as a fraction of the turn: sector*c + offset over 6c
  int num;
  if (mx == r)
    num = (g - b) < 0 ? (g - b) + 6 * c : (g - b);
  else if (mx == g)
    num = 2 * c + (b - r);
  else
    num = 4 * c + (r - g);
  h = (double)num / (double)(6 * c);
}

double rate(double gxx, double gyy, double gxy, double theta) {
  double inside = 0.5 * ((gxx + gyy) + (gxx - gyy) * std::cos(2.0 * theta) +
                         2.0 * gxy * std::sin(2.0 * theta));
  if (!(inside > 0.0)) inside = 0.0;
  return std::sqrt(inside);
}

double best_direction(double gxx, double gyy, double gxy) {
  double t0 = 0.5 * std::atan2(2.0 * gxy, gxx - gyy);
  double t1 = t0 + kPi / 2.0;
  double f0 = rate(gxx, gyy, gxy, t0);
  double f1 = rate(gxx, gyy, gxy, t1);
  if (f0 == f1) return 0.0;
  double t = f0 > f1 ? t0 : t1;
  if (t < 0.0) t += kPi;
  if (t >= kPi) t -= kPi;
  return t;
}

double grid_max_rate(double gxx, double gyy, double gxy, int steps) {
  double best = 0.0;
  for (int k = 0; k < steps; ++k) {
    best = std::max(best, rate(gxx, gyy, gxy, kPi * k / steps));
  }
  return best;
}

std::vector<double> mix_histogram(int width, int height, const std::vector<std::uint8_t>& rgb,
                                  const Scheme& scheme) {
  const int n = width * height;
  std::vector<double> H(n), S(n), V(n);
  for (int i = 0; i < n; ++i) hsv_of(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2], H[i], S[i], V[i]);

  const std::vector<double>* planes[3] = {&H, &S, &V};
  const int nc = scheme.nh * scheme.ns * scheme.nv;
  std::vector<long> counts((size_t)scheme.nq * nc, 0);

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double dx[3], dy[3];
      for (int ch = 0; ch < 3; ++ch) {
        const std::vector<double>& p = *planes[ch];
        // Kernel weights 1,2,1 applied to (far tap - near tap) across each axis.
        double sx = 0.0, sy = 0.0;
        for (int k = 0; k < 3; ++k) {
          int yy = clampi(y + k - 1, 0, height - 1);
          int xl = clampi(x - 1, 0, width - 1), xr = clampi(x + 1, 0, width - 1);
          sx += kWeight[k] * (p[yy * width + xr] - p[yy * width + xl]);
        }
        for (int k = 0; k < 3; ++k) {
          int xx = clampi(x + k - 1, 0, width - 1);
          int yu = clampi(y - 1, 0, height - 1), yd = clampi(y + 1, 0, height - 1);
          sy += kWeight[k] * (p[yd * width + xx] - p[yu * width + xx]);
        }
        dx[ch] = sx;
        dy[ch] = sy;
      }
      double gxx = dx[0] * dx[0] + dx[1] * dx[1] + dx[2] * dx[2];
      double gyy = dy[0] * dy[0] + dy[1] * dy[1] + dy[2] * dy[2];
      double gxy = dx[0] * dy[0] + dx[1] * dy[1] + dx[2] * dy[2];
      double theta = best_direction(gxx, gyy, gxy);
      int q = (int)std::floor(theta * scheme.nq / kPi);
      if (q > scheme.nq - 1) q = scheme.nq - 1;

      int i = y * width + x;
      int c = color_bin(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2], scheme.nh, scheme.ns,
                        scheme.nv);
      counts[(size_t)q * nc + c] += 1;
    }
  }
  std::vector<double> out(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) out[k] = (double)counts[k] / (double)n;
  return out;
}

std::vector<double> color_histogram(int width, int height, const std::vector<std::uint8_t>& rgb,
                                    int nh, int ns, int nv) {
  const int n = width * height;
  std::vector<long> counts((size_t)nh * ns * nv, 0);
  for (int i = 0; i < n; ++i) counts[color_bin(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2], nh, ns, nv)]++;
  std::vector<double> out(counts.size());
  for (size_t k = 0; k < counts.size(); ++k) out[k] = (double)counts[k] / (double)n;
  return out;
}

}  // namespace oracle
