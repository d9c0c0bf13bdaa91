// Copyright 2026 The trustauth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "trustauth/iqm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "trustauth/error.hpp"

namespace trustauth::pad {
namespace {

using Eigen::MatrixXd;

constexpr double kTiny = 1e-12;
constexpr double kRatioCap = 1e6;

// num/den with explicit results when the denominator vanishes.
double GuardedRatio(double num, double den, double both_zero, double den_zero) {
  if (std::abs(den) < kTiny) return std::abs(num) < kTiny ? both_zero : den_zero;
  return num / den;
}

MatrixXd Laplacian(const MatrixXd &a) {
  const Eigen::Index h = a.rows(), w = a.cols();
  MatrixXd out = MatrixXd::Zero(h - 2, w - 2);
  for (Eigen::Index r = 1; r + 1 < h; ++r) {
    for (Eigen::Index c = 1; c + 1 < w; ++c) {
      out(r - 1, c - 1) = a(r - 1, c) + a(r + 1, c) + a(r, c - 1) + a(r, c + 1) - 4.0 * a(r, c);
    }
  }
  return out;
}

struct Gradient {
  MatrixXd gx, gy;  // interior only, central differences
};

Gradient CentralGradient(const MatrixXd &a) {
  const Eigen::Index h = a.rows(), w = a.cols();
  Gradient g{MatrixXd(h - 2, w - 2), MatrixXd(h - 2, w - 2)};
  for (Eigen::Index r = 1; r + 1 < h; ++r) {
    for (Eigen::Index c = 1; c + 1 < w; ++c) {
      g.gx(r - 1, c - 1) = (a(r, c + 1) - a(r, c - 1)) / 2.0;
      g.gy(r - 1, c - 1) = (a(r + 1, c) - a(r - 1, c)) / 2.0;
    }
  }
  return g;
}

void Sobel(const MatrixXd &a, MatrixXd &gx, MatrixXd &gy) {
  const Eigen::Index h = a.rows(), w = a.cols();
  gx.setZero(h - 2, w - 2);
  gy.setZero(h - 2, w - 2);
  for (Eigen::Index r = 1; r + 1 < h; ++r) {
    for (Eigen::Index c = 1; c + 1 < w; ++c) {
      gx(r - 1, c - 1) = (a(r - 1, c + 1) + 2 * a(r, c + 1) + a(r + 1, c + 1)) -
                         (a(r - 1, c - 1) + 2 * a(r, c - 1) + a(r + 1, c - 1));
      gy(r - 1, c - 1) = (a(r + 1, c - 1) + 2 * a(r + 1, c) + a(r + 1, c + 1)) -
                         (a(r - 1, c - 1) + 2 * a(r - 1, c) + a(r - 1, c + 1));
    }
  }
}

MatrixXd Box3(const MatrixXd &a) {
  MatrixXd out = MatrixXd::Zero(a.rows() - 2, a.cols() - 2);
  for (Eigen::Index r = 1; r + 1 < a.rows(); ++r) {
    for (Eigen::Index c = 1; c + 1 < a.cols(); ++c) {
      out(r - 1, c - 1) = a.block(r - 1, c - 1, 3, 3).sum() / 9.0;
    }
  }
  return out;
}

MatrixXd HarrisResponse(const MatrixXd &img) {
  MatrixXd gx, gy;
  Sobel(img, gx, gy);
  gx /= 8.0;
  gy /= 8.0;
  const MatrixXd sxx = Box3(gx.cwiseProduct(gx));
  const MatrixXd syy = Box3(gy.cwiseProduct(gy));
  const MatrixXd sxy = Box3(gx.cwiseProduct(gy));
  const MatrixXd det = sxx.cwiseProduct(syy) - sxy.cwiseProduct(sxy);
  const MatrixXd tr = sxx + syy;
  return det - kHarrisK * tr.cwiseProduct(tr);
}

MatrixXd DftMagnitude(const MatrixXd &a) {
  const Eigen::Index h = a.rows(), w = a.cols();
  Eigen::FFT<double> fft;
  Eigen::MatrixXcd rows(h, w);
  std::vector<std::complex<double>> in(static_cast<std::size_t>(w)), out;
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) in[static_cast<std::size_t>(c)] = a(r, c);
    fft.fwd(out, in);
    for (Eigen::Index c = 0; c < w; ++c) rows(r, c) = out[static_cast<std::size_t>(c)];
  }
  in.resize(static_cast<std::size_t>(h));
  MatrixXd mag(h, w);
  const double scale = 1.0 / std::sqrt(static_cast<double>(h * w));
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) in[static_cast<std::size_t>(r)] = rows(r, c);
    fft.fwd(out, in);
    for (Eigen::Index r = 0; r < h; ++r) mag(r, c) = std::abs(out[static_cast<std::size_t>(r)]) * scale;
  }
  return mag;
}

}  // namespace

const std::array<std::string_view, kNumIqms> &IqmNames() {
  static const std::array<std::string_view, kNumIqms> names = {
      "MSE",  "PSNR",     "SNR",         "MAXDIFF",        "AVGDIFF",         "NAE",
      "RAMD", "STRUCT_CONTENT", "NXCORR", "LMSE",          "NORM_MSE",        "SSIM_GLOBAL",
      "MEAN_ANGLE", "MEAN_ANGLE_MAG", "TOTAL_EDGE_DIFF", "TOTAL_CORNER_DIFF", "SPECTRAL_MAG_ERR",
      "GRAD_MAG_ERR"};
  return names;
}

image::FrameImage LowpassReference(const image::FrameImage &img, double sigma) {
  img.Validate();
  return {image::GaussianBlur(img.pixels, sigma), img.source};
}

MatrixXd SobelMagnitude(const MatrixXd &img) {
  MatrixXd gx, gy;
  Sobel(img, gx, gy);
  return (gx.array().square() + gy.array().square()).sqrt().matrix();
}

double HarrisMaxResponse(const MatrixXd &img) { return HarrisResponse(img).maxCoeff(); }

int HarrisCornerCount(const MatrixXd &img, double threshold) {
  const MatrixXd resp = HarrisResponse(img);
  int count = 0;
  for (Eigen::Index r = 1; r + 1 < resp.rows(); ++r) {
    for (Eigen::Index c = 1; c + 1 < resp.cols(); ++c) {
      const double v = resp(r, c);
      if (v <= threshold) continue;
      if (v >= resp.block(r - 1, c - 1, 3, 3).maxCoeff()) ++count;
    }
  }
  return count;
}

IqmVector ComputeIqms(const image::FrameImage &img, const image::FrameImage &ref) {
  img.Validate();
  ref.Validate();
  if (img.pixels.rows() != ref.pixels.rows() || img.pixels.cols() != ref.pixels.cols()) {
    Fail(ErrorCode::kDimensionMismatch, "frame and reference differ in shape");
  }
  const MatrixXd &I = img.pixels;
  const MatrixXd &R = ref.pixels;
  const MatrixXd E = I - R;
  const double n = static_cast<double>(I.size());
  const double sum_e2 = E.squaredNorm();
  const double sum_i2 = I.squaredNorm();
  const double sum_r2 = R.squaredNorm();

  IqmVector v{};
  auto set = [&v](Iqm m, double x) { v[static_cast<std::size_t>(m)] = x; };

  const double mse = sum_e2 / n;
  set(Iqm::kMse, mse);
  set(Iqm::kPsnr, mse < kTiny ? kPsnrCap : std::min(kPsnrCap, 10.0 * std::log10(255.0 * 255.0 / mse)));
  if (sum_e2 < kTiny) {
    set(Iqm::kSnr, 100.0);
  } else if (sum_i2 < kTiny) {
    set(Iqm::kSnr, -100.0);
  } else {
    set(Iqm::kSnr, std::clamp(10.0 * std::log10(sum_i2 / sum_e2), -100.0, 100.0));
  }
  const MatrixXd absE = E.cwiseAbs();
  set(Iqm::kMaxDiff, absE.maxCoeff());
  set(Iqm::kAvgDiff, E.sum() / n);
  set(Iqm::kNae, GuardedRatio(absE.sum(), I.cwiseAbs().sum(), 0.0, 1.0));

  std::vector<double> flat(absE.data(), absE.data() + absE.size());
  const std::size_t top = std::min<std::size_t>(kRamdCount, flat.size());
  std::partial_sort(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(top), flat.end(),
                    std::greater<>());
  double ramd = 0.0;
  for (std::size_t i = 0; i < top; ++i) ramd += flat[i];
  set(Iqm::kRamd, ramd / static_cast<double>(top));

  set(Iqm::kStructContent, GuardedRatio(sum_i2, sum_r2, 1.0, kRatioCap));
  set(Iqm::kNxcorr, GuardedRatio(I.cwiseProduct(R).sum(), sum_i2, 1.0, 0.0));

  const MatrixXd li = Laplacian(I), lr = Laplacian(R);
  set(Iqm::kLmse, GuardedRatio((li - lr).squaredNorm(), li.squaredNorm(), 0.0, 1.0));

  const double mean_i = I.mean(), mean_r = R.mean();
  set(Iqm::kNormMse, GuardedRatio(sum_e2, (I.array() - mean_i).square().sum(), 0.0, kRatioCap));

  {
    const double var_i = (I.array() - mean_i).square().sum() / n;
    const double var_r = (R.array() - mean_r).square().sum() / n;
    const double cov = ((I.array() - mean_i) * (R.array() - mean_r)).sum() / n;
    const double c1 = (0.01 * 255.0) * (0.01 * 255.0);
    const double c2 = (0.03 * 255.0) * (0.03 * 255.0);
    set(Iqm::kSsimGlobal, ((2 * mean_i * mean_r + c1) * (2 * cov + c2)) /
                              ((mean_i * mean_i + mean_r * mean_r + c1) * (var_i + var_r + c2)));
  }

  {
    const Gradient gi = CentralGradient(I), gr = CentralGradient(R);
    const double m = static_cast<double>(gi.gx.size());
    double sum_alpha = 0.0, sum_mag = 0.0, sum_gm = 0.0;
    const double mag_scale = 255.0 * std::numbers::sqrt2;
    for (Eigen::Index k = 0; k < gi.gx.size(); ++k) {
      const double ax = gi.gx(k), ay = gi.gy(k), bx = gr.gx(k), by = gr.gy(k);
      const double na = std::hypot(ax, ay), nb = std::hypot(bx, by);
      double alpha = 0.0;
      if (na >= kTiny && nb >= kTiny) {
        alpha = 2.0 / std::numbers::pi * std::acos(std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0));
      } else if (na >= kTiny || nb >= kTiny) {
        alpha = 1.0;
      }
      const double diff = std::hypot(ax - bx, ay - by) / mag_scale;
      sum_alpha += alpha;
      sum_mag += 1.0 - (1.0 - alpha) * (1.0 - diff);
      sum_gm += (na - nb) * (na - nb);
    }
    set(Iqm::kMeanAngle, 1.0 - sum_alpha / m);
    set(Iqm::kMeanAngleMag, sum_mag / m);
    set(Iqm::kGradMagErr, sum_gm / m);
  }

  {
    const MatrixXd si = SobelMagnitude(I), sr = SobelMagnitude(R);
    double diff = 0.0;
    for (Eigen::Index k = 0; k < si.size(); ++k) {
      diff += std::abs(static_cast<double>(si(k) > kEdgeThreshold) - static_cast<double>(sr(k) > kEdgeThreshold));
    }
    set(Iqm::kTotalEdgeDiff, diff / static_cast<double>(si.size()));
  }

  {
    const double max_resp = HarrisMaxResponse(I);
    const double thr = max_resp > 0 ? kCornerRelThreshold * max_resp : kTiny;
    const int ci = HarrisCornerCount(I, thr), cr = HarrisCornerCount(R, thr);
    set(Iqm::kTotalCornerDiff, std::max(ci, cr) == 0
                                   ? 0.0
                                   : std::abs(ci - cr) / static_cast<double>(std::max(ci, cr)));
  }

  set(Iqm::kSpectralMagErr, (DftMagnitude(I) - DftMagnitude(R)).squaredNorm() / n);
  return v;
}

IqmVector FrameIqms(const image::FrameImage &img, double sigma) {
  return ComputeIqms(img, LowpassReference(img, sigma));
}

}  // namespace trustauth::pad
