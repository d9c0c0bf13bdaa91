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

#ifndef TRUSTAUTH_IMAGE_HPP_
#define TRUSTAUTH_IMAGE_HPP_

// Grayscale frames and the few image operations the face instruments need.

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trustauth/crypto.hpp"

namespace trustauth::image {

inline constexpr int kMinSide = 16;

struct FrameImage {
  Eigen::MatrixXd pixels;  // H x W, values in [0, 255]
  std::string source;

  int height() const { return static_cast<int>(pixels.rows()); }
  int width() const { return static_cast<int>(pixels.cols()); }
  void Validate() const;
};

// Binary PGM (P5), maxval <= 255. Pixels are rounded and clamped on encode.
FrameImage DecodePgm(std::span<const std::uint8_t> bytes);
Bytes EncodePgm(const FrameImage &img);
FrameImage ReadPgm(const std::filesystem::path &path);
void WritePgm(const std::filesystem::path &path, const FrameImage &img);

// Pixel-centre aligned bilinear resampling.
Eigen::MatrixXd ResizeBilinear(const Eigen::MatrixXd &src, int height, int width);

// Normalised 1-D Gaussian taps, truncated at ceil(4 sigma).
Eigen::VectorXd GaussianKernel(double sigma);

// Separable Gaussian blur with mirrored (reflect-101) borders.
Eigen::MatrixXd GaussianBlur(const Eigen::MatrixXd &src, double sigma);

// Frame sequences travel as one JSON document {"fps", "frames": [base64 P5]}.
struct FrameSequence {
  std::vector<FrameImage> frames;
  double fps = 10.0;

  double duration() const { return fps > 0 ? static_cast<double>(frames.size()) / fps : 0.0; }
};

Bytes EncodeFrameSequence(const FrameSequence &seq);
FrameSequence DecodeFrameSequence(std::span<const std::uint8_t> bytes);

}  // namespace trustauth::image

#endif  // TRUSTAUTH_IMAGE_HPP_
