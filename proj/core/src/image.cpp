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

#include "trustauth/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "trustauth/error.hpp"
#include "trustauth/types.hpp"

namespace trustauth::image {

void FrameImage::Validate() const {
  if (pixels.rows() < kMinSide || pixels.cols() < kMinSide) {
    Fail(ErrorCode::kMalformedSample, "frames must be at least 16x16");
  }
  if (!pixels.allFinite()) Fail(ErrorCode::kMalformedSample, "frame contains non-finite pixels");
}

namespace {

// Reads the next whitespace-separated header token, skipping '#' comments.
std::string NextToken(std::span<const std::uint8_t> b, std::size_t &pos) {
  for (;;) {
    while (pos < b.size() && std::isspace(b[pos])) ++pos;
    if (pos < b.size() && b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
      continue;
    }
    break;
  }
  std::string tok;
  while (pos < b.size() && !std::isspace(b[pos])) tok.push_back(static_cast<char>(b[pos++]));
  return tok;
}

int ParsePositive(const std::string &tok) {
  if (tok.empty() || !std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    Fail(ErrorCode::kUnsupportedFormat, "bad PGM header field '" + tok + "'");
  }
  return std::stoi(tok);
}

int Reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i;
    if (i >= n) i = 2 * (n - 1) - i;
  }
  return i;
}

}  // namespace

FrameImage DecodePgm(std::span<const std::uint8_t> b) {
  std::size_t pos = 0;
  if (NextToken(b, pos) != "P5") Fail(ErrorCode::kUnsupportedFormat, "not a binary PGM (P5)");
  const int width = ParsePositive(NextToken(b, pos));
  const int height = ParsePositive(NextToken(b, pos));
  const int maxval = ParsePositive(NextToken(b, pos));
  if (maxval < 1 || maxval > 255) Fail(ErrorCode::kUnsupportedFormat, "only 8-bit PGM is supported");
  ++pos;  // single whitespace before the raster
  const std::size_t need = static_cast<std::size_t>(width) * height;
  if (pos + need > b.size()) Fail(ErrorCode::kUnsupportedFormat, "truncated PGM raster");
  FrameImage img;
  img.pixels.resize(height, width);
  const double scale = 255.0 / maxval;
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) img.pixels(r, c) = b[pos + static_cast<std::size_t>(r) * width + c] * scale;
  return img;
}

Bytes EncodePgm(const FrameImage &img) {
  const std::string header =
      "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  Bytes out(header.begin(), header.end());
  out.reserve(out.size() + static_cast<std::size_t>(img.width()) * img.height());
  for (int r = 0; r < img.height(); ++r)
    for (int c = 0; c < img.width(); ++c)
      out.push_back(static_cast<std::uint8_t>(std::clamp(std::round(img.pixels(r, c)), 0.0, 255.0)));
  return out;
}

FrameImage ReadPgm(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) Fail(ErrorCode::kStorage, "cannot open " + path.string());
  Bytes bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  FrameImage img = DecodePgm(bytes);
  img.source = Sha256Hex(bytes);
  return img;
}

void WritePgm(const std::filesystem::path &path, const FrameImage &img) {
  const Bytes bytes = EncodePgm(img);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) Fail(ErrorCode::kStorage, "cannot write " + path.string());
  out.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

Eigen::MatrixXd ResizeBilinear(const Eigen::MatrixXd &src, int height, int width) {
  const auto h = static_cast<double>(src.rows()), w = static_cast<double>(src.cols());
  Eigen::MatrixXd out(height, width);
  for (int r = 0; r < height; ++r) {
    const double y = std::clamp((r + 0.5) * h / height - 0.5, 0.0, h - 1.0);
    const auto y0 = static_cast<Eigen::Index>(std::floor(y));
    const Eigen::Index y1 = std::min<Eigen::Index>(y0 + 1, src.rows() - 1);
    const double fy = y - static_cast<double>(y0);
    for (int c = 0; c < width; ++c) {
      const double x = std::clamp((c + 0.5) * w / width - 0.5, 0.0, w - 1.0);
      const auto x0 = static_cast<Eigen::Index>(std::floor(x));
      const Eigen::Index x1 = std::min<Eigen::Index>(x0 + 1, src.cols() - 1);
      const double fx = x - static_cast<double>(x0);
      out(r, c) = (1 - fy) * ((1 - fx) * src(y0, x0) + fx * src(y0, x1)) +
                  fy * ((1 - fx) * src(y1, x0) + fx * src(y1, x1));
    }
  }
  return out;
}

Eigen::VectorXd GaussianKernel(double sigma) {
  if (!(sigma > 0.0)) Fail(ErrorCode::kInvalidArgument, "sigma must be positive");
  const int radius = static_cast<int>(std::ceil(4.0 * sigma));
  Eigen::VectorXd k(2 * radius + 1);
  for (int i = -radius; i <= radius; ++i) k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
  return k / k.sum();
}

Eigen::MatrixXd GaussianBlur(const Eigen::MatrixXd &src, double sigma) {
  const Eigen::VectorXd k = GaussianKernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int rows = static_cast<int>(src.rows()), cols = static_cast<int>(src.cols());
  Eigen::MatrixXd tmp(rows, cols), out(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * src(r, Reflect(c + i, cols));
      tmp(r, c) = acc;
    }
  }
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += k[i + radius] * tmp(Reflect(r + i, rows), c);
      out(r, c) = acc;
    }
  }
  return out;
}

Bytes EncodeFrameSequence(const FrameSequence &seq) {
  Json frames = Json::array();
  for (const auto &f : seq.frames) frames.push_back(Base64Encode(EncodePgm(f)));
  return ToBytes(Json{{"fps", seq.fps}, {"frames", std::move(frames)}}.dump());
}

FrameSequence DecodeFrameSequence(std::span<const std::uint8_t> bytes) {
  Json j;
  try {
    j = Json::parse(bytes.begin(), bytes.end());
  } catch (const std::exception &e) {
    Fail(ErrorCode::kUnsupportedFormat, std::string("frame sequence is not JSON: ") + e.what());
  }
  FrameSequence seq;
  seq.fps = j.at("fps").get<double>();
  if (!(seq.fps > 0.0)) Fail(ErrorCode::kMalformedSample, "fps must be positive");
  for (const auto &f : j.at("frames")) {
    const Bytes pgm = Base64Decode(f.get<std::string>());
    FrameImage img = DecodePgm(pgm);
    img.source = Sha256Hex(pgm);
    img.Validate();
    seq.frames.push_back(std::move(img));
  }
  return seq;
}

}  // namespace trustauth::image
