// Copyright 2026 The advlm-lab Authors.
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

#include "advlm/warp.hpp"

#include <algorithm>
#include <cmath>

#include "advlm/error.hpp"

namespace advlm {

void AffineRanges::validate() const {
  if (max_rotation < 0.0 || max_translation < 0.0 || !(min_scale > 0.0) || min_scale > max_scale) {
    throw InvalidArgument("AffineRanges: need non-negative ranges and 0 < min_scale <= max_scale");
  }
}

AffineParams sample_affine(Rng& rng, const AffineRanges& ranges) {
  ranges.validate();
  AffineParams p;
  p.rotation = rng.uniform(-ranges.max_rotation, ranges.max_rotation);
  p.tx = rng.uniform(-ranges.max_translation, ranges.max_translation);
  p.ty = rng.uniform(-ranges.max_translation, ranges.max_translation);
  p.scale = rng.uniform(ranges.min_scale, ranges.max_scale);
  return p;
}

Frame warp(const Frame& frame, const AffineParams& params) {
  if (params.is_identity()) return frame;
  if (!(params.scale > 0.0)) throw InvalidArgument("warp: scale must be positive");
  const std::size_t C = frame.channels(), H = frame.height(), W = frame.width();
  const double cx = (static_cast<double>(W) - 1.0) / 2.0;
  const double cy = (static_cast<double>(H) - 1.0) / 2.0;
  const double c = std::cos(params.rotation), s = std::sin(params.rotation);
  const double shift_x = params.tx * static_cast<double>(W);
  const double shift_y = params.ty * static_cast<double>(H);
  const Tensor& src = frame.pixels();
  Tensor out(frame.shape());
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      const double dx = static_cast<double>(x) - cx - shift_x;
      const double dy = static_cast<double>(y) - cy - shift_y;
      double sx = (c * dx + s * dy) / params.scale + cx;
      double sy = (-s * dx + c * dy) / params.scale + cy;
      sx = std::clamp(sx, 0.0, static_cast<double>(W - 1));
      sy = std::clamp(sy, 0.0, static_cast<double>(H - 1));
      const auto x0 = static_cast<std::size_t>(std::floor(sx));
      const auto y0 = static_cast<std::size_t>(std::floor(sy));
      const std::size_t x1 = std::min(x0 + 1, W - 1), y1 = std::min(y0 + 1, H - 1);
      const double fx = sx - static_cast<double>(x0), fy = sy - static_cast<double>(y0);
      for (std::size_t ch = 0; ch < C; ++ch) {
        const double* p = &src[ch * H * W];
        const double top = p[y0 * W + x0] * (1.0 - fx) + p[y0 * W + x1] * fx;
        const double bottom = p[y1 * W + x0] * (1.0 - fx) + p[y1 * W + x1] * fx;
        out[ch * H * W + y * W + x] = std::clamp(top * (1.0 - fy) + bottom * fy, 0.0, 1.0);
      }
    }
  }
  return Frame(std::move(out));
}

}  // namespace advlm
