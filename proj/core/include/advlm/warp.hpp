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

#pragma once

#include <numbers>

#include "advlm/frames.hpp"
#include "advlm/rng.hpp"

namespace advlm {

// Affine view change about the frame center. Translation is a fraction of
// the frame width (tx) and height (ty).
struct AffineParams {
  double rotation = 0.0;  // radians
  double tx = 0.0;
  double ty = 0.0;
  double scale = 1.0;

  static AffineParams identity() { return {}; }
  bool is_identity() const { return rotation == 0.0 && tx == 0.0 && ty == 0.0 && scale == 1.0; }
};

struct AffineRanges {
  double max_rotation = 5.0 * std::numbers::pi / 180.0;
  double max_translation = 0.05;
  double min_scale = 0.95;
  double max_scale = 1.05;

  void validate() const;
};

AffineParams sample_affine(Rng& rng, const AffineRanges& ranges = {});

// Inverse-mapped bilinear warp with replicated borders.
Frame warp(const Frame& frame, const AffineParams& params);

}  // namespace advlm
