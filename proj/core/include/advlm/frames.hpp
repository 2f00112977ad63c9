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

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "advlm/tensor.hpp"

namespace advlm {

// One camera frame, C x H x W with pixels in [0, 1].
class Frame {
 public:
  Frame() = default;
  // Throws InvalidArgument for a non rank-3 tensor or pixels outside [0, 1].
  explicit Frame(Tensor pixels);

  const Tensor& pixels() const { return pixels_; }
  std::size_t channels() const { return pixels_.dim(0); }
  std::size_t height() const { return pixels_.dim(1); }
  std::size_t width() const { return pixels_.dim(2); }
  const Shape& shape() const { return pixels_.shape(); }

  friend bool operator==(const Frame&, const Frame&) = default;

 private:
  Tensor pixels_;
};

// Ordered frames of one scenario; all frames share a shape.
struct FrameSequence {
  std::string scenario_id;
  std::vector<Frame> frames;

  FrameSequence() = default;
  FrameSequence(std::string id, std::vector<Frame> f);

  std::size_t size() const { return frames.size(); }
  const Frame& operator[](std::size_t i) const { return frames[i]; }
  const Shape& frame_shape() const { return frames.at(0).shape(); }
};

// H x W saliency map with values in [0, 1].
class AttentionMap {
 public:
  AttentionMap() = default;
  // Throws InvalidArgument for a non rank-2 tensor or values outside [0, 1].
  explicit AttentionMap(Tensor values);

  const Tensor& values() const { return values_; }
  std::size_t height() const { return values_.dim(0); }
  std::size_t width() const { return values_.dim(1); }
  std::size_t size() const { return values_.size(); }

 private:
  Tensor values_;
};

}  // namespace advlm
