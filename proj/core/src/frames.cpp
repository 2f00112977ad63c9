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

#include "advlm/frames.hpp"

#include "advlm/error.hpp"

namespace advlm {
namespace {

void check_unit_range(const Tensor& t, const char* what) {
  for (double v : t.data()) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw InvalidArgument(std::string(what) + " value " + std::to_string(v) + " outside [0,1]");
    }
  }
}

}  // namespace

Frame::Frame(Tensor pixels) : pixels_(std::move(pixels)) {
  if (pixels_.rank() != 3) throw InvalidArgument("frame must be C x H x W, got " + shape_str(pixels_.shape()));
  check_unit_range(pixels_, "pixel");
}

FrameSequence::FrameSequence(std::string id, std::vector<Frame> f)
    : scenario_id(std::move(id)), frames(std::move(f)) {
  if (frames.empty()) throw InvalidArgument("frame sequence " + scenario_id + " is empty");
  for (const Frame& fr : frames) {
    if (fr.shape() != frames[0].shape()) {
      throw ShapeError("frame sequence " + scenario_id + " mixes shapes " +
                       shape_str(frames[0].shape()) + " and " + shape_str(fr.shape()));
    }
  }
}

AttentionMap::AttentionMap(Tensor values) : values_(std::move(values)) {
  if (values_.rank() != 2) throw InvalidArgument("attention map must be H x W, got " + shape_str(values_.shape()));
  check_unit_range(values_, "attention");
}

}  // namespace advlm
