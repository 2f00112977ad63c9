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

#include <string>

#include "advlm/frames.hpp"

namespace advlm {

// A benign query (frames + instruction) with its true response and the
// response an attacker wants to induce.
struct Scenario {
  std::string id;
  FrameSequence frames;
  std::string prompt;
  int label = 0;
  int target = 1;

  // Throws InvalidArgument when labels are out of range or target == label.
  void validate(int num_classes) const;
};

}  // namespace advlm
