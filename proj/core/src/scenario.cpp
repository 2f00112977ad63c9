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

#include "advlm/scenario.hpp"

#include "advlm/error.hpp"

namespace advlm {

void Scenario::validate(int num_classes) const {
  if (frames.size() == 0) throw InvalidArgument("scenario " + id + ": no frames");
  if (label < 0 || label >= num_classes) throw InvalidArgument("scenario " + id + ": label out of range");
  if (target < 0 || target >= num_classes) throw InvalidArgument("scenario " + id + ": target out of range");
  if (target == label) throw InvalidArgument("scenario " + id + ": target equals ground truth");
}

}  // namespace advlm
