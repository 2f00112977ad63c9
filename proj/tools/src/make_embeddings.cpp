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

// Writes the bundled word-vector table: make_embeddings <out.txt> [seed] [dim]
#include <cstdlib>
#include <exception>
#include <iostream>
#include <string>

#include "advlm/pipeline.hpp"

int main(int argc, char** argv) {
  if (argc < 2 || argc > 4) {
    std::cerr << "usage: make_embeddings <out.txt> [seed] [dim]\n";
    return 1;
  }
  try {
    const std::uint64_t seed = argc > 2 ? std::stoull(argv[2]) : 0x5eed;
    const std::size_t dim = argc > 3 ? std::stoul(argv[3]) : advlm::EmbeddingTable::kDefaultDim;
    advlm::synthesize_embeddings(seed, dim).save(argv[1]);
  } catch (const std::exception& e) {
    std::cerr << "make_embeddings: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
