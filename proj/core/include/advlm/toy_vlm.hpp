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

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "advlm/autograd.hpp"
#include "advlm/frames.hpp"
#include "advlm/rng.hpp"
#include "advlm/tensor.hpp"

namespace advlm {

inline constexpr std::array<std::string_view, 5> kDrivingResponses{"straight", "left", "right",
                                                                   "stop", "slow"};

// Lowercased alphanumeric runs; everything else separates words.
std::vector<std::string> split_words(std::string_view text);

class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr int kPad = 1;

  Vocabulary();
  explicit Vocabulary(std::span<const std::string> words);

  // Adds word if absent and returns its id.
  int add(std::string_view word);
  int id(std::string_view word) const;
  bool contains(std::string_view word) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  // One token per line; line n holds id n + 2.
  void save(const std::string& path) const;
  static Vocabulary load(const std::string& path);

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

// Unknown words map to <unk>; text with no words becomes a single <pad>.
std::vector<int> tokenize(std::string_view text, const Vocabulary& vocab);

struct ToyVlmConfig {
  int embed_dim = 32;
  int channels = 3;
  int height = 32;
  int width = 32;
  std::vector<int> conv_channels{8, 16};
  int fusion_hidden = 64;
  int num_classes = 5;
  double embed_init_std = 0.5;  // token embedding init scale

  void validate() const;
  Shape frame_shape() const;
};

struct ToyVlmWeights {
  Tensor embedding;  // [V, d]
  std::vector<Tensor> conv_kernels;  // [O, C, 3, 3]
  std::vector<Tensor> conv_biases;   // [O]
  Tensor fusion_w;  // [d + conv_out, hidden]
  Tensor fusion_b;  // [hidden]
  Tensor head_w;    // [hidden, K]
  Tensor head_b;    // [K]

  // Fixed serialization order.
  std::vector<std::pair<std::string, const Tensor*>> named() const;
  std::vector<std::pair<std::string, Tensor*>> named();
};

// Small differentiable driving VLM: mean token embedding for the prompt,
// stride-2 conv encoder with global average pooling per frame, frame
// features averaged over the sequence, then concat -> ReLU MLP -> log-softmax.
class ToyVlm {
 public:
  ToyVlm() = default;
  ToyVlm(ToyVlmConfig config, Vocabulary vocab, ToyVlmWeights weights, std::uint64_t seed);

  // He-initialized weights drawn from rng.
  static ToyVlm initialize(ToyVlmConfig config, Vocabulary vocab, std::uint64_t seed);

  const ToyVlmConfig& config() const { return config_; }
  const Vocabulary& vocab() const { return vocab_; }
  const ToyVlmWeights& weights() const { return weights_; }
  ToyVlmWeights& mutable_weights() { return weights_; }
  // Seed the weights were initialized and trained with.
  std::uint64_t seed() const { return seed_; }

  std::vector<int> encode_text(std::string_view text) const { return tokenize(text, vocab_); }

  void save(const std::string& path) const;
  static ToyVlm load(const std::string& path);

 private:
  ToyVlmConfig config_;
  Vocabulary vocab_;
  ToyVlmWeights weights_;
  std::uint64_t seed_ = 0;
};

// Model weights placed on a graph, as trainable leaves or as constants.
struct BoundVlm {
  const ToyVlm* model = nullptr;
  Var embedding;
  std::vector<Var> conv_kernels;
  std::vector<Var> conv_biases;
  Var fusion_w, fusion_b, head_w, head_b;

  static BoundVlm bind(Graph& g, const ToyVlm& model, bool trainable);

  Var encode_frame(Var frame) const;
  // Mean of per-frame features.
  Var encode_frames(std::span<const Var> frames) const;
  Var encode_prompt(std::span<const int> ids) const;
  // Log-probabilities over the K responses.
  Var respond(Var prompt_feature, Var visual_feature) const;
};

// Log-probabilities for (frames, prompt). Throws on an empty sequence.
Tensor forward(const ToyVlm& model, std::span<const Frame> frames, std::span<const int> prompt_ids);
Tensor forward(const ToyVlm& model, const FrameSequence& seq, std::string_view prompt);

std::size_t argmax(const Tensor& values);

struct TrainingSample {
  std::vector<Frame> frames;
  std::vector<int> prompt;
  int label = 0;
};

struct TrainResult {
  std::vector<double> epoch_loss;  // mean NLL per epoch
};

// Per-sample SGD on NLL with a fresh shuffle per epoch.
TrainResult train(ToyVlm& model, std::span<const TrainingSample> data, int epochs, double lr,
                  Rng& rng);

// Gradient saliency of the argmax log-probability: channel max of the absolute
// input gradient, min-max normalized. A flat gradient gives the uniform 0.5 map.
AttentionMap attention_map(const ToyVlm& model, const Frame& frame, std::span<const int> prompt_ids);

}  // namespace advlm
