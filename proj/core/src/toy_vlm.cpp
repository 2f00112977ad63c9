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

#include "advlm/toy_vlm.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "advlm/error.hpp"

namespace advlm {

std::vector<std::string> split_words(std::string_view text) {
  std::vector<std::string> words;
  std::string cur;
  for (char ch : text) {
    auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      words.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) words.push_back(std::move(cur));
  return words;
}

Vocabulary::Vocabulary() {
  add("<unk>");
  add("<pad>");
}

Vocabulary::Vocabulary(std::span<const std::string> words) : Vocabulary() {
  for (const auto& w : words) add(w);
}

int Vocabulary::add(std::string_view word) {
  std::string key(word);
  if (auto it = index_.find(key); it != index_.end()) return it->second;
  int id = static_cast<int>(tokens_.size());
  tokens_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

int Vocabulary::id(std::string_view word) const {
  auto it = index_.find(std::string(word));
  return it == index_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view word) const {
  return index_.count(std::string(word)) > 0;
}

void Vocabulary::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write vocabulary " + path);
  for (std::size_t i = 2; i < tokens_.size(); ++i) out << tokens_[i] << '\n';
}

Vocabulary Vocabulary::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read vocabulary " + path);
  Vocabulary v;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) throw IoError("vocabulary " + path + ": empty line at id " + std::to_string(v.size()));
    if (v.contains(line)) throw IoError("vocabulary " + path + ": duplicate token '" + line + "'");
    v.add(line);
  }
  return v;
}

std::vector<int> tokenize(std::string_view text, const Vocabulary& vocab) {
  std::vector<int> ids;
  for (const auto& w : split_words(text)) ids.push_back(vocab.id(w));
  if (ids.empty()) ids.push_back(Vocabulary::kPad);
  return ids;
}

void ToyVlmConfig::validate() const {
  if (embed_dim <= 0 || channels <= 0 || height <= 0 || width <= 0 || fusion_hidden <= 0) {
    throw InvalidArgument("ToyVlmConfig: dimensions must be positive");
  }
  if (conv_channels.empty()) throw InvalidArgument("ToyVlmConfig: need at least one conv layer");
  for (int c : conv_channels) {
    if (c <= 0) throw InvalidArgument("ToyVlmConfig: conv channels must be positive");
  }
  if (num_classes < 2) throw InvalidArgument("ToyVlmConfig: need K >= 2 response classes");
  if (!(embed_init_std >= 0.0) || !std::isfinite(embed_init_std)) {
    throw InvalidArgument("ToyVlmConfig: embed_init_std must be finite and >= 0");
  }
}

Shape ToyVlmConfig::frame_shape() const {
  return {static_cast<std::size_t>(channels), static_cast<std::size_t>(height),
          static_cast<std::size_t>(width)};
}

std::vector<std::pair<std::string, const Tensor*>> ToyVlmWeights::named() const {
  std::vector<std::pair<std::string, const Tensor*>> out{{"embedding", &embedding}};
  for (std::size_t i = 0; i < conv_kernels.size(); ++i) {
    out.emplace_back("conv" + std::to_string(i) + ".kernel", &conv_kernels[i]);
    out.emplace_back("conv" + std::to_string(i) + ".bias", &conv_biases[i]);
  }
  out.emplace_back("fusion.weight", &fusion_w);
  out.emplace_back("fusion.bias", &fusion_b);
  out.emplace_back("head.weight", &head_w);
  out.emplace_back("head.bias", &head_b);
  return out;
}

std::vector<std::pair<std::string, Tensor*>> ToyVlmWeights::named() {
  std::vector<std::pair<std::string, Tensor*>> out;
  for (auto& [name, t] : std::as_const(*this).named()) out.emplace_back(name, const_cast<Tensor*>(t));
  return out;
}

namespace {

Tensor normal_tensor(Shape shape, double stddev, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.normal(0.0, stddev);
  return t;
}

void check_weights(const ToyVlmConfig& c, std::size_t vocab_size, const ToyVlmWeights& w) {
  auto expect = [](const Tensor& t, const Shape& s, const std::string& name) {
    if (t.shape() != s) {
      throw ShapeError("weights: " + name + " has shape " + shape_str(t.shape()) + ", expected " +
                       shape_str(s));
    }
    if (!t.all_finite()) throw NumericError("weights: " + name + " is not finite");
  };
  const auto d = static_cast<std::size_t>(c.embed_dim);
  expect(w.embedding, {vocab_size, d}, "embedding");
  if (w.conv_kernels.size() != c.conv_channels.size() || w.conv_biases.size() != c.conv_channels.size()) {
    throw ShapeError("weights: conv layer count does not match config");
  }
  std::size_t in = static_cast<std::size_t>(c.channels);
  for (std::size_t i = 0; i < c.conv_channels.size(); ++i) {
    const auto out = static_cast<std::size_t>(c.conv_channels[i]);
    expect(w.conv_kernels[i], {out, in, 3, 3}, "conv" + std::to_string(i) + ".kernel");
    expect(w.conv_biases[i], {out}, "conv" + std::to_string(i) + ".bias");
    in = out;
  }
  const auto hidden = static_cast<std::size_t>(c.fusion_hidden);
  expect(w.fusion_w, {d + in, hidden}, "fusion.weight");
  expect(w.fusion_b, {hidden}, "fusion.bias");
  expect(w.head_w, {hidden, static_cast<std::size_t>(c.num_classes)}, "head.weight");
  expect(w.head_b, {static_cast<std::size_t>(c.num_classes)}, "head.bias");
}

}  // namespace

ToyVlm::ToyVlm(ToyVlmConfig config, Vocabulary vocab, ToyVlmWeights weights, std::uint64_t seed)
    : config_(std::move(config)), vocab_(std::move(vocab)), weights_(std::move(weights)), seed_(seed) {
  config_.validate();
  check_weights(config_, vocab_.size(), weights_);
}

ToyVlm ToyVlm::initialize(ToyVlmConfig config, Vocabulary vocab, std::uint64_t seed) {
  config.validate();
  Rng rng(seed, 0x766c6d);
  ToyVlmWeights w;
  const auto d = static_cast<std::size_t>(config.embed_dim);
  w.embedding = normal_tensor({vocab.size(), d}, config.embed_init_std, rng);
  std::size_t in = static_cast<std::size_t>(config.channels);
  for (int oc : config.conv_channels) {
    const auto out = static_cast<std::size_t>(oc);
    w.conv_kernels.push_back(normal_tensor({out, in, 3, 3}, std::sqrt(2.0 / static_cast<double>(in * 9)), rng));
    w.conv_biases.push_back(Tensor::zeros({out}));
    in = out;
  }
  const auto hidden = static_cast<std::size_t>(config.fusion_hidden);
  w.fusion_w = normal_tensor({d + in, hidden}, std::sqrt(2.0 / static_cast<double>(d + in)), rng);
  w.fusion_b = Tensor::zeros({hidden});
  const auto k = static_cast<std::size_t>(config.num_classes);
  w.head_w = normal_tensor({hidden, k}, std::sqrt(1.0 / static_cast<double>(hidden)), rng);
  w.head_b = Tensor::zeros({k});
  return ToyVlm(std::move(config), std::move(vocab), std::move(w), seed);
}

void ToyVlm::save(const std::string& path) const {
  nlohmann::json header;
  header["format"] = "advlm-toyvlm";
  header["version"] = 1;
  header["config"] = {{"embed_dim", config_.embed_dim},       {"channels", config_.channels},
                      {"height", config_.height},             {"width", config_.width},
                      {"conv_channels", config_.conv_channels}, {"fusion_hidden", config_.fusion_hidden},
                      {"num_classes", config_.num_classes},   {"embed_init_std", config_.embed_init_std}};
  header["vocab"] = vocab_.tokens();
  header["seed"] = seed_;
  nlohmann::json names = nlohmann::json::array();
  for (const auto& [name, t] : weights_.named()) names.push_back(name);
  header["tensors"] = names;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write weights " + path);
  out << header.dump() << '\n';
  for (const auto& [name, t] : weights_.named()) write_tensor(out, *t);
}

ToyVlm ToyVlm::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read weights " + path);
  std::string line;
  if (!std::getline(in, line)) throw IoError("weights " + path + ": missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("weights " + path + ": bad header: " + e.what());
  }
  if (header.value("format", "") != "advlm-toyvlm") throw IoError("weights " + path + ": wrong format tag");
  ToyVlmConfig c;
  const auto& jc = header.at("config");
  c.embed_dim = jc.at("embed_dim");
  c.channels = jc.at("channels");
  c.height = jc.at("height");
  c.width = jc.at("width");
  c.conv_channels = jc.at("conv_channels").get<std::vector<int>>();
  c.fusion_hidden = jc.at("fusion_hidden");
  c.num_classes = jc.at("num_classes");
  c.embed_init_std = jc.value("embed_init_std", c.embed_init_std);
  c.validate();
  auto tokens = header.at("vocab").get<std::vector<std::string>>();
  if (tokens.size() < 2 || tokens[0] != "<unk>" || tokens[1] != "<pad>") {
    throw IoError("weights " + path + ": vocabulary must start with <unk>, <pad>");
  }
  Vocabulary vocab(std::span<const std::string>(tokens).subspan(2));
  ToyVlmWeights w;
  w.conv_kernels.resize(c.conv_channels.size());
  w.conv_biases.resize(c.conv_channels.size());
  auto names = header.at("tensors").get<std::vector<std::string>>();
  auto slots = w.named();
  if (names.size() != slots.size()) throw IoError("weights " + path + ": tensor count mismatch");
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (names[i] != slots[i].first) throw IoError("weights " + path + ": unexpected tensor " + names[i]);
    *slots[i].second = read_tensor(in);
  }
  return ToyVlm(std::move(c), std::move(vocab), std::move(w), header.at("seed").get<std::uint64_t>());
}

BoundVlm BoundVlm::bind(Graph& g, const ToyVlm& model, bool trainable) {
  const auto& w = model.weights();
  BoundVlm b;
  b.model = &model;
  b.embedding = g.leaf(w.embedding, trainable, "embedding");
  for (std::size_t i = 0; i < w.conv_kernels.size(); ++i) {
    b.conv_kernels.push_back(g.leaf(w.conv_kernels[i], trainable, "conv.kernel"));
    b.conv_biases.push_back(g.leaf(w.conv_biases[i], trainable, "conv.bias"));
  }
  b.fusion_w = g.leaf(w.fusion_w, trainable, "fusion.weight");
  b.fusion_b = g.leaf(w.fusion_b, trainable, "fusion.bias");
  b.head_w = g.leaf(w.head_w, trainable, "head.weight");
  b.head_b = g.leaf(w.head_b, trainable, "head.bias");
  return b;
}

Var BoundVlm::encode_frame(Var frame) const {
  if (frame.shape() != model->config().frame_shape()) {
    throw ShapeError("encode_frame: frame " + shape_str(frame.shape()) + " but model expects " +
                     shape_str(model->config().frame_shape()));
  }
  Var h = frame;
  for (std::size_t i = 0; i < conv_kernels.size(); ++i) {
    h = ops::relu(ops::conv2d(h, conv_kernels[i], conv_biases[i], 2, 1));
  }
  const auto& s = h.shape();
  return ops::mean_axis(ops::reshape(h, {s[0], s[1] * s[2]}), 1);
}

Var BoundVlm::encode_frames(std::span<const Var> frames) const {
  if (frames.empty()) throw InvalidArgument("encode_frames: empty frame sequence");
  if (frames.size() == 1) return encode_frame(frames[0]);
  std::vector<Var> feats;
  feats.reserve(frames.size());
  for (Var f : frames) feats.push_back(encode_frame(f));
  return ops::mean_axis(ops::stack(feats), 0);
}

Var BoundVlm::encode_prompt(std::span<const int> ids) const {
  return ops::mean_axis(ops::gather_rows(embedding, ids), 0);
}

Var BoundVlm::respond(Var prompt_feature, Var visual_feature) const {
  std::array<Var, 2> parts{prompt_feature, visual_feature};
  Var h = ops::relu(ops::linear(ops::concat(parts), fusion_w, fusion_b));
  return ops::log_softmax(ops::linear(h, head_w, head_b));
}

Tensor forward(const ToyVlm& model, std::span<const Frame> frames, std::span<const int> prompt_ids) {
  if (frames.empty()) throw InvalidArgument("forward: empty frame sequence");
  Graph g;
  BoundVlm b = BoundVlm::bind(g, model, false);
  std::vector<Var> vs;
  vs.reserve(frames.size());
  for (const Frame& f : frames) vs.push_back(g.constant(f.pixels()));
  return b.respond(b.encode_prompt(prompt_ids), b.encode_frames(vs)).value();
}

Tensor forward(const ToyVlm& model, const FrameSequence& seq, std::string_view prompt) {
  auto ids = model.encode_text(prompt);
  return forward(model, seq.frames, ids);
}

std::size_t argmax(const Tensor& values) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

TrainResult train(ToyVlm& model, std::span<const TrainingSample> data, int epochs, double lr,
                  Rng& rng) {
  if (data.empty()) throw InvalidArgument("train: empty dataset");
  if (lr < 0.0 || !std::isfinite(lr)) throw InvalidArgument("train: learning rate must be non-negative");
  if (epochs < 0) throw InvalidArgument("train: epochs must be non-negative");
  for (const auto& s : data) {
    if (s.label < 0 || s.label >= model.config().num_classes) {
      throw InvalidArgument("train: label " + std::to_string(s.label) + " out of range");
    }
  }
  TrainResult result;
  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  for (int epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t idx : order) {
      const TrainingSample& s = data[idx];
      Graph g;
      BoundVlm b = BoundVlm::bind(g, model, true);
      std::vector<Var> vs;
      for (const Frame& f : s.frames) vs.push_back(g.constant(f.pixels()));
      Var loss = ops::nll(b.respond(b.encode_prompt(s.prompt), b.encode_frames(vs)),
                          static_cast<std::size_t>(s.label));
      total += loss.value()[0];
      g.backward(loss);
      if (lr == 0.0) continue;
      std::vector<Var> params{b.embedding, b.fusion_w, b.fusion_b, b.head_w, b.head_b};
      params.insert(params.end(), b.conv_kernels.begin(), b.conv_kernels.end());
      params.insert(params.end(), b.conv_biases.begin(), b.conv_biases.end());
      auto& w = model.mutable_weights();
      std::vector<Tensor*> targets{&w.embedding, &w.fusion_w, &w.fusion_b, &w.head_w, &w.head_b};
      for (auto& t : w.conv_kernels) targets.push_back(&t);
      for (auto& t : w.conv_biases) targets.push_back(&t);
      for (std::size_t p = 0; p < params.size(); ++p) {
        const Tensor& grad = g.grad_of(params[p].id());
        if (grad.empty()) continue;
        Tensor& t = *targets[p];
        for (std::size_t i = 0; i < t.size(); ++i) t[i] -= lr * grad[i];
      }
    }
    result.epoch_loss.push_back(total / static_cast<double>(data.size()));
  }
  return result;
}

AttentionMap attention_map(const ToyVlm& model, const Frame& frame, std::span<const int> prompt_ids) {
  Graph g;
  BoundVlm b = BoundVlm::bind(g, model, false);
  Var x = g.leaf(frame.pixels(), true, "frame");
  Var logp = b.respond(b.encode_prompt(prompt_ids), b.encode_frame(x));
  Var root = ops::pick(logp, argmax(logp.value()));
  g.backward(root);
  const Tensor grad = g.grad(x);
  const std::size_t C = frame.channels(), H = frame.height(), W = frame.width();
  Tensor map({H, W});
  for (std::size_t c = 0; c < C; ++c)
    for (std::size_t i = 0; i < H * W; ++i) map[i] = std::max(map[i], std::fabs(grad[c * H * W + i]));
  const auto [lo, hi] = std::minmax_element(map.data().begin(), map.data().end());
  const double min = *lo, range = *hi - *lo;
  if (!(range > 0.0)) return AttentionMap(Tensor::full({H, W}, 0.5));
  for (double& v : map.data()) v = std::clamp((v - min) / range, 0.0, 1.0);
  return AttentionMap(std::move(map));
}

}  // namespace advlm
