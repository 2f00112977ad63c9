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

#include "advlm/benchmark.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "advlm/error.hpp"

namespace advlm {

const std::vector<SeedPrompt>& benchmark_seed_prompts() {
  static const std::vector<SeedPrompt> seeds{
      {"s0", "what should the car do at the intersection"},
      {"s1", "how should the vehicle proceed on this road"},
      {"s2", "what is the correct driving action now"},
      {"s3", "decide the next maneuver for the ego car"},
      {"s4", "what action should the driver take ahead"},
      {"s5", "given the road markers what should the car do"},
      {"s6", "choose the safe driving response for this scene"},
      {"s7", "how should we drive through the upcoming section"},
  };
  return seeds;
}

std::vector<Scenario> Benchmark::train() const {
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (is_train[i]) out.push_back(scenarios[i]);
  }
  return out;
}

std::vector<Scenario> Benchmark::eval() const {
  std::vector<Scenario> out;
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    if (!is_train[i]) out.push_back(scenarios[i]);
  }
  return out;
}

namespace {

// Marker color per response class (straight, left, right, stop, slow).
constexpr std::array<std::array<double, 3>, 5> kPalette{{
    {0.15, 0.75, 0.20},
    {0.15, 0.35, 0.85},
    {0.85, 0.50, 0.10},
    {0.85, 0.10, 0.10},
    {0.85, 0.80, 0.15},
}};

struct Marker {
  double x, y, vx, vy;
  int size;
  std::array<double, 3> color;
};

Frame render_frame(const BenchmarkOptions& opt, std::size_t index, const std::array<double, 3>& base, const Marker& m,
                   bool visible, const Marker& distractor, Rng& rng) {
  const auto H = static_cast<std::size_t>(opt.height), W = static_cast<std::size_t>(opt.width);
  Tensor t({3, H, W});
  const std::size_t lane = W / 2;
  for (std::size_t y = 0; y < H; ++y) {
    const bool dash = ((y + 3 * index) / 4) % 2 == 0;
    for (std::size_t x = 0; x < W; ++x) {
      const bool lane_px = dash && (x == lane || x + 1 == lane);
      for (std::size_t c = 0; c < 3; ++c) {
        double v = lane_px ? 0.9 : base[c] + rng.normal(0.0, 0.04);
        t[c * H * W + y * W + x] = v;
      }
    }
  }
  auto paint = [&](const Marker& mk) {
    const double px = mk.x + mk.vx * static_cast<double>(index);
    const double py = mk.y + mk.vy * static_cast<double>(index);
    const int x0 = static_cast<int>(std::lround(px)), y0 = static_cast<int>(std::lround(py));
    for (int dy = 0; dy < mk.size; ++dy) {
      for (int dx = 0; dx < mk.size; ++dx) {
        const int yy = y0 + dy, xx = x0 + dx;
        if (yy < 0 || xx < 0 || yy >= opt.height || xx >= opt.width) continue;
        for (std::size_t c = 0; c < 3; ++c) {
          t[c * H * W + static_cast<std::size_t>(yy) * W + static_cast<std::size_t>(xx)] =
              mk.color[c] + rng.normal(0.0, 0.03);
        }
      }
    }
  };
  paint(distractor);
  if (visible) paint(m);
  for (double& v : t.data()) v = std::clamp(v, 0.0, 1.0);
  return Frame(std::move(t));
}

}  // namespace

Benchmark generate_benchmark(Rng& rng, std::size_t size, const BenchmarkOptions& opt) {
  if (size < 1) throw InvalidArgument("generate_benchmark: size must be >= 1");
  if (opt.min_frames < 1 || opt.max_frames < opt.min_frames) {
    throw InvalidArgument("generate_benchmark: bad frame count range");
  }
  if (opt.height < 12 || opt.width < 12) throw InvalidArgument("generate_benchmark: frames too small");
  Benchmark bench;
  bench.seed = rng.seed();
  const auto& seeds = benchmark_seed_prompts();
  const auto n_train = static_cast<std::size_t>(std::llround(opt.train_fraction * static_cast<double>(size)));
  for (std::size_t i = 0; i < size; ++i) {
    Scenario s;
    std::ostringstream id;
    id << "sc" << std::setw(4) << std::setfill('0') << i;
    s.id = id.str();
    s.label = static_cast<int>(rng.uniform_int(5));
    s.target = static_cast<int>((static_cast<std::uint32_t>(s.label) + 1 + rng.uniform_int(4)) % 5);
    s.prompt = seeds[rng.uniform_int(static_cast<std::uint32_t>(seeds.size()))].text;
    const std::size_t n =
        opt.min_frames + rng.uniform_int(static_cast<std::uint32_t>(opt.max_frames - opt.min_frames + 1));
    // Gray road under a per-channel lighting tint.
    const double gray = rng.uniform(0.3, 0.5);
    std::array<double, 3> base{};
    for (double& b : base) b = gray + rng.uniform(-opt.tint, opt.tint);
    Marker m;
    m.size = 9 + static_cast<int>(rng.uniform_int(6));
    m.x = rng.uniform(2.0, opt.width - m.size - 2.0);
    m.y = rng.uniform(2.0, opt.height - m.size - 2.0);
    m.vx = rng.uniform(-1.5, 1.5);
    m.vy = rng.uniform(-1.5, 1.5);
    for (std::size_t c = 0; c < 3; ++c) {
      m.color[c] = std::clamp(kPalette[static_cast<std::size_t>(s.label)][c] + rng.uniform(-0.05, 0.05), 0.0, 1.0);
    }
    Marker distractor;
    distractor.size = 4 + static_cast<int>(rng.uniform_int(5));
    distractor.x = rng.uniform(0.0, opt.width - 4.0);
    distractor.y = rng.uniform(0.0, opt.height - 4.0);
    distractor.vx = rng.uniform(-1.0, 1.0);
    distractor.vy = rng.uniform(-1.0, 1.0);
    const double shade = rng.uniform(0.15, 0.65);
    distractor.color = {shade, shade, shade * rng.uniform(0.85, 1.0)};
    // Occlusions never hide the marker in more than half the frames.
    std::vector<bool> visible(n, true);
    for (std::size_t k = 1; k < n; ++k) visible[k] = rng.uniform() >= 0.2;
    std::size_t shown = static_cast<std::size_t>(std::count(visible.begin(), visible.end(), true));
    for (std::size_t k = 1; k < n && shown * 2 < n; ++k) {
      if (!visible[k]) {
        visible[k] = true;
        ++shown;
      }
    }
    std::vector<Frame> frames;
    for (std::size_t k = 0; k < n; ++k) frames.push_back(render_frame(opt, k, base, m, visible[k], distractor, rng));
    s.frames = FrameSequence(s.id, std::move(frames));
    bench.scenarios.push_back(std::move(s));
    bench.is_train.push_back(i < n_train);
  }
  return bench;
}

void write_benchmark(const Benchmark& bench, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "frames");
  nlohmann::json scenarios = nlohmann::json::array();
  for (std::size_t i = 0; i < bench.scenarios.size(); ++i) {
    const Scenario& s = bench.scenarios[i];
    nlohmann::json frames = nlohmann::json::array();
    for (std::size_t k = 0; k < s.frames.size(); ++k) {
      const std::string rel = "frames/" + s.id + "_" + std::to_string(k) + ".advt";
      save_tensor((fs::path(dir) / rel).string(), s.frames[k].pixels());
      frames.push_back(rel);
    }
    scenarios.push_back({{"id", s.id},
                         {"frames", frames},
                         {"prompt", s.prompt},
                         {"label", s.label},
                         {"target", s.target},
                         {"split", bench.is_train[i] ? "train" : "eval"}});
  }
  nlohmann::json manifest = {{"name", bench.name}, {"seed", bench.seed}, {"scenarios", scenarios}};
  std::ofstream out(fs::path(dir) / "manifest.json");
  if (!out) throw IoError("cannot write manifest in " + dir);
  out << manifest.dump(2) << '\n';
}

Benchmark load_benchmark(const std::string& manifest_path) {
  namespace fs = std::filesystem;
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot read manifest " + manifest_path);
  const fs::path root = fs::path(manifest_path).parent_path();
  Benchmark bench;
  try {
    auto j = nlohmann::json::parse(in);
    bench.name = j.at("name").get<std::string>();
    bench.seed = j.at("seed").get<std::uint64_t>();
    std::set<std::string> ids;
    for (const auto& js : j.at("scenarios")) {
      Scenario s;
      s.id = js.at("id").get<std::string>();
      if (!ids.insert(s.id).second) throw IoError("manifest " + manifest_path + ": duplicate id " + s.id);
      std::vector<Frame> frames;
      for (const auto& p : js.at("frames")) {
        const fs::path fp = root / p.get<std::string>();
        if (!fs::exists(fp)) throw IoError("manifest " + manifest_path + ": missing frame " + fp.string());
        frames.emplace_back(load_tensor(fp.string()));
      }
      s.frames = FrameSequence(s.id, std::move(frames));
      s.prompt = js.at("prompt").get<std::string>();
      s.label = js.at("label").get<int>();
      s.target = js.at("target").get<int>();
      bench.is_train.push_back(js.value("split", "eval") == "train");
      bench.scenarios.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw IoError("manifest " + manifest_path + ": " + e.what());
  }
  return bench;
}

std::vector<TrainingSample> training_samples(const ToyVlm& model, std::span<const Scenario> scenarios) {
  std::vector<TrainingSample> out;
  out.reserve(scenarios.size());
  for (const Scenario& s : scenarios) {
    out.push_back({s.frames.frames, model.encode_text(s.prompt), s.label});
  }
  return out;
}

}  // namespace advlm
