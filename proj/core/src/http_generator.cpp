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

#ifdef ADVLM_WITH_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include <httplib.h>

#include <cctype>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <set>

#include "advlm/error.hpp"
#include "advlm/variant_generator.hpp"

namespace advlm {
namespace {

struct Endpoint {
  std::string base;  // scheme://host[:port]
  std::string path;
};

Endpoint split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw InvalidArgument("http generator: endpoint needs a scheme: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

HttpGenerator::HttpGenerator(HttpGeneratorOptions options) : options_(std::move(options)) {
  if (options_.endpoint.empty()) throw InvalidArgument("http generator: endpoint not configured");
  split_url(options_.endpoint);
}

std::string HttpGenerator::id() const { return "http:" + options_.model; }

std::vector<std::string> HttpGenerator::parse_lines(std::string_view content) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    auto nl = content.find('\n', pos);
    if (nl == std::string_view::npos) nl = content.size();
    std::string line = trim(content.substr(pos, nl - pos));
    pos = nl + 1;
    // "1." / "2)" / "-" / "*" list markers
    std::size_t k = 0;
    while (k < line.size() && std::isdigit(static_cast<unsigned char>(line[k]))) ++k;
    if (k > 0 && k < line.size() && (line[k] == '.' || line[k] == ')')) line = trim(line.substr(k + 1));
    if (!line.empty() && (line[0] == '-' || line[0] == '*')) line = trim(line.substr(1));
    while (line.size() >= 2 && (line.front() == '"' || line.front() == '\'') && line.back() == line.front()) {
      line = trim(line.substr(1, line.size() - 2));
    }
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::vector<std::string> HttpGenerator::generate(std::string_view seed, std::size_t count, Rng& rng) {
  if (count < 1) throw InvalidArgument("generate_variants: count must be >= 1");
  const Endpoint ep = split_url(options_.endpoint);
  httplib::Client client(ep.base);
  client.set_connection_timeout(options_.timeout_seconds, 0);
  client.set_read_timeout(options_.timeout_seconds, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(options_.api_key_env.c_str()); key != nullptr && *key != '\0') {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  nlohmann::json request = {
      {"model", options_.model},
      {"temperature", options_.temperature},
      {"seed", rng.next_u32()},
      {"messages",
       {{{"role", "system"},
         {"content",
          "You rewrite driving instructions. Reply with semantically equivalent paraphrases, "
          "one per line, no numbering, no commentary."}},
        {{"role", "user"},
         {"content", "Give " + std::to_string(count) + " different paraphrases of: " + std::string(seed)}}}}};
  auto res = client.Post(ep.path, headers, request.dump(), "application/json");
  if (!res) {
    throw Error("http generator: endpoint " + options_.endpoint +
                " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error("http generator: status " + std::to_string(res->status) + ", body: " + res->body);
  }
  std::string content;
  try {
    auto body = nlohmann::json::parse(res->body);
    content = body.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception&) {
    throw Error("http generator: malformed response body: " + res->body);
  }
  std::vector<std::string> out;
  std::set<std::string> seen{normalize_text(seed)};
  for (auto& line : parse_lines(content)) {
    if (out.size() >= count) break;
    std::string norm = normalize_text(line);
    if (norm.empty() || !seen.insert(norm).second) continue;
    out.push_back(std::move(norm));
  }
  return out;
}

}  // namespace advlm
