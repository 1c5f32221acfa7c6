// Copyright 2026 The Authors.
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

#include "vxcode/sidecar_client.h"

#include <openssl/evp.h>

#include <cmath>
#include <map>
#include <nlohmann/json.hpp>
#include <utility>

namespace vxcode {

using nlohmann::json;

std::string Base64Encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3) + 1, '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                bytes.data(), static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string MakeLoadMessage(std::uint64_t id,
                            const std::vector<std::uint8_t>& png) {
  json msg = {{"v", kWireVersion},
              {"type", "load"},
              {"id", id},
              {"png_b64", Base64Encode(png)}};
  return msg.dump();
}

std::string MakeDetectMessage(std::uint64_t id, std::uint64_t image_ref,
                              const PatchGrid& grid, const PatchSet& keep,
                              const std::string& detector) {
  json msg = {{"v", kWireVersion},
              {"type", "detect"},
              {"id", id},
              {"image_ref", image_ref},
              {"grid", {grid.rows(), grid.cols()}},
              {"keep", std::vector<PatchIndex>(keep.begin(), keep.end())},
              {"detector", detector}};
  return msg.dump();
}

namespace {

double FiniteNumber(const json& v) {
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw TransportError("sidecar: non-finite number");
  return d;
}

}  // namespace

WireResponse ParseWireResponse(const std::string& line) {
  json msg;
  try {
    msg = json::parse(line);
  } catch (const json::exception& e) {
    throw TransportError(std::string("sidecar: unparseable response: ") +
                         e.what());
  }
  try {
    if (msg.at("v").get<int>() != kWireVersion) {
      throw TransportError("sidecar: unsupported protocol version");
    }
    WireResponse out;
    out.id = msg.at("id").get<std::uint64_t>();
    const std::string type = msg.at("type").get<std::string>();
    if (type == "error") {
      out.kind = WireResponse::Kind::kError;
      out.message = msg.at("message").get<std::string>();
      return out;
    }
    if (type != "result") {
      throw TransportError("sidecar: unexpected message type " + type);
    }
    for (const json& p : msg.at("proposals")) {
      const json& b = p.at("box");
      if (b.size() != 4) throw TransportError("sidecar: box needs 4 numbers");
      Proposal prop;
      prop.box = {FiniteNumber(b[0]), FiniteNumber(b[1]), FiniteNumber(b[2]),
                  FiniteNumber(b[3])};
      for (const json& v : p.at("probs")) prop.probs.push_back(FiniteNumber(v));
      out.proposals.push_back(std::move(prop));
    }
    return out;
  } catch (const json::exception& e) {
    throw TransportError(std::string("sidecar: malformed response: ") +
                         e.what());
  }
}

SidecarDetector::SidecarDetector(const std::string& command,
                                 std::string detector_name)
    : process_(command), detector_name_(std::move(detector_name)) {}

std::uint64_t SidecarDetector::EnsureLoaded(const Image& image) {
  if (loaded_ && *loaded_ == image) return loaded_ref_;
  const std::uint64_t id = next_id_++;
  process_.WriteLine(MakeLoadMessage(id, EncodePng(image)));
  const auto line = process_.ReadLine();
  if (!line) throw TransportError("sidecar: closed while loading image");
  const WireResponse resp = ParseWireResponse(*line);
  if (resp.id != id) throw TransportError("sidecar: load reply id mismatch");
  if (resp.kind == WireResponse::Kind::kError) {
    throw DetectorError("sidecar: load rejected: " + resp.message);
  }
  loaded_ = image;
  loaded_ref_ = id;
  return id;
}

std::vector<Proposal> SidecarDetector::Detect(const Image& image) {
  return DetectMasked(image, PatchGrid(image.width(), image.height(), 1, 1),
                      PatchSet{0});
}

std::vector<Proposal> SidecarDetector::DetectMasked(const Image& image,
                                                    const PatchGrid& grid,
                                                    const PatchSet& keep) {
  const PatchSet one[] = {keep};
  return DetectMaskedBatch(image, grid, one).front();
}

std::vector<std::vector<Proposal>> SidecarDetector::DetectMaskedBatch(
    const Image& image, const PatchGrid& grid,
    std::span<const PatchSet> keeps) {
  std::lock_guard<std::mutex> lock(mu_);
  const std::uint64_t ref = EnsureLoaded(image);

  // A bounded window keeps both socket buffers from filling at once.
  constexpr std::size_t kWindow = 16;
  std::map<std::uint64_t, std::size_t> pending;
  std::vector<std::vector<Proposal>> out(keeps.size());
  std::optional<std::string> first_error;
  std::size_t next = 0;
  while (next < keeps.size() || !pending.empty()) {
    while (next < keeps.size() && pending.size() < kWindow) {
      const std::uint64_t id = next_id_++;
      pending.emplace(id, next);
      process_.WriteLine(
          MakeDetectMessage(id, ref, grid, keeps[next], detector_name_));
      ++next;
    }
    const auto line = process_.ReadLine();
    if (!line) {
      throw TransportError("sidecar: closed with " +
                           std::to_string(pending.size()) +
                           " requests outstanding");
    }
    WireResponse resp = ParseWireResponse(*line);
    const auto it = pending.find(resp.id);
    if (it == pending.end()) {
      throw TransportError("sidecar: response for unknown id " +
                           std::to_string(resp.id));
    }
    if (resp.kind == WireResponse::Kind::kError) {
      if (!first_error) first_error = resp.message;
    } else {
      out[it->second] = std::move(resp.proposals);
    }
    pending.erase(it);
  }
  // All responses are drained first so the session stays in sync.
  if (first_error) throw DetectorError("sidecar: " + *first_error);
  return out;
}

std::optional<std::string> SidecarDetector::RawExchange(
    const std::string& line) {
  std::lock_guard<std::mutex> lock(mu_);
  process_.WriteLine(line);
  return process_.ReadLine();
}

}  // namespace vxcode
