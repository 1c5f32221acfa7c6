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

//
// Client for an external detector process speaking newline-delimited JSON on
// its standard streams. Every message carries "v":1.
//
//   -> {"v":1,"type":"load","id":7,"png_b64":"..."}
//   <- {"v":1,"type":"result","id":7,"proposals":[]}
//   -> {"v":1,"type":"detect","id":8,"image_ref":7,"grid":[dh,dw],
//       "keep":[0,3,4],"detector":"mock"}
//   <- {"v":1,"type":"result","id":8,"proposals":[{"box":[x1,y1,x2,y2],
//       "probs":[...]}]}
//   <- {"v":1,"type":"error","id":8,"message":"..."}
//
// The id of the load message is the image_ref of later requests. Responses
// may arrive out of order; they are matched by id.
//

#ifndef VXCODE_SIDECAR_CLIENT_H_
#define VXCODE_SIDECAR_CLIENT_H_

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "vxcode/detector.h"
#include "vxcode/subprocess.h"

namespace vxcode {

inline constexpr int kWireVersion = 1;

std::string Base64Encode(const std::vector<std::uint8_t>& bytes);

std::string MakeLoadMessage(std::uint64_t id,
                            const std::vector<std::uint8_t>& png);
std::string MakeDetectMessage(std::uint64_t id, std::uint64_t image_ref,
                              const PatchGrid& grid, const PatchSet& keep,
                              const std::string& detector);

struct WireResponse {
  enum class Kind { kResult, kError };
  Kind kind = Kind::kResult;
  std::uint64_t id = 0;
  std::vector<Proposal> proposals;
  std::string message;
};

// Throws TransportError for anything that is not a well-formed v1 response.
WireResponse ParseWireResponse(const std::string& line);

// Detector backed by a sidecar process. Images are sent once as PNG and
// referenced afterwards, so a request costs O(|keep|) bytes. Batches are
// pipelined: all requests are written before responses are read.
class SidecarDetector : public Detector {
 public:
  SidecarDetector(const std::string& command, std::string detector_name);

  std::vector<Proposal> Detect(const Image& image) override;
  std::vector<Proposal> DetectMasked(const Image& image, const PatchGrid& grid,
                                     const PatchSet& keep) override;
  std::vector<std::vector<Proposal>> DetectMaskedBatch(
      const Image& image, const PatchGrid& grid,
      std::span<const PatchSet> keeps) override;

  // Sends a raw line and returns the next response line; for protocol tests.
  std::optional<std::string> RawExchange(const std::string& line);

 private:
  std::uint64_t EnsureLoaded(const Image& image);

  std::mutex mu_;
  Subprocess process_;
  std::string detector_name_;
  std::uint64_t next_id_ = 1;
  std::optional<Image> loaded_;
  std::uint64_t loaded_ref_ = 0;
};

}  // namespace vxcode

#endif  // VXCODE_SIDECAR_CLIENT_H_
