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

#ifndef VXCODE_SUBPROCESS_H_
#define VXCODE_SUBPROCESS_H_

#include <sys/types.h>

#include <optional>
#include <string>

namespace vxcode {

// Child process started through /bin/sh -c whose stdin and stdout are one
// end of a socket pair. Line-oriented I/O; stderr is inherited. Failures
// throw TransportError.
class Subprocess {
 public:
  explicit Subprocess(const std::string& command);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Writes `line` plus '\n'.
  void WriteLine(const std::string& line);
  // Next line without the terminator; nullopt at end of stream.
  std::optional<std::string> ReadLine();

  pid_t pid() const { return pid_; }

 private:
  int fd_ = -1;
  pid_t pid_ = -1;
  std::string buffer_;
};

}  // namespace vxcode

#endif  // VXCODE_SUBPROCESS_H_
