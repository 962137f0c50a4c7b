// Copyright 2026 The SGSM Authors
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

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace sgsm::detail {

/// A child started via `/bin/sh -c command` with piped stdin/stdout; stderr
/// is inherited. The destructor kills and reaps a child that is still alive.
class Subprocess {
 public:
  explicit Subprocess(const std::string& command);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  enum class IoStatus { kOk, kClosed, kTimedOut };

  /// Writes `pending` while collecting stdout into `received`, returning as
  /// soon as `on_output` reports it has seen enough, all input is written and
  /// `until_done` holds, stdout closes, or the deadline passes.
  template <typename Done>
  IoStatus pump(std::string_view& pending, std::string& received,
                std::chrono::steady_clock::time_point deadline, Done until_done);

  void close_stdin();
  /// Waits for exit; returns the exit code, or nullopt on timeout (child killed).
  std::optional<int> wait(std::chrono::steady_clock::time_point deadline);
  void kill();

 private:
  IoStatus poll_once(std::string_view& pending, std::string& received,
                     std::chrono::steady_clock::time_point deadline);

  int pid_ = -1;
  int stdin_fd_ = -1;
  int stdout_fd_ = -1;
  bool stdout_closed_ = false;
};

template <typename Done>
Subprocess::IoStatus Subprocess::pump(std::string_view& pending, std::string& received,
                                      std::chrono::steady_clock::time_point deadline,
                                      Done until_done) {
  for (;;) {
    if (pending.empty() && until_done()) return IoStatus::kOk;
    const IoStatus status = poll_once(pending, received, deadline);
    if (status != IoStatus::kOk) return status;
  }
}

}  // namespace sgsm::detail
