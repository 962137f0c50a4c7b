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

#include "external_process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <thread>

#include "sgsm/error.hpp"

extern char** environ;

namespace sgsm::detail {
namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    struct sigaction sa {};
    sa.sa_handler = SIG_IGN;
    sigemptyset(&sa.sa_mask);
    sigaction(SIGPIPE, &sa, nullptr);
    return true;
  }();
  (void)once;
}

[[noreturn]] void unavailable(const std::string& what) {
  throw Error(ErrorKind::kLabelerUnavailable, what + ": " + std::strerror(errno));
}

void close_fd(int& fd) {
  if (fd >= 0) {
    ::close(fd);
    fd = -1;
  }
}

int remaining_ms(std::chrono::steady_clock::time_point deadline) {
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
      deadline - std::chrono::steady_clock::now());
  return left.count() <= 0 ? 0 : static_cast<int>(std::min<long long>(left.count(), 1 << 30));
}

}  // namespace

Subprocess::Subprocess(const std::string& command) {
  ignore_sigpipe();
  int in_pipe[2];
  int out_pipe[2];
  if (::pipe2(in_pipe, O_CLOEXEC) != 0) unavailable("pipe");
  if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
    ::close(in_pipe[0]);
    ::close(in_pipe[1]);
    unavailable("pipe");
  }

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, in_pipe[0], STDIN_FILENO);
  posix_spawn_file_actions_adddup2(&actions, out_pipe[1], STDOUT_FILENO);

  // Own process group, so kill() also reaches whatever the shell started.
  posix_spawnattr_t attr;
  posix_spawnattr_init(&attr);
  posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP);
  posix_spawnattr_setpgroup(&attr, 0);

  const char* argv[] = {"/bin/sh", "-c", command.c_str(), nullptr};
  pid_t pid = -1;
  const int rc = ::posix_spawn(&pid, "/bin/sh", &actions, &attr,
                               const_cast<char* const*>(argv), environ);
  posix_spawnattr_destroy(&attr);
  posix_spawn_file_actions_destroy(&actions);
  ::close(in_pipe[0]);
  ::close(out_pipe[1]);
  if (rc != 0) {
    ::close(in_pipe[1]);
    ::close(out_pipe[0]);
    errno = rc;
    unavailable("cannot spawn '" + command + "'");
  }
  pid_ = pid;
  stdin_fd_ = in_pipe[1];
  stdout_fd_ = out_pipe[0];
  ::fcntl(stdin_fd_, F_SETFL, ::fcntl(stdin_fd_, F_GETFL) | O_NONBLOCK);
}

Subprocess::~Subprocess() {
  close_fd(stdin_fd_);
  close_fd(stdout_fd_);
  if (pid_ > 0) kill();
}

void Subprocess::kill() {
  if (pid_ <= 0) return;
  ::kill(-pid_, SIGKILL);
  int status = 0;
  while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
  }
  pid_ = -1;
}

void Subprocess::close_stdin() { close_fd(stdin_fd_); }

Subprocess::IoStatus Subprocess::poll_once(std::string_view& pending, std::string& received,
                                           std::chrono::steady_clock::time_point deadline) {
  if (stdout_closed_) return IoStatus::kClosed;
  pollfd fds[2];
  nfds_t n = 0;
  fds[n++] = {stdout_fd_, POLLIN, 0};
  const bool writing = !pending.empty() && stdin_fd_ >= 0;
  if (writing) fds[n++] = {stdin_fd_, POLLOUT, 0};

  const int timeout = remaining_ms(deadline);
  if (timeout == 0) return IoStatus::kTimedOut;
  const int ready = ::poll(fds, n, timeout);
  if (ready < 0) {
    if (errno == EINTR) return IoStatus::kOk;
    unavailable("poll");
  }
  if (ready == 0) return IoStatus::kTimedOut;

  if (writing && (fds[1].revents & (POLLOUT | POLLERR | POLLHUP))) {
    const ssize_t w = ::write(stdin_fd_, pending.data(), pending.size());
    if (w > 0) {
      pending.remove_prefix(static_cast<std::size_t>(w));
    } else if (w < 0 && errno != EAGAIN && errno != EINTR) {
      // The child stopped reading; whatever it already wrote is still
      // drained below and the caller decides what is missing.
      close_fd(stdin_fd_);
      pending = {};
    }
  }
  if (fds[0].revents & (POLLIN | POLLHUP | POLLERR)) {
    char buf[1 << 16];
    const ssize_t r = ::read(stdout_fd_, buf, sizeof buf);
    if (r > 0) {
      received.append(buf, static_cast<std::size_t>(r));
    } else if (r == 0) {
      stdout_closed_ = true;
      return IoStatus::kClosed;
    } else if (errno != EINTR && errno != EAGAIN) {
      unavailable("read from labeler");
    }
  }
  return IoStatus::kOk;
}

std::optional<int> Subprocess::wait(std::chrono::steady_clock::time_point deadline) {
  if (pid_ <= 0) return 0;
  for (;;) {
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
      pid_ = -1;
      if (WIFEXITED(status)) return WEXITSTATUS(status);
      return 128 + (WIFSIGNALED(status) ? WTERMSIG(status) : 0);
    }
    if (r < 0 && errno != EINTR) unavailable("waitpid");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill();
      return std::nullopt;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
}

}  // namespace sgsm::detail
