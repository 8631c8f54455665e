// Copyright 2026 The texcorpus Authors.
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

// A child process spoken to one line at a time over its stdin/stdout.
// Used by the external tagger plugins.

#include <signal.h>
#include <sys/socket.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <mutex>
#include <string>
#include <vector>

#include "texcorpus/error.hpp"

namespace texcorpus {

class LineProcess {
 public:
  explicit LineProcess(std::vector<std::string> argv) : argv_(std::move(argv)) {
    if (argv_.empty()) throw Error(ErrorCode::kInvalidArgument, "empty tagger command");
  }
  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;
  ~LineProcess() { stop(); }

  // Sends one line and returns the reply line (without the newline).
  // Throws TaggerUnavailable if the child cannot be started or has gone away.
  std::string exchange(const std::string& line) {
    std::lock_guard<std::mutex> lock(mu_);
    if (fd_ < 0) start();
    std::string msg = line + "\n";
    std::size_t sent = 0;
    while (sent < msg.size()) {
      ssize_t n = ::send(fd_, msg.data() + sent, msg.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        stop();
        throw Error(ErrorCode::kTaggerUnavailable, "tagger closed its input");
      }
      sent += static_cast<std::size_t>(n);
    }
    for (;;) {
      if (auto nl = buffer_.find('\n'); nl != std::string::npos) {
        std::string reply = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return reply;
      }
      char chunk[4096];
      ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        stop();
        throw Error(ErrorCode::kTaggerUnavailable, "tagger exited without replying");
      }
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

 private:
  void start() {
    int sv[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, sv) != 0) {
      throw Error(ErrorCode::kTaggerUnavailable, "socketpair failed");
    }
    std::vector<char*> args;
    for (auto& a : argv_) args.push_back(a.data());
    args.push_back(nullptr);
    pid_t pid = ::fork();
    if (pid < 0) {
      ::close(sv[0]);
      ::close(sv[1]);
      throw Error(ErrorCode::kTaggerUnavailable, "fork failed");
    }
    if (pid == 0) {
      ::dup2(sv[1], STDIN_FILENO);
      ::dup2(sv[1], STDOUT_FILENO);
      ::execvp(args[0], args.data());
      ::_exit(127);
    }
    ::close(sv[1]);
    fd_ = sv[0];
    pid_ = pid;
    buffer_.clear();
  }

  void stop() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
    if (pid_ > 0) {
      ::kill(pid_, SIGTERM);
      ::waitpid(pid_, nullptr, 0);
    }
    pid_ = -1;
  }

  std::vector<std::string> argv_;
  std::mutex mu_;
  int fd_ = -1;
  pid_t pid_ = -1;
  std::string buffer_;
};

}  // namespace texcorpus
