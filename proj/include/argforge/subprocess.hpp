// Copyright 2026 The Argforge Authors.
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

#ifndef ARGFORGE_SUBPROCESS_HPP_
#define ARGFORGE_SUBPROCESS_HPP_

#include <chrono>
#include <stdexcept>
#include <string>
#include <string_view>

#include <sys/types.h>

namespace argforge {

class SubprocessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A child process (`/bin/sh -c command`) spoken to one line at a time over
// its stdin/stdout. Not thread-safe; callers serialize requests.
class LineProcess {
 public:
  LineProcess(std::string command, std::chrono::milliseconds timeout);
  ~LineProcess();

  LineProcess(const LineProcess&) = delete;
  LineProcess& operator=(const LineProcess&) = delete;

  // Sends `line` (a trailing newline is appended) and returns the next
  // response line without its terminator. Throws SubprocessError on timeout,
  // EOF or a write failure.
  std::string request(std::string_view line);

  const std::string& command() const { return command_; }

 private:
  std::string read_line();
  void shutdown();

  std::string command_;
  std::chrono::milliseconds timeout_;
  pid_t pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
};

}  // namespace argforge

#endif  // ARGFORGE_SUBPROCESS_HPP_
