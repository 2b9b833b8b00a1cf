// Copyright 2026 The whisperkit Authors.
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

#ifndef WHISPERKIT_LOG_H_
#define WHISPERKIT_LOG_H_

#include <sstream>
#include <string>

namespace whisperkit {

enum class LogLevel { kError = 0, kWarning = 1, kInfo = 2, kDebug = 3 };

// Verbosity comes from the WHISPERKIT_LOG environment variable
// (error|warning|info|debug, default warning), read once.
LogLevel log_level();
void set_log_level(LogLevel level);
void log_message(LogLevel level, const std::string& message);

namespace internal {

class LogLine {
 public:
  explicit LogLine(LogLevel level) : level_(level) {}
  ~LogLine() { log_message(level_, stream_.str()); }
  template <typename T>
  LogLine& operator<<(const T& value) {
    stream_ << value;
    return *this;
  }

 private:
  LogLevel level_;
  std::ostringstream stream_;
};

}  // namespace internal
}  // namespace whisperkit

#define WK_LOG(level)                                    \
  if (::whisperkit::log_level() < ::whisperkit::LogLevel::level) { \
  } else                                                 \
    ::whisperkit::internal::LogLine(::whisperkit::LogLevel::level)

#endif  // WHISPERKIT_LOG_H_
