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

#ifndef WHISPERKIT_CLI_H_
#define WHISPERKIT_CLI_H_

#include <ostream>
#include <string>
#include <vector>

namespace whisperkit {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataFailure = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line (arguments without the program name) and returns
// the exit code: 0 success, 1 data failures (some or all rows), 2 usage or
// configuration errors.
//
// Subcommands: features, train, decode, score, analyze, manifest-summarize,
// manifest-split, synth-dataset. Settings resolve as built-in defaults,
// overridden by --config (JSON with optional "features", "model", "train",
// "decode" and "seed" sections), overridden by explicit flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace whisperkit

#endif  // WHISPERKIT_CLI_H_
