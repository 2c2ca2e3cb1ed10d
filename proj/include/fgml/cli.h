/*
 * Copyright 2026 The fgml Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FGML_CLI_H_
#define FGML_CLI_H_

#include <ostream>

#include "fgml/common.h"

namespace fgml {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitRuntime = 2;

// Exit status for a library error: kIoError is a runtime failure, every other
// code means the inputs or flags did not validate.
int ExitCodeFor(ErrorCode code);

// Entry point of the `fgml` tool. Writes the one-line summary to `out` and
// diagnostics to `err`.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace fgml

#endif  // FGML_CLI_H_
