// Copyright (c) 2026 thermoscreen authors
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

namespace thermoscreen {

/// Entry point shared by the binary and the tests. Subcommands: normalize,
/// augment, detect, screen, evaluate, synth, stream, split.
/// Exit codes: 0 success, 1 input/validation error, 2 internal error.
int cli_dispatch(int argc, const char* const* argv);

}  // namespace thermoscreen
