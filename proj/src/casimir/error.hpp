// Copyright 2026 The casimir-mc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Error categories shared by every module. The C API maps each one onto a
// status code, so keep this list in sync with include/casimir/casimir.h.
enum class ErrorCode {
    Validation,
    Io,
    ShapeMismatch,
    NonHermitianInput,
    DegenerateSample,
    UnsupportedDimension,
    AxisMismatch,
    EmptyCell,
    InsufficientData,
    DomainError,
    ConfigHashMismatch,
    CorruptCheckpoint,
};

const char *error_code_name(ErrorCode code);

class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {
    }

    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace casimir
