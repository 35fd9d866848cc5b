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

#include "casimir/error.hpp"

namespace casimir {

const char *error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::Validation:
            return "ValidationError";
        case ErrorCode::Io:
            return "IoError";
        case ErrorCode::ShapeMismatch:
            return "ShapeMismatch";
        case ErrorCode::NonHermitianInput:
            return "NonHermitianInput";
        case ErrorCode::DegenerateSample:
            return "DegenerateSample";
        case ErrorCode::UnsupportedDimension:
            return "UnsupportedDimension";
        case ErrorCode::AxisMismatch:
            return "AxisMismatch";
        case ErrorCode::EmptyCell:
            return "EmptyCell";
        case ErrorCode::InsufficientData:
            return "InsufficientData";
        case ErrorCode::DomainError:
            return "DomainError";
        case ErrorCode::ConfigHashMismatch:
            return "ConfigHashMismatch";
        case ErrorCode::CorruptCheckpoint:
            return "CorruptCheckpoint";
    }
    return "UnknownError";
}

}  // namespace casimir
