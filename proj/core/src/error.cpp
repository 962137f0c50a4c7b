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

#include "sgsm/error.hpp"

namespace sgsm {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUnknownLabel: return "UnknownLabel";
    case ErrorKind::kMalformedRule: return "MalformedRule";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kLabelerUnavailable: return "LabelerUnavailable";
    case ErrorKind::kProtocolViolation: return "ProtocolViolation";
    case ErrorKind::kMissingPassage: return "MissingPassage";
    case ErrorKind::kTimeout: return "Timeout";
    case ErrorKind::kThresholdAboveCap: return "ThresholdAboveCap";
    case ErrorKind::kDanglingReference: return "DanglingReference";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
  }
  return "Error";
}

}  // namespace sgsm
