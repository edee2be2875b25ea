// Copyright 2026 The locos authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "locos/error.hpp"

namespace locos {

const char* error_class_name(ErrorClass cls) {
  switch (cls) {
    case ErrorClass::Usage:
      return "usage";
    case ErrorClass::Parameter:
      return "parameter";
    case ErrorClass::Format:
      return "format";
    case ErrorClass::Protocol:
      return "protocol";
    case ErrorClass::Data:
      return "data";
    case ErrorClass::Io:
      return "io";
  }
  return "unknown";
}

}  // namespace locos
