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

#pragma once

#include <stdexcept>
#include <string>

namespace locos {

// Error classes are stable identifiers; the CLI prints them as the first
// machine-parseable token of its single-line error output.
enum class ErrorClass {
  Usage,      // bad command line
  Parameter,  // value outside its documented range
  Format,     // malformed file contents
  Protocol,   // inconsistent protocol definition
  Data,       // numerically unusable input (zero norm, NaN, shape mismatch)
  Io,         // filesystem failure
};

const char* error_class_name(ErrorClass cls);

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& message)
      : std::runtime_error(message), cls_(cls) {}

  ErrorClass cls() const { return cls_; }

 private:
  ErrorClass cls_;
};

[[noreturn]] inline void throw_parameter(const std::string& msg) {
  throw Error(ErrorClass::Parameter, msg);
}
[[noreturn]] inline void throw_format(const std::string& msg) {
  throw Error(ErrorClass::Format, msg);
}
[[noreturn]] inline void throw_protocol(const std::string& msg) {
  throw Error(ErrorClass::Protocol, msg);
}
[[noreturn]] inline void throw_data(const std::string& msg) {
  throw Error(ErrorClass::Data, msg);
}
[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorClass::Io, msg);
}

}  // namespace locos
