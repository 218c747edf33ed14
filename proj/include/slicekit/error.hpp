// Copyright 2026 The slicekit Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace slicekit {

// Base class for every error raised by the toolkit. The CLI maps
// ValidationError to exit code 1 and everything else to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: out-of-range configuration, missing required option.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed JSON or a document that does not follow the expected schema.
class ParseError : public Error {
 public:
  using Error::Error;
};

// Dangling image_id / category_id or duplicate ids.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

// Zero or negative area box.
class GeometryError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// A detector backend failed for one request. The pipeline may skip the
// patch unless running in strict mode.
class DetectorError : public Error {
 public:
  using Error::Error;
};

// The external detector broke the wire protocol or died. Never skipped.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace slicekit
