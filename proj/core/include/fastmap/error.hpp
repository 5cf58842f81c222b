// Copyright 2026 The FastMap Authors
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

#include <stdexcept>
#include <string>

namespace fastmap {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// A metric point falls outside the scene/grid range.
struct RangeError : Error {
  using Error::Error;
};

/// A grid cell or gather index is out of bounds.
struct IndexError : Error {
  using Error::Error;
};

/// Array dimensions do not satisfy an operation's contract.
struct ShapeError : Error {
  using Error::Error;
};

/// Zero-length polyline, zero-length segment, or similar degenerate input.
struct DegenerateGeometryError : Error {
  using Error::Error;
};

/// Cross-attention was invoked with an empty prior set.
struct EmptyPriorError : Error {
  using Error::Error;
};

}  // namespace fastmap
