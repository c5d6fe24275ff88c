// Copyright 2026 The voxdesk Authors
// SPDX-License-Identifier: Apache-2.0
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

namespace voxdesk {

// All library failures derive from Error so callers can map them to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error { using Error::Error; };
class ConfigError : public Error { using Error::Error; };
class ShapeError : public Error { using Error::Error; };
class StateError : public Error { using Error::Error; };
class PreconditionError : public Error { using Error::Error; };
class EmptyInputError : public Error { using Error::Error; };
class TooShortError : public Error { using Error::Error; };
class DegenerateError : public Error { using Error::Error; };
class ModelError : public Error { using Error::Error; };
class DivergenceError : public Error { using Error::Error; };
class FormatError : public Error { using Error::Error; };
class VersionError : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

}  // namespace voxdesk
