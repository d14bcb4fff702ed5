// Copyright 2026 The ttfsnet Authors
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

#ifndef TTFS_ERROR_H_
#define TTFS_ERROR_H_

#include <stdexcept>
#include <string>

namespace ttfs {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shapes or sizes do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An input value is outside its admissible range.
class DomainError : public Error {
 public:
  using Error::Error;
};

// An iterative solver exhausted its iteration budget.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Slope-at-threshold B_i <= 0: the spike time of the neuron is undefined.
class InvalidSlopeError : public Error {
 public:
  using Error::Error;
};

// A ReLU layer cannot be represented with the requested alpha policy.
class InfeasibleMappingError : public Error {
 public:
  using Error::Error;
};

// An operation was called under the wrong alpha policy.
class PolicyError : public Error {
 public:
  using Error::Error;
};

// A file does not match its expected on-disk format.
class FormatError : public Error {
 public:
  using Error::Error;
};

// An experiment configuration is invalid or inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ttfs

#endif  // TTFS_ERROR_H_
