/*
 * Copyright 2026 The bregrank authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#ifndef BREGRANK_ERRORS_HPP_
#define BREGRANK_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace bregrank {

/// Base class of every error the library throws.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A point lies outside the domain of the active convex potential.
class DomainViolation : public Error {
 public:
  using Error::Error;
};

/// Cone coordinates or ordering preconditions were not met.
class ConeViolation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// Sign-change bracketing failed during a halfspace projection.
class BracketFailure : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

class EmptyDataset : public Error {
 public:
  using Error::Error;
};

}  // namespace bregrank

#endif  // BREGRANK_ERRORS_HPP_
