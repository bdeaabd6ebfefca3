// Copyright 2026 The Abacus Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace abacus {

/// Base class of every error thrown by this library. `fail_class()` groups
/// errors into coarse categories that the CLI maps to distinct exit codes.
class Error : public std::runtime_error {
 public:
  enum class FailClass { usage, data, io, endpoint, internal };

  Error(FailClass fc, const std::string& what) : std::runtime_error(what), fail_class_(fc) {}
  FailClass fail_class() const { return fail_class_; }

 private:
  FailClass fail_class_;
};

#define ABACUS_DEFINE_ERROR(Name, Class)                        \
  class Name : public Error {                                   \
   public:                                                      \
    explicit Name(const std::string& what)                      \
        : Error(Error::FailClass::Class, #Name ": " + what) {}  \
  }

// Numerals and arithmetic.
ABACUS_DEFINE_ERROR(NotANumeralError, data);
ABACUS_DEFINE_ERROR(ZeroDenominatorError, data);
ABACUS_DEFINE_ERROR(NotAnIntegerError, data);
ABACUS_DEFINE_ERROR(DivisionByZeroError, data);

// Solution and expression parsing.
ABACUS_DEFINE_ERROR(ExprParseError, data);
ABACUS_DEFINE_ERROR(MissingFinalAnswerError, data);
ABACUS_DEFINE_ERROR(MalformedAnnotationError, data);
ABACUS_DEFINE_ERROR(UnparsableFinalError, data);

// Generation.
ABACUS_DEFINE_ERROR(SinkFailureError, io);
ABACUS_DEFINE_ERROR(ExhaustedRetriesError, data);

// Perturbation.
ABACUS_DEFINE_ERROR(NoRootError, data);
ABACUS_DEFINE_ERROR(ConstraintViolatedError, data);

// Scoring.
ABACUS_DEFINE_ERROR(EmptyInputError, usage);
ABACUS_DEFINE_ERROR(TooFewExemplarsError, usage);
ABACUS_DEFINE_ERROR(ShapeMismatchError, usage);
ABACUS_DEFINE_ERROR(NTooLargeError, usage);

// Inference client.
ABACUS_DEFINE_ERROR(EndpointUnreachableError, endpoint);
ABACUS_DEFINE_ERROR(ProtocolError, endpoint);
ABACUS_DEFINE_ERROR(AuthError, endpoint);

// Config and I/O plumbing.
ABACUS_DEFINE_ERROR(ConfigError, usage);
ABACUS_DEFINE_ERROR(IoError, io);
ABACUS_DEFINE_ERROR(DataFormatError, data);
ABACUS_DEFINE_ERROR(InternalError, internal);

#undef ABACUS_DEFINE_ERROR

}  // namespace abacus
