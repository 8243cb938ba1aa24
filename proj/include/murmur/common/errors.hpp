// Copyright 2026 The Murmur Authors
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

namespace murmur {

// Root of every error thrown by the library. The CLI maps subclasses onto
// process exit codes (see cli/app.hpp).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MURMUR_DEFINE_ERROR(Name)        \
  class Name : public Error {            \
   public:                               \
    using Error::Error;                  \
  }

MURMUR_DEFINE_ERROR(ArgumentError);
MURMUR_DEFINE_ERROR(FormatError);
MURMUR_DEFINE_ERROR(UnsupportedFormatError);
MURMUR_DEFINE_ERROR(IoError);
MURMUR_DEFINE_ERROR(DegenerateInputError);
MURMUR_DEFINE_ERROR(InfeasibleAlignmentError);
MURMUR_DEFINE_ERROR(AlignmentRequiredError);
MURMUR_DEFINE_ERROR(NumericError);
MURMUR_DEFINE_ERROR(UsageError);
MURMUR_DEFINE_ERROR(ParseError);
MURMUR_DEFINE_ERROR(ValidationError);
MURMUR_DEFINE_ERROR(ConfigurationError);
MURMUR_DEFINE_ERROR(InfeasibleSplitError);
MURMUR_DEFINE_ERROR(UndefinedMetricError);
MURMUR_DEFINE_ERROR(DependencyError);

#undef MURMUR_DEFINE_ERROR

}  // namespace murmur
