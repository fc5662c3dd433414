// Copyright 2026 The expmech Authors
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
//

#ifndef EXPMECH_ERROR_H_
#define EXPMECH_ERROR_H_

#include <stdexcept>
#include <string>

namespace expmech {

// Malformed or out-of-domain input. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// An instance exceeds a documented size cap (range size, matrix order, ...).
class CapExceeded : public InputError {
 public:
  explicit CapExceeded(const std::string& what) : InputError(what) {}
};

// A numerical routine could not produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace expmech

#endif  // EXPMECH_ERROR_H_
