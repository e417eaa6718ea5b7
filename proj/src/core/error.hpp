/*
 * Copyright 2026 The SEL Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SEL_CORE_ERROR_HPP
#define SEL_CORE_ERROR_HPP

#include <stdexcept>
#include <string>

namespace sel {

// Mirrors sel_status in the public C header (offset by SEL_OK).
enum class ErrorCode {
    config = 1,
    parse = 2,
    ordering = 3,
    bounds = 4,
    gap = 5,
    numeric = 6,
    history = 7,
    undefined_metric = 8,
    io = 9,
    internal = 10,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string &message) {
    throw Error(code, message);
}

} // namespace sel

#endif
