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

// Self-describing binary checkpoint: versioned JSON header (architecture,
// training position, embedded config, tensor directory with explicit
// (post, pre, k) index order) followed by raw little-endian weights.
// Writing is byte-deterministic for a given model.

#ifndef SEL_CORE_CHECKPOINT_HPP
#define SEL_CORE_CHECKPOINT_HPP

#include "model.hpp"

#include <filesystem>

namespace sel {

void save_checkpoint(const Model &model, const std::filesystem::path &path);
Model load_checkpoint(const std::filesystem::path &path);

} // namespace sel

#endif
