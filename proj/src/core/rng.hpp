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

#ifndef SEL_CORE_RNG_HPP
#define SEL_CORE_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace sel {

// Named random streams derived from one master seed. A stream's sequence
// depends only on (seed, name), so any part of a run can be replayed
// without threading generator state through the whole schedule.
class RngStream {
public:
    RngStream() : engine_(0) {}
    RngStream(std::uint64_t master_seed, std::string_view name);

    std::mt19937_64 &engine() { return engine_; }

    double uniform(double lo, double hi);
    bool bernoulli(double p);
    int poisson(double mean);
    // Fisher-Yates order of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

    std::string serialize_state() const;
    void restore_state(const std::string &state);

private:
    std::mt19937_64 engine_;
};

// SplitMix64; used to turn (seed, name hash) into stream seeds.
std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_name(std::string_view name);

} // namespace sel

#endif
