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

// Brute-force verification of the core claim: the learned drive Q
// converges to the empirical conditional rate n_o/n of the supervision
// for each observed context. Oracles count occurrences directly and
// never touch the learned weights.

#ifndef SEL_CORE_ORACLE_HPP
#define SEL_CORE_ORACLE_HPP

#include "event.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sel {

// Exact-match occurrence counts per quantized context pattern.
class ContextCounter {
public:
    using Key = std::vector<int>;

    void observe(const Key &pattern, double supervision_strength);

    // n_o / n for the pattern; undefined when it never occurred.
    double rate(const Key &pattern) const;
    std::int64_t occurrences(const Key &pattern) const;

private:
    struct Counts {
        std::int64_t n = 0;
        double n_o = 0.0;
    };
    std::map<Key, Counts> counts_;
};

double empirical_conditional_rate(
    const std::vector<std::pair<ContextCounter::Key, double>> &trace,
    const ContextCounter::Key &pattern);

struct BernoulliResult {
    double learned_q = 0.0;  // mean drive over the trailing 20% of steps
    double final_q = 0.0;
    double oracle_rate = 0.0; // n_o/n counted on the same stream
    double gap = 0.0;         // |learned_q - oracle_rate|
    double tail_stddev = 0.0; // drive fluctuation over the trailing 20%
    long steps_run = 0;
    long converged_at = -1;   // first step the trailing-mean test passed
    std::vector<double> trajectory;
};

// Smallest instance of the scheme: one always-spiking context neuron and
// Bernoulli(p) supervision, trained with the real u/d rules on a single
// delayed weight. noise_m > 0 adds Poisson noise spikes to the
// supervision; the reported learned_q then has the baseline subtracted
// and the oracle still counts the clean stream.
BernoulliResult run_bernoulli_benchmark(double p, long steps, double eps,
                                        std::uint64_t seed,
                                        double noise_m = 0.0,
                                        bool early_stop = false,
                                        double q0 = 0.0);

struct ContextOutcome {
    std::string context;
    double oracle_rate = 0.0;
    double learned_q = 0.0;
    double gap = 0.0;
};

struct TwoContextReport {
    std::vector<ContextOutcome> outcomes;
    long steps_run = 0;
};

// Two context patterns alternating at random, each with its own
// supervision rate. `overlap` makes the patterns share one active neuron
// so the learned estimates interfere through the shared weight.
TwoContextReport run_two_context_benchmark(double p_a, double p_b,
                                           long steps, double eps,
                                           std::uint64_t seed,
                                           bool overlap = false);

} // namespace sel

#endif
