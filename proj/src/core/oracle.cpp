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

#include "oracle.hpp"

#include "error.hpp"
#include "learn.hpp"
#include "net.hpp"
#include "rng.hpp"

#include <cmath>
#include <numeric>

namespace sel {

void ContextCounter::observe(const Key &pattern,
                             double supervision_strength) {
    Counts &c = counts_[pattern];
    c.n += 1;
    c.n_o += supervision_strength;
}

double ContextCounter::rate(const Key &pattern) const {
    auto it = counts_.find(pattern);
    if (it == counts_.end() || it->second.n == 0)
        fail(ErrorCode::undefined_metric,
             "context pattern never occurred; rate undefined");
    return it->second.n_o / static_cast<double>(it->second.n);
}

std::int64_t ContextCounter::occurrences(const Key &pattern) const {
    auto it = counts_.find(pattern);
    return it == counts_.end() ? 0 : it->second.n;
}

double empirical_conditional_rate(
    const std::vector<std::pair<ContextCounter::Key, double>> &trace,
    const ContextCounter::Key &pattern) {
    ContextCounter counter;
    for (const auto &[key, o] : trace) counter.observe(key, o);
    return counter.rate(pattern);
}

namespace {

double mean(const std::vector<double> &v, std::size_t from, std::size_t to) {
    if (to <= from) return 0.0;
    return std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(from),
                           v.begin() + static_cast<std::ptrdiff_t>(to), 0.0) /
           static_cast<double>(to - from);
}

double stddev(const std::vector<double> &v, std::size_t from,
              std::size_t to) {
    if (to <= from + 1) return 0.0;
    const double m = mean(v, from, to);
    double acc = 0.0;
    for (std::size_t i = from; i < to; ++i)
        acc += (v[i] - m) * (v[i] - m);
    return std::sqrt(acc / static_cast<double>(to - from - 1));
}

constexpr long kConvergenceStride = 1000;
constexpr double kConvergenceDelta = 1e-4;

} // namespace

BernoulliResult run_bernoulli_benchmark(double p, long steps, double eps,
                                        std::uint64_t seed, double noise_m,
                                        bool early_stop, double q0) {
    if (!(p > 0.0 && p < 1.0))
        fail(ErrorCode::config, "supervision rate p must lie in (0,1)");
    if (steps < 1) fail(ErrorCode::config, "step count must be >= 1");
    if (!(eps > 0.0)) fail(ErrorCode::config, "eps must be positive");

    RngStream supervision_rng(seed, "oracle/bernoulli/supervision");
    RngStream noise_rng(seed, "oracle/bernoulli/noise");

    DelayedWeightTensor w(1, 1, 1);
    w.at(0, 0, 1) = q0;

    HistoryWindow window(1);
    ContextCounter counter;
    const ContextCounter::Key context{1};

    BernoulliResult result;
    result.trajectory.reserve(static_cast<std::size_t>(steps));

    for (long t = 0; t < steps; ++t) {
        TimestepFrame frame(t, 1);
        frame.values[0] = 1.0;
        window.push(std::move(frame));

        const auto q = compute_drive(w, window);
        const double o_clean =
            supervision_rng.bernoulli(p) ? 1.0 : 0.0;
        const double o_total =
            o_clean + static_cast<double>(noise_rng.poisson(noise_m));
        counter.observe(context, o_clean);

        // u before d, both with the pre-update drive.
        const double o_arr[1] = {o_total};
        apply_u(w, window, std::span<const double>(o_arr, 1), eps);
        apply_d(w, window, q, eps);

        result.trajectory.push_back(w.at(0, 0, 1));
        result.steps_run = t + 1;

        const long n = t + 1;
        if (result.converged_at < 0 && n >= 2 * kConvergenceStride &&
            n % kConvergenceStride == 0) {
            const std::size_t sz = result.trajectory.size();
            const double recent = mean(result.trajectory,
                                       sz - kConvergenceStride, sz);
            const double prior =
                mean(result.trajectory, sz - 2 * kConvergenceStride,
                     sz - kConvergenceStride);
            if (std::abs(recent - prior) < kConvergenceDelta) {
                result.converged_at = n;
                if (early_stop) break;
            }
        }
    }

    const std::size_t sz = result.trajectory.size();
    const std::size_t tail_from = sz - std::max<std::size_t>(sz / 5, 1);
    const double tail_mean = mean(result.trajectory, tail_from, sz);
    result.tail_stddev = stddev(result.trajectory, tail_from, sz);
    result.final_q = result.trajectory.back();
    result.learned_q = noise_m > 0.0
                           ? subtract_noise_baseline(tail_mean, noise_m)
                           : tail_mean;
    result.oracle_rate = counter.rate(context);
    result.gap = std::abs(result.learned_q - result.oracle_rate);
    return result;
}

TwoContextReport run_two_context_benchmark(double p_a, double p_b,
                                           long steps, double eps,
                                           std::uint64_t seed, bool overlap) {
    if (!(p_a > 0.0 && p_a < 1.0) || !(p_b > 0.0 && p_b < 1.0))
        fail(ErrorCode::config, "supervision rates must lie in (0,1)");
    if (steps < 1) fail(ErrorCode::config, "step count must be >= 1");

    const int n_pre = overlap ? 3 : 2;
    // Disjoint: A = {neuron 0}, B = {neuron 1}.
    // Overlapping: A = {0,1}, B = {1,2}; neuron 1 is shared.
    const std::vector<int> pattern_a =
        overlap ? std::vector<int>{1, 1, 0} : std::vector<int>{1, 0};
    const std::vector<int> pattern_b =
        overlap ? std::vector<int>{0, 1, 1} : std::vector<int>{0, 1};

    RngStream pick_rng(seed, "oracle/two-context/pick");
    RngStream supervision_rng(seed, "oracle/two-context/supervision");

    DelayedWeightTensor w(1, n_pre, 1);
    HistoryWindow window(1);
    ContextCounter counter;

    std::vector<double> tail_a, tail_b;
    const long tail_start = steps - std::max(steps / 5, 1L);

    for (long t = 0; t < steps; ++t) {
        const bool is_a = pick_rng.bernoulli(0.5);
        const std::vector<int> &pattern = is_a ? pattern_a : pattern_b;

        TimestepFrame frame(t, static_cast<std::size_t>(n_pre));
        for (int i = 0; i < n_pre; ++i)
            frame.values[static_cast<std::size_t>(i)] =
                static_cast<double>(pattern[static_cast<std::size_t>(i)]);
        window.push(std::move(frame));

        const auto q = compute_drive(w, window);
        const double o =
            supervision_rng.bernoulli(is_a ? p_a : p_b) ? 1.0 : 0.0;
        counter.observe(pattern, o);

        const double o_arr[1] = {o};
        apply_u(w, window, std::span<const double>(o_arr, 1), eps);
        apply_d(w, window, q, eps);

        if (t >= tail_start) (is_a ? tail_a : tail_b).push_back(q[0]);
    }

    auto tail_mean = [](const std::vector<double> &v) {
        if (v.empty())
            fail(ErrorCode::undefined_metric,
                 "context never occurred in the trailing window");
        return std::accumulate(v.begin(), v.end(), 0.0) /
               static_cast<double>(v.size());
    };

    TwoContextReport report;
    report.steps_run = steps;
    for (const auto &[name, pattern, tail] :
         {std::tuple{"A", pattern_a, tail_a},
          std::tuple{"B", pattern_b, tail_b}}) {
        ContextOutcome out;
        out.context = name;
        out.oracle_rate = counter.rate(pattern);
        out.learned_q = tail_mean(tail);
        out.gap = std::abs(out.learned_q - out.oracle_rate);
        report.outcomes.push_back(std::move(out));
    }
    return report;
}

} // namespace sel
