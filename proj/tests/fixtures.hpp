#pragma once

// Shared test fixtures: hand-built shuffles with known matrices and a seeded
// random-pair builder.

#include <vector>

#include "shufflecast/core.hpp"
#include "shufflecast/sim.hpp"

namespace fixtures {

using shufflecast::Assignment;
using shufflecast::PointId;
using shufflecast::ShufflePair;

inline Assignment assignment(int epoch, std::vector<std::vector<PointId>> batches) {
    Assignment a;
    a.epoch = epoch;
    a.batches = std::move(batches);
    return a;
}

// K=3, N=15 pair with shuffle matrix [[2,1,2],[2,1,2],[1,3,1]] and leftover
// matrix [[0,0,1],[1,0,0],[0,1,0]]: uncoded 11, phase1 4, phase2 2, total 6.
inline ShufflePair example1() {
    return {assignment(0, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, {10, 11, 12, 13, 14}}),
            assignment(1, {{0, 1, 5, 6, 10}, {2, 7, 11, 12, 13}, {3, 4, 8, 9, 14}})};
}

// K=3, N=6 pair whose leftovers form the single cycle
// w1 -> w2 (point 1), w2 -> w3 (point 3), w3 -> w1 (point 4),
// with no order-2 opportunities at all.
inline ShufflePair leftover_cycle() {
    return {assignment(0, {{0, 1}, {2, 3}, {4, 5}}),
            assignment(1, {{0, 4}, {1, 2}, {3, 5}})};
}

inline ShufflePair identity_pair(std::int64_t n, int k) {
    Assignment prev = shufflecast::random_assignment(n, k, 42, 0);
    Assignment next = prev;
    next.epoch = 1;
    return {std::move(prev), std::move(next)};
}

inline ShufflePair random_pair(std::int64_t n, int k, std::uint64_t seed) {
    return {shufflecast::random_assignment(n, k, seed, 0),
            shufflecast::random_assignment(n, k, seed, 1)};
}

// The fuzz ensemble used across suites: every K in [2,8], every N/K in [1,8].
template <typename Fn>
void for_each_fuzz_pair(int seeds_per_shape, Fn&& fn) {
    for (int k = 2; k <= 8; ++k) {
        for (int per_worker = 1; per_worker <= 8; ++per_worker) {
            const std::int64_t n = static_cast<std::int64_t>(k) * per_worker;
            for (int seed = 0; seed < seeds_per_shape; ++seed) {
                fn(random_pair(n, k, static_cast<std::uint64_t>(seed) * 1000 + k * 10 +
                                          per_worker),
                   n, k);
            }
        }
    }
}

}  // namespace fixtures
