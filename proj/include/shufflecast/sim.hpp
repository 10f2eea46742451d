#pragma once

#include <cstdint>
#include <vector>

#include "shufflecast/codec.hpp"

namespace shufflecast {

enum class ShuffleKind { Random, WorstCaseCyclic, FromFile };

struct SimConfig {
    int k_workers = 0;
    std::int64_t n_points = 0;
    std::size_t block_size_bytes = 64;
    int epochs = 1;
    std::uint64_t seed = 0;
    ShuffleKind shuffle_kind = ShuffleKind::Random;

    /// Worst-case rotation order (0-based); empty means identity order.
    std::vector<int> sigma;

    /// FromFile: one assignment per epoch starting at epoch 0; epochs is then
    /// scripted.size() - 1.
    std::vector<Assignment> scripted;

    /// Exact permutation search is used up to this K, greedy above.
    int exact_lb_limit = 8;
};

struct EpochMetrics {
    int epoch = 0;
    std::int64_t rate_points = 0;
    std::int64_t uncoded = 0;
    std::int64_t coded_bound = 0;
    std::int64_t lower_bound = 0;
    bool lower_bound_exact = false;
    int ignored_worker = 0;
    bool decode_ok = false;
    int max_chain_depth = 0;

    friend bool operator==(const EpochMetrics&, const EpochMetrics&) = default;
};

/// Uniformly random equal-size partition: a seeded permutation of [0, N) cut
/// into K consecutive blocks. Deterministic in (seed, epoch) on every
/// platform.
Assignment random_assignment(std::int64_t n_points, int k_workers, std::uint64_t seed, int epoch);

/// The cyclic batch rotation along sigma: worker sigma[i+1] takes over
/// sigma[i]'s entire batch (wrapping), which forces the maximal rate
/// (K-1)N/K.
ShufflePair worst_case_pair(std::int64_t n_points, int k_workers, const std::vector<int>& sigma);

/// Runs encode/broadcast/decode/update for each epoch, verifying byte-exact
/// recovery at all K workers against the dataset. Throws DecodeError on any
/// recovery failure; emitted rows always carry decode_ok = true.
std::vector<EpochMetrics> run_simulation(const SimConfig& cfg, const Dataset& data);

}  // namespace shufflecast
