#include "shufflecast/sim.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace shufflecast {

namespace {

// Unbiased draw from [0, bound) by rejection; distributions from <random> are
// not portable across standard libraries, engines are.
std::uint64_t bounded_draw(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

std::mt19937_64 epoch_rng(std::uint64_t seed, int epoch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(epoch)};
    return std::mt19937_64(seq);
}

Assignment cut_into_batches(std::vector<PointId> points, int k, int epoch) {
    const std::size_t per_batch = points.size() / static_cast<std::size_t>(k);
    Assignment a;
    a.epoch = epoch;
    a.batches.resize(k);
    for (int w = 0; w < k; ++w) {
        auto first = points.begin() + static_cast<std::ptrdiff_t>(per_batch * w);
        a.batches[w].assign(first, first + static_cast<std::ptrdiff_t>(per_batch));
        std::sort(a.batches[w].begin(), a.batches[w].end());
    }
    return a;
}

void check_partition_args(std::int64_t n_points, int k_workers) {
    if (k_workers < 2) throw InputError("need at least two workers");
    if (n_points < k_workers) throw InputError("need at least one point per worker");
    if (n_points % k_workers != 0) {
        throw InputError("N=" + std::to_string(n_points) + " is not divisible by K=" +
                         std::to_string(k_workers));
    }
}

void check_sigma(const std::vector<int>& sigma, int k) {
    if (static_cast<int>(sigma.size()) != k) {
        throw InputError("sigma must list all " + std::to_string(k) + " workers");
    }
    std::vector<bool> seen(k, false);
    for (int w : sigma) {
        if (w < 0 || w >= k || seen[w]) throw InputError("sigma is not a permutation of the workers");
        seen[w] = true;
    }
}

std::vector<int> identity_sigma(int k) {
    std::vector<int> sigma(k);
    std::iota(sigma.begin(), sigma.end(), 0);
    return sigma;
}

Assignment rotate_batches(const Assignment& prev, const std::vector<int>& sigma) {
    const int k = prev.workers();
    Assignment next;
    next.epoch = prev.epoch + 1;
    next.batches.resize(k);
    for (int i = 0; i < k; ++i) {
        next.batches[sigma[(i + 1) % k]] = prev.batches[sigma[i]];
    }
    return next;
}

}  // namespace

Assignment random_assignment(std::int64_t n_points, int k_workers, std::uint64_t seed,
                             int epoch) {
    check_partition_args(n_points, k_workers);
    std::vector<PointId> points(static_cast<std::size_t>(n_points));
    std::iota(points.begin(), points.end(), PointId{0});
    auto rng = epoch_rng(seed, epoch);
    // Fisher-Yates
    for (std::size_t i = points.size() - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(bounded_draw(rng, i + 1));
        std::swap(points[i], points[j]);
    }
    return cut_into_batches(std::move(points), k_workers, epoch);
}

ShufflePair worst_case_pair(std::int64_t n_points, int k_workers, const std::vector<int>& sigma) {
    check_partition_args(n_points, k_workers);
    const std::vector<int> order = sigma.empty() ? identity_sigma(k_workers) : sigma;
    check_sigma(order, k_workers);

    std::vector<PointId> points(static_cast<std::size_t>(n_points));
    std::iota(points.begin(), points.end(), PointId{0});
    ShufflePair pair;
    pair.prev = cut_into_batches(std::move(points), k_workers, 0);
    pair.next = rotate_batches(pair.prev, order);
    return pair;
}

std::vector<EpochMetrics> run_simulation(const SimConfig& cfg, const Dataset& data) {
    if (cfg.shuffle_kind == ShuffleKind::FromFile) {
        if (cfg.scripted.size() < 2) {
            throw InputError("scripted shuffle needs at least two assignments");
        }
    } else if (cfg.epochs < 1) {
        throw InputError("need at least one epoch");
    }
    check_partition_args(cfg.n_points, cfg.k_workers);
    if (data.n_points() != static_cast<std::size_t>(cfg.n_points)) {
        throw InputError("dataset size does not match the configured N");
    }
    if (data.block_size() != cfg.block_size_bytes) {
        throw InputError("dataset block size does not match the configured d");
    }
    const std::vector<int> order = cfg.sigma.empty() ? identity_sigma(cfg.k_workers) : cfg.sigma;
    if (cfg.shuffle_kind == ShuffleKind::WorstCaseCyclic) check_sigma(order, cfg.k_workers);

    const int epochs = cfg.shuffle_kind == ShuffleKind::FromFile
                           ? static_cast<int>(cfg.scripted.size()) - 1
                           : cfg.epochs;

    auto assignment_for = [&](int epoch, const Assignment* prev) -> Assignment {
        switch (cfg.shuffle_kind) {
            case ShuffleKind::Random:
                return random_assignment(cfg.n_points, cfg.k_workers, cfg.seed, epoch);
            case ShuffleKind::WorstCaseCyclic: {
                if (epoch == 0) {
                    std::vector<PointId> points(static_cast<std::size_t>(cfg.n_points));
                    std::iota(points.begin(), points.end(), PointId{0});
                    return cut_into_batches(std::move(points), cfg.k_workers, 0);
                }
                return rotate_batches(*prev, order);
            }
            case ShuffleKind::FromFile: {
                Assignment a = cfg.scripted[static_cast<std::size_t>(epoch)];
                a.epoch = epoch;
                return a;
            }
        }
        throw InputError("unknown shuffle kind");
    };

    Assignment current = assignment_for(0, nullptr);
    {
        const CheckReport r = validate_assignment(current, data.n_points());
        if (!r.all_ok()) throw InputError("epoch 0 assignment invalid: " + r.summary());
    }

    // Initial distribution: every worker caches its epoch-0 batch.
    std::vector<BlockMap> caches(cfg.k_workers);
    for (int w = 0; w < cfg.k_workers; ++w) {
        for (PointId id : current.batches[w]) {
            const auto block = data.block(id);
            caches[w].emplace(id, Block(block.begin(), block.end()));
        }
    }

    std::vector<EpochMetrics> metrics;
    metrics.reserve(static_cast<std::size_t>(epochs));
    for (int t = 1; t <= epochs; ++t) {
        ShufflePair pair;
        pair.prev = std::move(current);
        pair.next = assignment_for(t, &pair.prev);

        const ShuffleMatrix s = compute_shuffle_matrix(pair);
        const LeftoverMatrix omega = compute_leftover_matrix(s);
        const LowerBoundMode mode =
            cfg.k_workers <= cfg.exact_lb_limit ? LowerBoundMode::Exact : LowerBoundMode::Greedy;
        const RateReport rates = make_rate_report(s, omega, mode, cfg.exact_lb_limit);

        const TransmissionPlan plan = encode(pair, data);

        EpochMetrics row;
        row.epoch = t;
        row.rate_points = static_cast<std::int64_t>(plan.rate_points());
        row.uncoded = rates.uncoded;
        row.coded_bound = rates.coded_bound;
        row.lower_bound = rates.lower_bound;
        row.lower_bound_exact = rates.lower_bound_exact;
        row.ignored_worker = plan.ignored_worker;

        if (row.rate_points != rates.coded_bound) {
            throw std::logic_error("epoch " + std::to_string(t) + ": plan has " +
                                   std::to_string(row.rate_points) + " symbols but the bound is " +
                                   std::to_string(rates.coded_bound));
        }
        if (cfg.shuffle_kind == ShuffleKind::WorstCaseCyclic) {
            const std::int64_t ceiling = (cfg.n_points / cfg.k_workers) * (cfg.k_workers - 1);
            if (row.rate_points != ceiling) {
                throw std::logic_error("worst-case epoch " + std::to_string(t) + " rate " +
                                       std::to_string(row.rate_points) + " != " +
                                       std::to_string(ceiling));
            }
        }

        int max_depth = 0;
        for (int w = 0; w < cfg.k_workers; ++w) {
            // decode_worker throws DecodeError if anything stays unresolved.
            const DecodeResult decoded = decode_worker(plan, w, caches[w], pair);
            for (const auto& [id, block] : decoded.recovered) {
                const auto want = data.block(id);
                if (!std::equal(block.begin(), block.end(), want.begin(), want.end())) {
                    throw DecodeError("epoch " + std::to_string(t) + ": worker w" +
                                          std::to_string(w + 1) + " recovered point " +
                                          std::to_string(id) + " with wrong bytes",
                                      {id});
                }
            }
            max_depth = std::max(max_depth, decoded.max_depth());
            caches[w] = update_cache(caches[w], decoded, pair, w);

            auto it = caches[w].begin();
            for (PointId id : pair.next.batches[w]) {
                if (it == caches[w].end() || it->first != id) {
                    throw std::logic_error("cache of w" + std::to_string(w + 1) +
                                           " diverged from its batch after epoch " +
                                           std::to_string(t));
                }
                ++it;
            }
        }
        row.decode_ok = true;
        row.max_chain_depth = max_depth;
        metrics.push_back(row);

        current = std::move(pair.next);
    }
    return metrics;
}

}  // namespace shufflecast
