#include "shufflecast/codec.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace shufflecast {

namespace {

void check_dataset_matches(const ShufflePair& pair, const Dataset& data) {
    if (data.n_points() != pair.prev.total_points()) {
        throw InputError("dataset holds " + std::to_string(data.n_points()) +
                         " points but the shuffle covers " +
                         std::to_string(pair.prev.total_points()));
    }
}

}  // namespace

Phase1Result encode_phase1(const ShufflePair& pair, const Dataset& data) {
    validate_pair(pair);
    check_dataset_matches(pair, data);

    Phase1Result result;
    const int k = pair.prev.workers();
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            // fwd: points i holds that j needs; rev: points j holds that i needs.
            const auto fwd = sorted_intersection(pair.prev.batches[i], pair.next.batches[j]);
            const auto rev = sorted_intersection(pair.prev.batches[j], pair.next.batches[i]);
            const std::size_t matched = std::min(fwd.size(), rev.size());
            for (std::size_t t = 0; t < matched; ++t) {
                result.symbols.push_back(make_symbol(SymbolKind::Order2, fwd[t], rev[t], data));
            }
            for (std::size_t t = matched; t < fwd.size(); ++t) {
                result.residual_edges.push_back({i, j, fwd[t]});
            }
            for (std::size_t t = matched; t < rev.size(); ++t) {
                result.residual_edges.push_back({j, i, rev[t]});
            }
        }
    }
    return result;
}

std::optional<LeftoverEdge> PairingTable::successor(const LeftoverEdge& e) const {
    if (e.dst == ignored_worker) return std::nullopt;
    for (const Match& m : matches[e.dst]) {
        if (m.incoming == e) return m.outgoing;
    }
    throw std::logic_error("edge is not matched at worker w" + std::to_string(e.dst + 1));
}

PairingTable build_pairing(const std::vector<LeftoverEdge>& residual_edges, int ignored_worker,
                           int k_workers) {
    if (ignored_worker < 0 || ignored_worker >= k_workers) {
        throw InputError("ignored worker index out of range");
    }

    std::vector<std::vector<LeftoverEdge>> incoming(k_workers), outgoing(k_workers);
    for (const LeftoverEdge& e : residual_edges) {
        if (e.src < 0 || e.src >= k_workers || e.dst < 0 || e.dst >= k_workers || e.src == e.dst) {
            throw std::logic_error("malformed leftover edge");
        }
        incoming[e.dst].push_back(e);
        outgoing[e.src].push_back(e);
    }

    PairingTable table;
    table.k_workers = k_workers;
    table.ignored_worker = ignored_worker;
    table.matches.resize(k_workers);

    // succ keyed by the incoming edge's point; leftover points are unique, one
    // edge each.
    std::unordered_map<PointId, LeftoverEdge> succ;

    for (int w = 0; w < k_workers; ++w) {
        if (w == ignored_worker) continue;
        auto& in = incoming[w];
        auto& out = outgoing[w];
        if (in.size() != out.size()) {
            throw std::logic_error("leftover conservation violated at worker w" +
                                   std::to_string(w + 1) + ": " + std::to_string(in.size()) +
                                   " in vs " + std::to_string(out.size()) + " out");
        }
        std::sort(in.begin(), in.end(), [](const LeftoverEdge& a, const LeftoverEdge& b) {
            return std::tie(a.src, a.point) < std::tie(b.src, b.point);
        });
        std::sort(out.begin(), out.end(), [](const LeftoverEdge& a, const LeftoverEdge& b) {
            return std::tie(a.dst, a.point) < std::tie(b.dst, b.point);
        });
        table.matches[w].reserve(in.size());
        for (std::size_t t = 0; t < in.size(); ++t) {
            table.matches[w].push_back({in[t], out[t]});
            if (!succ.emplace(in[t].point, out[t]).second) {
                throw std::logic_error("duplicate leftover point " + std::to_string(in[t].point));
            }
        }
    }

    // Every chain that starts at an out-edge of the ignored worker must walk
    // through pairings back to one of its in-edges; anything else is a
    // construction bug.
    std::unordered_set<PointId> endings;
    for (const LeftoverEdge& start : outgoing[ignored_worker]) {
        LeftoverEdge cur = start;
        std::size_t hops = 0;
        while (cur.dst != ignored_worker) {
            const auto it = succ.find(cur.point);
            if (it == succ.end()) {
                throw std::logic_error("chain from point " + std::to_string(start.point) +
                                       " broke at point " + std::to_string(cur.point));
            }
            cur = it->second;
            if (++hops > residual_edges.size()) {
                throw std::logic_error("chain from point " + std::to_string(start.point) +
                                       " does not terminate");
            }
        }
        if (!endings.insert(cur.point).second) {
            throw std::logic_error("two chains end at the same in-edge point " +
                                   std::to_string(cur.point));
        }
    }

    return table;
}

std::vector<CodedSymbol> encode_phase2(const PairingTable& pairing, const Dataset& data) {
    std::vector<CodedSymbol> symbols;
    for (int w = 0; w < pairing.k_workers; ++w) {
        for (const PairingTable::Match& m : pairing.matches[w]) {
            symbols.push_back(
                make_symbol(SymbolKind::Chain, m.incoming.point, m.outgoing.point, data, w));
        }
    }
    return symbols;
}

TransmissionPlan encode(const ShufflePair& pair, const Dataset& data) {
    const ShuffleMatrix s = compute_shuffle_matrix(pair);
    const LeftoverMatrix omega = compute_leftover_matrix(s);
    const CodedRateBound coded = coded_rate_bound(s, omega);

    Phase1Result phase1 = encode_phase1(pair, data);
    const PairingTable pairing = build_pairing(phase1.residual_edges, coded.ignored_worker, s.k);

    TransmissionPlan plan;
    plan.phase1 = std::move(phase1.symbols);
    plan.phase2 = encode_phase2(pairing, data);
    plan.ignored_worker = coded.ignored_worker;
    return plan;
}

// ----------------------------------------------------------------------------
// Decoding
// ----------------------------------------------------------------------------

int DecodeResult::max_depth() const {
    int depth = 0;
    for (const auto& [id, d] : steps) depth = std::max(depth, d);
    return depth;
}

namespace {

void check_cache_matches_batch(const BlockMap& cache, const std::vector<PointId>& batch,
                               int worker) {
    bool ok = cache.size() == batch.size();
    if (ok) {
        auto it = cache.begin();
        for (PointId id : batch) {
            if (it->first != id) {
                ok = false;
                break;
            }
            ++it;
        }
    }
    if (!ok) {
        throw InputError("cache of worker w" + std::to_string(worker + 1) +
                         " does not hold its previous batch");
    }
}

}  // namespace

DecodeResult decode_worker(const TransmissionPlan& plan, int worker, const BlockMap& cache,
                           const ShufflePair& pair) {
    if (worker < 0 || worker >= pair.prev.workers()) {
        throw InputError("worker index out of range");
    }
    check_cache_matches_batch(cache, pair.prev.batches[worker], worker);

    const std::vector<PointId> needed_ids =
        sorted_difference(pair.next.batches[worker], pair.prev.batches[worker]);
    const std::set<PointId> needed(needed_ids.begin(), needed_ids.end());

    DecodeResult result;
    result.worker = worker;

    auto take = [&](PointId id, Block block, int depth) {
        if (needed.count(id) && !result.recovered.count(id)) {
            result.steps[id] = depth;
            result.recovered.emplace(id, std::move(block));
        }
    };

    // Order-2 symbols resolve against the cache directly for every worker.
    for (const CodedSymbol& sym : plan.phase1) {
        const auto it_a = cache.find(sym.components[0]);
        const auto it_b = cache.find(sym.components[1]);
        if ((it_a != cache.end()) == (it_b != cache.end())) continue;
        const auto& held = it_a != cache.end() ? *it_a : *it_b;
        const PointId other = it_a != cache.end() ? sym.components[1] : sym.components[0];
        Block block = sym.payload;
        xor_into(block, held.second);
        take(other, std::move(block), 1);
    }

    if (worker != plan.ignored_worker) {
        // Each chain symbol served here pairs a needed point with one of our
        // cached leftovers.
        for (const CodedSymbol& sym : plan.phase2) {
            if (sym.served_worker != worker) continue;
            const auto it_a = cache.find(sym.components[0]);
            const auto it_b = cache.find(sym.components[1]);
            if ((it_a != cache.end()) == (it_b != cache.end())) continue;
            const auto& held = it_a != cache.end() ? *it_a : *it_b;
            const PointId other = it_a != cache.end() ? sym.components[1] : sym.components[0];
            Block block = sym.payload;
            xor_into(block, held.second);
            take(other, std::move(block), 1);
        }
    } else {
        // Peeling fixpoint: cached blocks are known at depth 0; any chain
        // symbol with exactly one known component reveals the other.
        struct Known {
            Block block;
            int depth;
        };
        std::map<PointId, Known> known;
        for (const auto& [id, block] : cache) known.emplace(id, Known{block, 0});

        std::vector<bool> done(plan.phase2.size(), false);
        bool progress = true;
        while (progress) {
            progress = false;
            for (std::size_t i = 0; i < plan.phase2.size(); ++i) {
                if (done[i]) continue;
                const CodedSymbol& sym = plan.phase2[i];
                const auto it_a = known.find(sym.components[0]);
                const auto it_b = known.find(sym.components[1]);
                const bool ka = it_a != known.end();
                const bool kb = it_b != known.end();
                if (ka && kb) {
                    done[i] = true;
                    continue;
                }
                if (!ka && !kb) continue;
                const Known& have = ka ? it_a->second : it_b->second;
                const PointId other = ka ? sym.components[1] : sym.components[0];
                Block block = sym.payload;
                xor_into(block, have.block);
                const int depth = have.depth + 1;
                take(other, block, depth);
                known.emplace(other, Known{std::move(block), depth});
                done[i] = true;
                progress = true;
            }
        }
    }

    std::vector<PointId> missing;
    for (PointId id : needed_ids) {
        if (!result.recovered.count(id)) missing.push_back(id);
    }
    if (!missing.empty()) {
        std::string what = "worker w" + std::to_string(worker + 1) + " could not decode " +
                           std::to_string(missing.size()) + " point(s):";
        for (PointId id : missing) what += " " + std::to_string(id);
        throw DecodeError(what, std::move(missing));
    }
    return result;
}

BlockMap update_cache(const BlockMap& cache, const DecodeResult& decoded, const ShufflePair& pair,
                      int worker) {
    BlockMap next;
    for (PointId id : pair.next.batches[worker]) {
        const auto kept = cache.find(id);
        if (kept != cache.end()) {
            next.emplace(id, kept->second);
            continue;
        }
        const auto got = decoded.recovered.find(id);
        if (got == decoded.recovered.end()) {
            throw DecodeError("cache update for worker w" + std::to_string(worker + 1) +
                                  " misses point " + std::to_string(id),
                              {id});
        }
        next.emplace(id, got->second);
    }
    return next;
}

BlockMap update_cache(const BlockMap& cache, const TransmissionPlan& plan,
                      const ShufflePair& pair, int worker) {
    return update_cache(cache, decode_worker(plan, worker, cache, pair), pair, worker);
}

}  // namespace shufflecast
