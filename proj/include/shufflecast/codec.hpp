#pragma once

#include <map>
#include <optional>
#include <vector>

#include "shufflecast/analysis.hpp"
#include "shufflecast/core.hpp"

namespace shufflecast {

// ============================================================================
// Leftover edges and pairing
// ============================================================================

/// A leftover demand surviving phase 1: worker src holds `point`, worker dst
/// needs it. Edge multiplicities per (src, dst) equal the leftover matrix.
struct LeftoverEdge {
    int src = 0;
    int dst = 0;
    PointId point = 0;

    friend bool operator==(const LeftoverEdge&, const LeftoverEdge&) = default;
};

struct Phase1Result {
    std::vector<CodedSymbol> symbols;
    std::vector<LeftoverEdge> residual_edges;
};

/// For every unordered worker pair, XOR-matches min(s[i][j], s[j][i]) points
/// positionally (both sides sorted by id). Unmatched points come back as
/// residual edges.
Phase1Result encode_phase1(const ShufflePair& pair, const Dataset& data);

/// Incoming-to-outgoing edge matching at every non-ignored worker. A chain
/// followed from any out-edge of the ignored worker ends at one of its
/// in-edges; the ignored worker itself creates no matches, so chains cannot
/// pass through it.
struct PairingTable {
    int k_workers = 0;
    int ignored_worker = 0;

    struct Match {
        LeftoverEdge incoming;
        LeftoverEdge outgoing;
    };
    std::vector<std::vector<Match>> matches;  // [worker]; empty at the ignored worker

    /// Out-edge matched to `e` at e.dst; nullopt when e ends at the ignored
    /// worker.
    std::optional<LeftoverEdge> successor(const LeftoverEdge& e) const;
};

/// Sorts each worker's in-edges and out-edges by (counterpart, point id) and
/// matches them positionally. Throws std::logic_error if edge counts are
/// unbalanced at a non-ignored worker or a chain fails to terminate; both
/// signal an encoder bug, not bad user input.
PairingTable build_pairing(const std::vector<LeftoverEdge>& residual_edges, int ignored_worker,
                           int k_workers);

/// One chain symbol per match: incoming point XOR outgoing point, served at
/// the matching worker.
std::vector<CodedSymbol> encode_phase2(const PairingTable& pairing, const Dataset& data);

/// Full two-phase broadcast. The ignored worker is the lowest index with the
/// largest leftover row sum; the plan's symbol count equals the coded rate
/// bound exactly.
TransmissionPlan encode(const ShufflePair& pair, const Dataset& data);

// ============================================================================
// Decoding
// ============================================================================

struct DecodeResult {
    int worker = 0;
    BlockMap recovered;            // exactly next batch minus prev batch
    std::map<PointId, int> steps;  // decode depth per recovered point

    int max_depth() const;
};

/// Reconstructs every point the worker gains in the shuffle, byte-exact.
/// Non-ignored workers decode each symbol directly against their cache. The
/// ignored worker peels: repeatedly resolve chain symbols with exactly one
/// known component until fixpoint. Throws DecodeError (naming the missing
/// points) if the fixpoint leaves required points unknown.
DecodeResult decode_worker(const TransmissionPlan& plan, int worker, const BlockMap& cache,
                           const ShufflePair& pair);

/// Keeps the blocks that stay assigned to the worker, decodes the rest from
/// the plan, and drops everything else. The result holds exactly the next
/// batch.
BlockMap update_cache(const BlockMap& cache, const TransmissionPlan& plan,
                      const ShufflePair& pair, int worker);

/// Same, reusing an existing decode result instead of decoding again.
BlockMap update_cache(const BlockMap& cache, const DecodeResult& decoded,
                      const ShufflePair& pair, int worker);

}  // namespace shufflecast
