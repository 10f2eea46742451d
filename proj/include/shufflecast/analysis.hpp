#pragma once

#include <cstdint>
#include <vector>

#include "shufflecast/core.hpp"

namespace shufflecast {

// ============================================================================
// Shuffle and leftover matrices
// ============================================================================

/// K x K counts: s[i][j] = number of points worker i holds at epoch t that
/// worker j needs at epoch t+1. For a valid shuffle every row and column sums
/// to N/K, and at every worker the off-diagonal row and column sums agree
/// (what flows in equals what flows out).
struct ShuffleMatrix {
    int k = 0;
    std::int64_t n_over_k = 0;
    std::vector<std::int64_t> cells;  // row-major, k*k

    std::int64_t at(int i, int j) const { return cells[static_cast<std::size_t>(i) * k + j]; }
    std::int64_t& at(int i, int j) { return cells[static_cast<std::size_t>(i) * k + j]; }
};

/// Residual demands after pairwise cancellation:
/// omega[i][j] = s[i][j] - min(s[i][j], s[j][i]). Zero diagonal, at most one
/// nonzero per unordered pair, and the same flow conservation as S.
struct LeftoverMatrix {
    int k = 0;
    std::vector<std::int64_t> cells;

    std::int64_t at(int i, int j) const { return cells[static_cast<std::size_t>(i) * k + j]; }
    std::int64_t& at(int i, int j) { return cells[static_cast<std::size_t>(i) * k + j]; }

    std::int64_t row_sum(int i) const;
    std::int64_t total() const;
};

/// Throws InputError if the pair is structurally invalid.
ShuffleMatrix compute_shuffle_matrix(const ShufflePair& pair);

/// Pure entrywise arithmetic; does not re-validate the input matrix.
LeftoverMatrix compute_leftover_matrix(const ShuffleMatrix& s);

// ============================================================================
// Rates
// ============================================================================

/// Off-diagonal sum: symbols needed if every moved point were sent plain.
std::int64_t uncoded_rate(const ShuffleMatrix& s);

/// Order-2 symbol count: sum over unordered pairs of min(s[i][j], s[j][i]).
std::int64_t phase1_symbol_count(const ShuffleMatrix& s);

/// Chain symbol count with worker `ignored` left out: total leftovers minus
/// the ignored worker's outgoing row.
std::int64_t phase2_symbol_count(const LeftoverMatrix& omega, int ignored);

struct CodedRateBound {
    std::int64_t bound = 0;
    int ignored_worker = 0;  // lowest index among rows of omega with maximal sum
};

/// Symbol count of the two-phase scheme with the best choice of ignored
/// worker: sum over pairs of max(s[i][j], s[j][i]) minus the largest leftover
/// row sum.
CodedRateBound coded_rate_bound(const ShuffleMatrix& s, const LeftoverMatrix& omega);

enum class LowerBoundMode { Exact, Greedy };

struct LowerBoundResult {
    std::int64_t bound = 0;
    std::vector<int> sigma;
    bool exact = false;
};

/// Maximizes sum_{i<j} s[sigma_i][sigma_j] over worker orderings (a linear
/// ordering problem). Exact mode enumerates all K! orders and returns the
/// lexicographically smallest maximizer; it refuses K above exact_k_limit.
/// Greedy mode runs best-insertion construction plus pairwise-swap local
/// search and reports exact=false.
LowerBoundResult permutation_lower_bound(const ShuffleMatrix& s, LowerBoundMode mode,
                                         int exact_k_limit = 8);

/// Itemized pass/fail for row sums, column sums, flow conservation, leftover
/// conservation, zero leftover diagonal, and pairwise-min-zero leftovers.
CheckReport verify_conservation(const ShuffleMatrix& s, const LeftoverMatrix& omega);

// ============================================================================
// Combined report
// ============================================================================

struct RateReport {
    std::int64_t uncoded = 0;
    std::int64_t phase1 = 0;
    std::int64_t phase2 = 0;
    std::int64_t proposed_total = 0;  // phase1 + phase2, equals coded_bound
    std::int64_t coded_bound = 0;
    std::int64_t lower_bound = 0;
    bool lower_bound_exact = false;
    std::vector<int> best_sigma;
    int ignored_worker = 0;
};

RateReport make_rate_report(const ShuffleMatrix& s, const LeftoverMatrix& omega,
                            LowerBoundMode mode, int exact_k_limit = 8);

}  // namespace shufflecast
