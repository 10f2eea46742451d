#include "shufflecast/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace shufflecast {

std::int64_t LeftoverMatrix::row_sum(int i) const {
    std::int64_t sum = 0;
    for (int j = 0; j < k; ++j) sum += at(i, j);
    return sum;
}

std::int64_t LeftoverMatrix::total() const {
    return std::accumulate(cells.begin(), cells.end(), std::int64_t{0});
}

ShuffleMatrix compute_shuffle_matrix(const ShufflePair& pair) {
    validate_pair(pair);
    const int k = pair.prev.workers();
    ShuffleMatrix s;
    s.k = k;
    s.n_over_k = static_cast<std::int64_t>(pair.prev.total_points()) / k;
    s.cells.assign(static_cast<std::size_t>(k) * k, 0);
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            s.at(i, j) = static_cast<std::int64_t>(
                sorted_intersection(pair.prev.batches[i], pair.next.batches[j]).size());
        }
    }
    return s;
}

LeftoverMatrix compute_leftover_matrix(const ShuffleMatrix& s) {
    LeftoverMatrix omega;
    omega.k = s.k;
    omega.cells.assign(s.cells.size(), 0);
    for (int i = 0; i < s.k; ++i) {
        for (int j = 0; j < s.k; ++j) {
            omega.at(i, j) = s.at(i, j) - std::min(s.at(i, j), s.at(j, i));
        }
    }
    return omega;
}

std::int64_t uncoded_rate(const ShuffleMatrix& s) {
    std::int64_t sum = 0;
    for (int i = 0; i < s.k; ++i) {
        for (int j = 0; j < s.k; ++j) {
            if (i != j) sum += s.at(i, j);
        }
    }
    return sum;
}

std::int64_t phase1_symbol_count(const ShuffleMatrix& s) {
    std::int64_t sum = 0;
    for (int i = 0; i < s.k; ++i) {
        for (int j = i + 1; j < s.k; ++j) {
            sum += std::min(s.at(i, j), s.at(j, i));
        }
    }
    return sum;
}

std::int64_t phase2_symbol_count(const LeftoverMatrix& omega, int ignored) {
    return omega.total() - omega.row_sum(ignored);
}

CodedRateBound coded_rate_bound(const ShuffleMatrix& s, const LeftoverMatrix& omega) {
    std::int64_t pairwise_max = 0;
    for (int i = 0; i < s.k; ++i) {
        for (int j = i + 1; j < s.k; ++j) {
            pairwise_max += std::max(s.at(i, j), s.at(j, i));
        }
    }
    CodedRateBound result;
    std::int64_t best_row = omega.row_sum(0);
    result.ignored_worker = 0;
    for (int i = 1; i < omega.k; ++i) {
        const std::int64_t row = omega.row_sum(i);
        if (row > best_row) {  // ties keep the lowest index
            best_row = row;
            result.ignored_worker = i;
        }
    }
    result.bound = pairwise_max - best_row;
    return result;
}

namespace {

std::int64_t ordering_value(const ShuffleMatrix& s, const std::vector<int>& sigma) {
    std::int64_t sum = 0;
    for (std::size_t i = 0; i < sigma.size(); ++i) {
        for (std::size_t j = i + 1; j < sigma.size(); ++j) {
            sum += s.at(sigma[i], sigma[j]);
        }
    }
    return sum;
}

LowerBoundResult exact_lower_bound(const ShuffleMatrix& s) {
    std::vector<int> sigma(s.k);
    std::iota(sigma.begin(), sigma.end(), 0);
    LowerBoundResult best{ordering_value(s, sigma), sigma, true};
    // Lexicographic enumeration with strict improvement keeps the
    // lexicographically smallest maximizer.
    while (std::next_permutation(sigma.begin(), sigma.end())) {
        const std::int64_t value = ordering_value(s, sigma);
        if (value > best.bound) {
            best.bound = value;
            best.sigma = sigma;
        }
    }
    return best;
}

LowerBoundResult greedy_lower_bound(const ShuffleMatrix& s) {
    std::vector<int> order;
    order.reserve(s.k);
    for (int w = 0; w < s.k; ++w) {
        std::size_t best_pos = 0;
        std::int64_t best_value = std::numeric_limits<std::int64_t>::min();
        for (std::size_t pos = 0; pos <= order.size(); ++pos) {
            std::vector<int> candidate = order;
            candidate.insert(candidate.begin() + static_cast<std::ptrdiff_t>(pos), w);
            const std::int64_t value = ordering_value(s, candidate);
            if (value > best_value) {
                best_value = value;
                best_pos = pos;
            }
        }
        order.insert(order.begin() + static_cast<std::ptrdiff_t>(best_pos), w);
    }

    std::int64_t value = ordering_value(s, order);
    bool improved = true;
    while (improved) {
        improved = false;
        for (std::size_t i = 0; i < order.size(); ++i) {
            for (std::size_t j = i + 1; j < order.size(); ++j) {
                std::swap(order[i], order[j]);
                const std::int64_t swapped = ordering_value(s, order);
                if (swapped > value) {
                    value = swapped;
                    improved = true;
                } else {
                    std::swap(order[i], order[j]);
                }
            }
        }
    }
    return {value, order, false};
}

}  // namespace

LowerBoundResult permutation_lower_bound(const ShuffleMatrix& s, LowerBoundMode mode,
                                         int exact_k_limit) {
    if (s.k < 1) throw InputError("lower bound needs at least one worker");
    if (mode == LowerBoundMode::Exact) {
        if (s.k > exact_k_limit) {
            throw InputError("exact permutation search refused for K=" + std::to_string(s.k) +
                             " > limit " + std::to_string(exact_k_limit) +
                             " (use greedy mode or raise the limit)");
        }
        return exact_lower_bound(s);
    }
    return greedy_lower_bound(s);
}

CheckReport verify_conservation(const ShuffleMatrix& s, const LeftoverMatrix& omega) {
    CheckReport report;

    bool rows_ok = true, cols_ok = true;
    std::string row_detail, col_detail;
    for (int i = 0; i < s.k; ++i) {
        std::int64_t row = 0, col = 0;
        for (int j = 0; j < s.k; ++j) {
            row += s.at(i, j);
            col += s.at(j, i);
        }
        if (row != s.n_over_k && rows_ok) {
            rows_ok = false;
            row_detail = "row w" + std::to_string(i + 1) + " sums to " + std::to_string(row) +
                         ", expected " + std::to_string(s.n_over_k);
        }
        if (col != s.n_over_k && cols_ok) {
            cols_ok = false;
            col_detail = "column w" + std::to_string(i + 1) + " sums to " + std::to_string(col) +
                         ", expected " + std::to_string(s.n_over_k);
        }
    }
    report.add("row-sums", rows_ok, row_detail);
    report.add("col-sums", cols_ok, col_detail);

    bool flow_ok = true;
    std::string flow_detail;
    for (int i = 0; i < s.k && flow_ok; ++i) {
        std::int64_t in = 0, out = 0;
        for (int j = 0; j < s.k; ++j) {
            if (j == i) continue;
            in += s.at(j, i);
            out += s.at(i, j);
        }
        if (in != out) {
            flow_ok = false;
            flow_detail = "w" + std::to_string(i + 1) + " receives " + std::to_string(in) +
                          " but sends " + std::to_string(out);
        }
    }
    report.add("flow-conservation", flow_ok, flow_detail);

    bool leftover_ok = true;
    std::string leftover_detail;
    for (int i = 0; i < omega.k && leftover_ok; ++i) {
        std::int64_t in = 0, out = 0;
        for (int j = 0; j < omega.k; ++j) {
            if (j == i) continue;
            in += omega.at(j, i);
            out += omega.at(i, j);
        }
        if (in != out) {
            leftover_ok = false;
            leftover_detail = "w" + std::to_string(i + 1) + " leftover in " + std::to_string(in) +
                              " != out " + std::to_string(out);
        }
    }
    report.add("leftover-conservation", leftover_ok, leftover_detail);

    bool diag_ok = true;
    std::string diag_detail;
    for (int i = 0; i < omega.k; ++i) {
        if (omega.at(i, i) != 0) {
            diag_ok = false;
            diag_detail = "leftover diagonal at w" + std::to_string(i + 1) + " is " +
                          std::to_string(omega.at(i, i));
            break;
        }
    }
    report.add("leftover-diagonal", diag_ok, diag_detail);

    bool min_ok = true;
    std::string min_detail;
    for (int i = 0; i < omega.k && min_ok; ++i) {
        for (int j = i + 1; j < omega.k; ++j) {
            if (std::min(omega.at(i, j), omega.at(j, i)) != 0) {
                min_ok = false;
                min_detail = "both leftover directions nonzero for pair (w" +
                             std::to_string(i + 1) + ", w" + std::to_string(j + 1) + ")";
                break;
            }
        }
    }
    report.add("leftover-pair-min", min_ok, min_detail);

    return report;
}

RateReport make_rate_report(const ShuffleMatrix& s, const LeftoverMatrix& omega,
                            LowerBoundMode mode, int exact_k_limit) {
    RateReport r;
    r.uncoded = uncoded_rate(s);
    const CodedRateBound coded = coded_rate_bound(s, omega);
    r.coded_bound = coded.bound;
    r.ignored_worker = coded.ignored_worker;
    r.phase1 = phase1_symbol_count(s);
    r.phase2 = phase2_symbol_count(omega, coded.ignored_worker);
    r.proposed_total = r.phase1 + r.phase2;
    const LowerBoundResult lb = permutation_lower_bound(s, mode, exact_k_limit);
    r.lower_bound = lb.bound;
    r.lower_bound_exact = lb.exact;
    r.best_sigma = lb.sigma;
    return r;
}

}  // namespace shufflecast
