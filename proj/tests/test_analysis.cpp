#include <doctest.h>

#include <limits>
#include <set>
#include <unordered_set>
#include <vector>

#include "fixtures.hpp"
#include "shufflecast/analysis.hpp"

using namespace shufflecast;

TEST_SUITE_BEGIN("analysis");

namespace {

ShuffleMatrix matrix_from_rows(std::int64_t n_over_k,
                               const std::vector<std::vector<std::int64_t>>& rows) {
    ShuffleMatrix s;
    s.k = static_cast<int>(rows.size());
    s.n_over_k = n_over_k;
    for (const auto& row : rows) {
        s.cells.insert(s.cells.end(), row.begin(), row.end());
    }
    return s;
}

// Independent of the sorted-merge path used by the library.
std::int64_t intersection_oracle(const std::vector<PointId>& a, const std::vector<PointId>& b) {
    const std::unordered_set<PointId> lookup(a.begin(), a.end());
    std::int64_t hits = 0;
    for (PointId id : b) {
        if (lookup.count(id)) ++hits;
    }
    return hits;
}

// Recursive enumeration, structurally separate from the library's
// next_permutation loop.
void ordering_oracle_rec(const ShuffleMatrix& s, std::vector<int>& prefix, std::set<int>& left,
                         std::int64_t value, std::int64_t& best) {
    if (left.empty()) {
        best = std::max(best, value);
        return;
    }
    const std::set<int> remaining = left;
    for (int w : remaining) {
        std::int64_t gain = 0;
        for (int placed : prefix) gain += s.at(placed, w);
        prefix.push_back(w);
        left.erase(w);
        ordering_oracle_rec(s, prefix, left, value + gain, best);
        left.insert(w);
        prefix.pop_back();
    }
}

std::int64_t ordering_oracle(const ShuffleMatrix& s) {
    std::vector<int> prefix;
    std::set<int> left;
    for (int w = 0; w < s.k; ++w) left.insert(w);
    std::int64_t best = std::numeric_limits<std::int64_t>::min();
    ordering_oracle_rec(s, prefix, left, 0, best);
    return best;
}

}  // namespace

TEST_CASE("example shuffle produces the expected matrices and rates") {
    const ShufflePair pair = fixtures::example1();
    const ShuffleMatrix s = compute_shuffle_matrix(pair);

    const ShuffleMatrix want_s = matrix_from_rows(5, {{2, 1, 2}, {2, 1, 2}, {1, 3, 1}});
    CHECK(s.cells == want_s.cells);
    CHECK(s.n_over_k == 5);

    const LeftoverMatrix omega = compute_leftover_matrix(s);
    const std::vector<std::int64_t> want_omega{0, 0, 1, 1, 0, 0, 0, 1, 0};
    CHECK(omega.cells == want_omega);

    CHECK(uncoded_rate(s) == 11);
    CHECK(phase1_symbol_count(s) == 4);

    const CodedRateBound coded = coded_rate_bound(s, omega);
    CHECK(coded.bound == 6);
    CHECK(coded.ignored_worker == 0);  // all rows tie at 1, lowest index wins
    CHECK(phase2_symbol_count(omega, coded.ignored_worker) == 2);

    CHECK(verify_conservation(s, omega).all_ok());
}

TEST_CASE("identity shuffle yields a diagonal matrix and zero rates") {
    const ShufflePair pair = fixtures::identity_pair(15, 3);
    const ShuffleMatrix s = compute_shuffle_matrix(pair);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CHECK(s.at(i, j) == (i == j ? 5 : 0));
        }
    }
    const LeftoverMatrix omega = compute_leftover_matrix(s);
    CHECK(uncoded_rate(s) == 0);
    CHECK(coded_rate_bound(s, omega).bound == 0);
    CHECK(permutation_lower_bound(s, LowerBoundMode::Exact).bound == 0);
}

TEST_CASE("compute_shuffle_matrix rejects mismatched pairs") {
    ShufflePair pair = fixtures::example1();
    pair.next.batches.pop_back();
    CHECK_THROWS_AS(compute_shuffle_matrix(pair), InputError);
}

TEST_CASE("leftover arithmetic follows the entrywise definition") {
    SUBCASE("asymmetric 2x2") {
        const ShuffleMatrix s = matrix_from_rows(2, {{0, 2}, {1, 1}});
        const LeftoverMatrix omega = compute_leftover_matrix(s);
        CHECK(omega.cells == std::vector<std::int64_t>{0, 1, 0, 0});
    }
    SUBCASE("symmetric matrix cancels exactly") {
        const ShuffleMatrix s = matrix_from_rows(4, {{2, 1, 1}, {1, 2, 1}, {1, 1, 2}});
        const LeftoverMatrix omega = compute_leftover_matrix(s);
        CHECK(omega.total() == 0);
    }
}

TEST_CASE("shuffle matrix fuzz against a direct set-intersection oracle") {
    fixtures::for_each_fuzz_pair(3, [](const ShufflePair& pair, std::int64_t n, int k) {
        const ShuffleMatrix s = compute_shuffle_matrix(pair);
        REQUIRE(s.n_over_k == n / k);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < k; ++j) {
                REQUIRE(s.at(i, j) ==
                        intersection_oracle(pair.prev.batches[i], pair.next.batches[j]));
            }
        }
        const LeftoverMatrix omega = compute_leftover_matrix(s);
        REQUIRE(verify_conservation(s, omega).all_ok());
    });
}

TEST_CASE("conservation checker catches a corrupted matrix") {
    const ShufflePair pair = fixtures::example1();
    ShuffleMatrix s = compute_shuffle_matrix(pair);
    s.at(0, 1) += 1;
    const CheckReport r = verify_conservation(s, compute_leftover_matrix(s));
    CHECK_FALSE(r.all_ok());
    CHECK_FALSE(r.find("row-sums")->ok);
    CHECK(r.find("row-sums")->detail.find("w1") != std::string::npos);
    CHECK_FALSE(r.find("col-sums")->ok);
}

TEST_CASE("uncoded rate on the generated worst-case pair counts every point") {
    // The cyclic rotation moves all N points, so the plain rate is N itself.
    const ShufflePair pair = worst_case_pair(15, 3, {});
    const ShuffleMatrix s = compute_shuffle_matrix(pair);
    CHECK(uncoded_rate(s) == 15);
}

TEST_CASE("uncoded rate is plain off-diagonal arithmetic") {
    // Open-chain pattern (no wraparound entry): K-1 blocks of N/K.
    const ShuffleMatrix s = matrix_from_rows(5, {{0, 5, 0}, {0, 0, 5}, {0, 0, 0}});
    CHECK(uncoded_rate(s) == 10);
}

TEST_CASE("coded rate bound on the worst-case pattern hits (K-1)N/K") {
    const ShufflePair pair = worst_case_pair(8, 4, {});
    const ShuffleMatrix s = compute_shuffle_matrix(pair);
    const LeftoverMatrix omega = compute_leftover_matrix(s);
    CHECK(coded_rate_bound(s, omega).bound == 6);
}

TEST_CASE("ignored worker tie-break picks the lowest index of the largest row") {
    LeftoverMatrix omega;
    omega.k = 3;
    omega.cells = {0, 0, 0, 0, 0, 2, 2, 0, 0};
    const ShuffleMatrix s = matrix_from_rows(4, {{2, 1, 1}, {1, 1, 2}, {1, 2, 1}});
    // rows sum to 0, 2, 2 -> worker index 1
    CHECK(coded_rate_bound(s, omega).ignored_worker == 1);
}

TEST_CASE("exact permutation lower bound on the example shuffle") {
    const ShuffleMatrix s = compute_shuffle_matrix(fixtures::example1());
    const LowerBoundResult lb = permutation_lower_bound(s, LowerBoundMode::Exact);
    CHECK(lb.bound == 6);
    CHECK(lb.exact);
    CHECK(lb.sigma == std::vector<int>{0, 2, 1});  // smallest of the maximizers
    CHECK(ordering_oracle(s) == 6);
}

TEST_CASE("exact lower bound on the worst-case pair follows the generating cycle") {
    const ShuffleMatrix s = compute_shuffle_matrix(worst_case_pair(15, 3, {}));
    const LowerBoundResult lb = permutation_lower_bound(s, LowerBoundMode::Exact);
    CHECK(lb.bound == 10);
    CHECK(lb.sigma == std::vector<int>{0, 1, 2});
    CHECK(ordering_oracle(s) == 10);
}

TEST_CASE("exact mode refuses K above the limit") {
    const ShuffleMatrix s = compute_shuffle_matrix(fixtures::random_pair(18, 9, 1));
    CHECK_THROWS_AS(permutation_lower_bound(s, LowerBoundMode::Exact, 8), InputError);
    CHECK_NOTHROW(permutation_lower_bound(s, LowerBoundMode::Greedy, 8));
    CHECK_NOTHROW(permutation_lower_bound(s, LowerBoundMode::Exact, 9));
}

TEST_CASE("exact bound matches the recursive oracle and dominates greedy") {
    fixtures::for_each_fuzz_pair(1, [](const ShufflePair& pair, std::int64_t, int k) {
        if (k > 7) return;
        const ShuffleMatrix s = compute_shuffle_matrix(pair);
        const LowerBoundResult exact = permutation_lower_bound(s, LowerBoundMode::Exact);
        const LowerBoundResult greedy = permutation_lower_bound(s, LowerBoundMode::Greedy);
        REQUIRE(exact.exact);
        REQUIRE_FALSE(greedy.exact);
        REQUIRE(exact.bound == ordering_oracle(s));
        REQUIRE(greedy.bound <= exact.bound);
    });
}

TEST_CASE("rate report ties the quantities together") {
    fixtures::for_each_fuzz_pair(2, [](const ShufflePair& pair, std::int64_t, int k) {
        const ShuffleMatrix s = compute_shuffle_matrix(pair);
        const LeftoverMatrix omega = compute_leftover_matrix(s);
        const RateReport r = make_rate_report(s, omega, LowerBoundMode::Exact);
        REQUIRE(r.proposed_total == r.phase1 + r.phase2);
        REQUIRE(r.proposed_total == r.coded_bound);
        REQUIRE(r.lower_bound <= r.proposed_total);
        REQUIRE(r.proposed_total <= r.uncoded);
        REQUIRE(r.lower_bound_exact);
        REQUIRE(static_cast<int>(r.best_sigma.size()) == k);
    });
}

TEST_SUITE_END();
