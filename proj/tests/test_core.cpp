#include <doctest.h>

#include <random>
#include <sstream>

#include "shufflecast/core.hpp"

using namespace shufflecast;

TEST_SUITE_BEGIN("core");

TEST_CASE("make_dataset is deterministic and sized correctly") {
    const Dataset a = make_dataset(15, 64, 7);
    const Dataset b = make_dataset(15, 64, 7);
    CHECK(a.n_points() == 15);
    CHECK(a.block_size() == 64);
    for (PointId id = 0; id < 15; ++id) {
        const auto ba = a.block(id);
        const auto bb = b.block(id);
        REQUIRE(ba.size() == 64);
        CHECK(std::equal(ba.begin(), ba.end(), bb.begin(), bb.end()));
    }

    const Dataset c = make_dataset(15, 64, 8);
    bool any_diff = false;
    for (PointId id = 0; id < 15 && !any_diff; ++id) {
        const auto ba = a.block(id);
        const auto bc = c.block(id);
        any_diff = !std::equal(ba.begin(), ba.end(), bc.begin(), bc.end());
    }
    CHECK(any_diff);
}

TEST_CASE("make_dataset minimal and error cases") {
    const Dataset d = make_dataset(1, 1, 0);
    CHECK(d.block(0).size() == 1);
    CHECK_THROWS_AS(make_dataset(0, 8, 1), InputError);
    CHECK_THROWS_AS(make_dataset(4, 0, 1), InputError);
    CHECK_THROWS_AS(d.block(1), InputError);
}

TEST_CASE("coded symbols recompose by XOR") {
    const Dataset data = make_dataset(20, 32, 3);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = static_cast<PointId>(rng() % 20);
        auto b = static_cast<PointId>(rng() % 20);
        if (a == b) b = (b + 1) % 20;
        const CodedSymbol sym = make_symbol(SymbolKind::Order2, a, b, data);
        REQUIRE(sym.components[0] < sym.components[1]);

        Block lhs = sym.payload;
        xor_into(lhs, data.block(a));
        const auto want_b = data.block(b);
        CHECK(std::equal(lhs.begin(), lhs.end(), want_b.begin(), want_b.end()));

        Block rhs = sym.payload;
        xor_into(rhs, data.block(b));
        const auto want_a = data.block(a);
        CHECK(std::equal(rhs.begin(), rhs.end(), want_a.begin(), want_a.end()));
    }
    CHECK_THROWS_AS(make_symbol(SymbolKind::Order2, 3, 3, data), InputError);
}

namespace {

Assignment make_assignment(int epoch, std::vector<std::vector<PointId>> batches) {
    Assignment a;
    a.epoch = epoch;
    a.batches = std::move(batches);
    return a;
}

}  // namespace

TEST_CASE("validate_assignment accepts a valid partition") {
    const Assignment a =
        make_assignment(0, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, {10, 11, 12, 13, 14}});
    const CheckReport r = validate_assignment(a, 15);
    CHECK(r.all_ok());
    CHECK(r.items.size() == 3);
}

TEST_CASE("validate_assignment flags overlap, naming the id") {
    const Assignment a = make_assignment(0, {{0, 1}, {1, 2}});
    const CheckReport r = validate_assignment(a, 4);
    CHECK_FALSE(r.all_ok());
    const CheckItem* disjoint = r.find("disjoint");
    REQUIRE(disjoint != nullptr);
    CHECK_FALSE(disjoint->ok);
    CHECK(disjoint->detail.find("point id 1") != std::string::npos);
    // 3 never appears anywhere
    const CheckItem* coverage = r.find("coverage");
    REQUIRE(coverage != nullptr);
    CHECK_FALSE(coverage->ok);
}

TEST_CASE("validate_assignment flags unequal batch sizes") {
    const Assignment a =
        make_assignment(0, {{0, 1, 2, 3}, {4, 5, 6, 7, 8, 9}});
    const CheckReport r = validate_assignment(a, 10);
    const CheckItem* sizes = r.find("batch-sizes");
    REQUIRE(sizes != nullptr);
    CHECK_FALSE(sizes->ok);
    CHECK(r.find("disjoint")->ok);
    CHECK(r.find("coverage")->ok);
}

TEST_CASE("validate_assignment treats N not divisible by K as structural") {
    const Assignment a = make_assignment(0, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8, 9}});
    const CheckReport r = validate_assignment(a, 10);
    CHECK_FALSE(r.find("batch-sizes")->ok);
}

TEST_CASE("validate_assignment flags out-of-range ids") {
    const Assignment a = make_assignment(0, {{0, 1}, {2, 99}});
    const CheckReport r = validate_assignment(a, 4);
    const CheckItem* coverage = r.find("coverage");
    REQUIRE(coverage != nullptr);
    CHECK_FALSE(coverage->ok);
    CHECK(coverage->detail.find("99") != std::string::npos);
}

TEST_CASE("validate_pair rejects mismatched epochs, K and N") {
    const Assignment base = make_assignment(0, {{0, 1}, {2, 3}});
    Assignment next = base;
    next.epoch = 1;
    CHECK_NOTHROW(validate_pair({base, next}));

    Assignment wrong_epoch = base;
    wrong_epoch.epoch = 2;
    CHECK_THROWS_AS(validate_pair({base, wrong_epoch}), InputError);

    const Assignment three = make_assignment(1, {{0}, {1}, {2}});
    CHECK_THROWS_AS(validate_pair({base, three}), InputError);

    const Assignment bigger = make_assignment(1, {{0, 1, 2}, {3, 4, 5}});
    CHECK_THROWS_AS(validate_pair({base, bigger}), InputError);
}

TEST_CASE("assignment text round-trips") {
    const Assignment a =
        make_assignment(0, {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}, {10, 11, 12, 13, 14}});
    std::ostringstream os;
    write_assignment(os, a);
    CHECK(os.str() == "w1: 0,1,2,3,4\nw2: 5,6,7,8,9\nw3: 10,11,12,13,14\n");

    std::istringstream is(os.str());
    const Assignment back = read_assignment(is, 0);
    CHECK(back == a);
}

TEST_CASE("assignment parser skips comments and sorts ids") {
    std::istringstream is(
        "# epoch t\n"
        "\n"
        "w2: 3, 2\n"
        "w1: 1,0\n");
    const Assignment a = read_assignment(is, 5);
    CHECK(a.epoch == 5);
    REQUIRE(a.workers() == 2);
    CHECK(a.batches[0] == std::vector<PointId>{0, 1});
    CHECK(a.batches[1] == std::vector<PointId>{2, 3});
}

TEST_CASE("assignment parser reports line numbers") {
    auto expect_error = [](const std::string& text, const std::string& needle) {
        std::istringstream is(text);
        try {
            read_assignment(is);
            FAIL_CHECK("expected InputError for: " << text);
        } catch (const InputError& e) {
            CHECK(std::string(e.what()).find(needle) != std::string::npos);
        }
    };
    expect_error("w1: 0,1\nbogus\n", "line 2");
    expect_error("w1: 0,x\n", "line 1");
    expect_error("w1 0,1\n", "missing ':'");
    expect_error("w1: 0,1\nw1: 2,3\n", "duplicate line");
    expect_error("w1: 0,1\nw3: 2,3\n", "w2 is missing");
    expect_error("w1: 0,1,\n", "trailing comma");
    expect_error("", "no worker lines");
}

TEST_CASE("plan dump format") {
    const Dataset data = make_dataset(6, 4, 1);
    TransmissionPlan plan;
    plan.phase1.push_back(make_symbol(SymbolKind::Order2, 5, 2, data));
    plan.phase2.push_back(make_symbol(SymbolKind::Chain, 4, 1, data, 1));
    plan.ignored_worker = 2;
    std::ostringstream os;
    write_plan(os, plan);
    CHECK(os.str() == "P1 2^5\nP2@w2 1^4\nIGNORED w3\n");
}

TEST_SUITE_END();
