#include <catch2/catch_amalgamated.hpp>

#include <tdes/design.hpp>
#include <tdes/generators.hpp>

#include <algorithm>
#include <random>

using namespace tdes;

namespace {

Design fano() {
    Design d;
    d.v = 7;
    d.k = 3;
    d.blocks = {{0, 1, 2}, {0, 3, 4}, {0, 5, 6}, {1, 3, 5}, {1, 4, 6}, {2, 3, 6}, {2, 4, 5}};
    canonicalize(d);
    return d;
}

}  // namespace

TEST_CASE("canonicalize is idempotent and order-independent") {
    Design d = complete_design(7, 3);
    std::mt19937 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        Design shuffled = d;
        std::shuffle(shuffled.blocks.begin(), shuffled.blocks.end(), rng);
        for (auto& b : shuffled.blocks) std::shuffle(b.begin(), b.end(), rng);
        canonicalize(shuffled);
        REQUIRE(shuffled.blocks == d.blocks);
        canonicalize(shuffled);
        REQUIRE(shuffled.blocks == d.blocks);
    }
}

TEST_CASE("canonicalize returns the block permutation") {
    Design d;
    d.v = 5;
    d.k = 2;
    d.blocks = {{3, 4}, {0, 1}, {1, 2}};
    auto perm = canonicalize(d);
    REQUIRE(d.blocks == std::vector<std::vector<int>>{{0, 1}, {1, 2}, {3, 4}});
    CHECK(perm[0] == 2);  // {3,4} moved last
    CHECK(perm[1] == 0);
    CHECK(perm[2] == 1);
}

TEST_CASE("canonicalize validates blocks") {
    Design bad;
    bad.v = 4;
    bad.k = 2;
    bad.blocks = {{0, 0}};
    CHECK_THROWS_AS(canonicalize(bad), contract_error);
    Design bad2;
    bad2.v = 4;
    bad2.k = 2;
    bad2.blocks = {{0, 4}};
    CHECK_THROWS_AS(canonicalize(bad2), contract_error);
}

TEST_CASE("is_simple") {
    Design d = complete_design(6, 3);
    CHECK(is_simple(d));
    Design doubled = d;
    doubled.blocks.insert(doubled.blocks.end(), d.blocks.begin(), d.blocks.end());
    canonicalize(doubled);
    CHECK_FALSE(is_simple(doubled));
}

TEST_CASE("class_distance") {
    CHECK(class_distance(1, 16, 17) == 2);
    CHECK(class_distance(3, 3, 9) == 0);
    CHECK(class_distance(1, 4, 5) == 2);
    CHECK_THROWS_AS(class_distance(0, 1, 5), contract_error);
    CHECK_THROWS_AS(class_distance(1, 6, 5), contract_error);
    for (long long n = 1; n <= 9; ++n)
        for (long long h = 1; h <= n; ++h)
            for (long long j = 1; j <= n; ++j) {
                REQUIRE(class_distance(h, j, n) == class_distance(j, h, n));
                REQUIRE(class_distance(h, j, n) <= n / 2);
                REQUIRE((class_distance(h, j, n) == 0) == (h == j));
            }
}

TEST_CASE("complement_design on the Fano plane") {
    Design comp = complement_design(fano());
    CHECK(comp.k == 4);
    VerifyReport rep = verify_t_design(comp, 2);
    REQUIRE(rep.ok);
    CHECK(rep.lambda == 2);
    // involution
    Design back = complement_design(comp);
    CHECK(back.blocks == fano().blocks);
}

TEST_CASE("complement of a complete design is complete") {
    Design d = complete_design(8, 3);
    Design comp = complement_design(d);
    CHECK(comp.blocks == complete_design(8, 5).blocks);
}

TEST_CASE("verify_t_design on complete designs matches lambda_max") {
    for (int v = 2; v <= 14; v += 3) {
        for (int k = 1; k <= 7 && k <= v; k += 2) {
            Design d = complete_design(v, k);
            for (int t = 0; t <= k; t += 2) {
                VerifyReport rep = verify_t_design(d, t);
                REQUIRE(rep.ok);
                REQUIRE(rep.lambda == lambda_max(t, k, v));
            }
        }
    }
}

TEST_CASE("verify_t_design subset and sweep paths agree") {
    Design d = complete_design(10, 4);
    VerifyOptions sub, sweep;
    sub.force_path = 1;
    sweep.force_path = 2;
    for (int t = 1; t <= 3; ++t) {
        VerifyReport a = verify_t_design(d, t, sub);
        VerifyReport b = verify_t_design(d, t, sweep);
        REQUIRE(a.ok);
        REQUIRE(b.ok);
        REQUIRE(a.lambda == b.lambda);
    }
    // non-design: both paths find a witness with the same counts profile
    Design broken = d;
    broken.blocks.erase(broken.blocks.begin() + 5);
    VerifyReport a = verify_t_design(broken, 2, sub);
    VerifyReport b = verify_t_design(broken, 2, sweep);
    CHECK_FALSE(a.ok);
    CHECK_FALSE(b.ok);
}

TEST_CASE("verify_t_design reports a witness after deleting one block") {
    Design d = fano();
    d.blocks.pop_back();
    VerifyReport rep = verify_t_design(d, 2);
    REQUIRE_FALSE(rep.ok);
    CHECK(rep.witness.size() == 2);
    CHECK(rep.witness_count != rep.expected);
}

TEST_CASE("verify_t_design refuses above budget") {
    Design d = complete_design(12, 5);
    VerifyOptions opts;
    opts.budget = 10;
    CHECK_THROWS_AS(verify_t_design(d, 3, opts), budget_error);
}

TEST_CASE("verify_t_design sweep is deterministic across worker counts") {
    Design d = complete_design(12, 5);
    d.blocks.erase(d.blocks.begin() + 100);
    VerifyOptions base;
    base.workers = 1;
    base.force_path = 2;
    VerifyReport ref = verify_t_design(d, 3, base);
    REQUIRE_FALSE(ref.ok);
    for (int workers : {2, 4}) {
        VerifyOptions opts;
        opts.workers = workers;
        opts.force_path = 2;
        VerifyReport rep = verify_t_design(d, 3, opts);
        REQUIRE_FALSE(rep.ok);
        REQUIRE(rep.witness == ref.witness);
        REQUIRE(rep.witness_count == ref.witness_count);
    }
}

TEST_CASE("verify_resolution accepts a 1-factorization and rejects tampering") {
    Resolution r = round_robin_one_factorization(6);
    ResolutionReport rep = verify_resolution(r);
    REQUIRE(rep.ok);
    CHECK(rep.s == 1);
    CHECK(rep.tau == 1);
    CHECK(r.classes.size() == 5);

    // swapping two blocks between classes breaks per-class regularity
    Resolution bad = r;
    std::swap(bad.classes[0][0], bad.classes[1][0]);
    ResolutionReport brep = verify_resolution(bad);
    REQUIRE_FALSE(brep.ok);
    CHECK(brep.issue == ResolutionIssue::class_not_design);

    // dropping an index breaks the partition
    Resolution part = r;
    part.classes[2].pop_back();
    CHECK(verify_resolution(part).issue == ResolutionIssue::not_partition);

    // moving a block makes class sizes unequal
    Resolution uneq = r;
    uneq.classes[0].push_back(uneq.classes[1].back());
    uneq.classes[1].pop_back();
    ResolutionReport urep = verify_resolution(uneq);
    REQUIRE_FALSE(urep.ok);
}

TEST_CASE("verified resolutions survive cyclic class rotation") {
    Resolution r = round_robin_one_factorization(8);
    for (int shift : {1, 3, 6}) {
        Resolution rot = r;
        std::rotate(rot.classes.begin(), rot.classes.begin() + shift, rot.classes.end());
        ResolutionReport rep = verify_resolution(rot);
        REQUIRE(rep.ok);
        REQUIRE(rep.tau == 1);
    }
}

TEST_CASE("resolution class count matches the derived formula") {
    // N = lambda_t * C(v-s, t-s) / (tau * C(k-s, t-s)) for the complete design
    Resolution r = round_robin_one_factorization(10);
    Int n = Int(r.classes.size());
    Int expect = lambda_max(1, 2, 10) * binomial(9, 0) / (r.tau * binomial(1, 0));
    CHECK(n == expect);
}
