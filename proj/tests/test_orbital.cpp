#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>

#include "usp/orbital.hpp"

using namespace usp;

namespace {

std::vector<std::string> sorted_keys(const std::vector<Lattice>& ls) {
    std::vector<std::string> ks;
    for (const auto& l : ls) ks.push_back(l.key());
    std::sort(ks.begin(), ks.end());
    return ks;
}

SymPoint rank1_point(const PrecisionContext& c, const FScalar& a) {
    auto x = lift_from_herm(make_split_space(c, 1), EMatrix::diag_f(c, {a}));
    REQUIRE(x.has_value());
    return *x;
}

}  // namespace

TEST_CASE("group walk reproduces the self-dual enumeration") {
    auto c = make_context(3, 12);
    for (int64_t w = 0; w <= 2; ++w) {
        auto walked = self_dual_walk(c, w);
        CHECK(walked.size() == self_dual_count_rank2(3, w));
        CHECK(sorted_keys(walked) == sorted_keys(self_dual_cache(c, 2, w)));
    }

    auto c5 = make_context(5, 12);
    auto walked = self_dual_walk(c5, 1);
    CHECK(walked.size() == self_dual_count_rank2(5, 1));
    CHECK(sorted_keys(walked) == sorted_keys(self_dual_cache(c5, 2, 1)));
}

TEST_CASE("rank-one counts by hand") {
    auto c = make_context(3, 12);

    auto unit = rank1_point(c, FScalar::from_int(c, 3));
    OrbitCount oc = orbit_count(unit);
    CHECK(oc.count == 1);
    CHECK(oc.saturated);
    CHECK(oracle_orbit_count(unit, oc.window) == 1);

    auto off = rank1_point(c, FScalar::from_ratio(c, 1, 3));
    OrbitCount zero = orbit_count(off);
    CHECK(zero.count == 0);
    CHECK(zero.saturated);
    CHECK(oracle_orbit_count(off, zero.window) == 0);

    CHECK(stable_orbital_rank1(c, FScalar::from_int(c, 3)) == 1);
    CHECK(stable_orbital_rank1(c, FScalar::from_int(c, 10)) == 1);
    CHECK(stable_orbital_rank1(c, FScalar::from_int(c, 2)) == 0);   // odd norm valuation
    CHECK(stable_orbital_rank1(c, FScalar::from_ratio(c, 1, 3)) == 0);

    CHECK(lie_stable_orbital_rank1(c, FScalar::from_int(c, -4)) == 1);
    CHECK(lie_stable_orbital_rank1(c, FScalar::from_int(c, -36)) == 1);
    CHECK(lie_stable_orbital_rank1(c, FScalar::from_int(c, 3)) == 0);
    CHECK(lie_stable_orbital_rank1(c, FScalar::from_ratio(c, -4, 9)) == 0);
}

TEST_CASE("odd-type and empty spaces") {
    auto c = make_context(3, 12);
    auto odd = make_space(c, 1, {1}, {0});
    auto x = lift_from_herm(odd, EMatrix::diag_f(c, {FScalar::from_int(c, 2)}));
    REQUIRE(x.has_value());
    OrbitCount oc = orbit_count(*x);
    CHECK(oc.count == 0);
    CHECK(oc.saturated);
    CHECK(oracle_orbit_count(*x, 1) == 0);

    auto empty = make_split_space(c, 0);
    SymPoint none{empty, EMatrix(c, 0, 0)};
    CHECK(orbit_count(none).count == 1);
    CHECK(oracle_orbit_count(none, 1) == 1);
}

TEST_CASE("matched rank-two classes against the endoscopic prediction") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    auto q = [&](int64_t r1, int64_t r2) {
        return std::make_pair(FScalar::from_int(c, r1), FScalar::from_int(c, r2));
    };

    SUBCASE("unit eigenvalue distance") {
        auto [r1, r2] = q(3, 10);
        ClassCounts cc = class_counts(s, r1, r2);
        REQUIRE(cc.exists);
        CHECK(cc.nice.count == 1);
        CHECK(cc.flipped.count == 0);
        CHECK(cc.kappa() == 1);  // transfer factor +1 times two unit orbitals
    }

    SUBCASE("distance of valuation one") {
        auto [r1, r2] = q(3, 6);
        ClassCounts cc = class_counts(s, r1, r2);
        REQUIRE(cc.exists);
        CHECK(cc.kappa() == -3);  // eta(-3) q^1
        auto nice = nice_rep(s, {r1, r2});
        auto flip = flipped_rep(s, r1, r2);
        CHECK(oracle_orbit_count(*nice, cc.nice.window) == cc.nice.count);
        CHECK(oracle_orbit_count(*flip, cc.flipped.window) == cc.flipped.count);
    }

    SUBCASE("distance of valuation two straddling both fixed points") {
        auto [r1, r2] = q(10, -8);
        ClassCounts cc = class_counts(s, r1, r2);
        REQUIRE(cc.exists);
        CHECK(cc.kappa() == 9);  // eta(18) q^2
        auto nice = nice_rep(s, {r1, r2});
        CHECK(oracle_orbit_count(*nice, cc.nice.window) == cc.nice.count);
    }

    SUBCASE("parity-obstructed class contributes zero to both sides") {
        auto [r1, r2] = q(2, 10);
        ClassCounts cc = class_counts(s, r1, r2);
        CHECK(!cc.exists);
        CHECK(cc.kappa() == 0);
        CHECK(stable_orbital_rank1(c, r1) * stable_orbital_rank1(c, r2) == 0);
    }
}

TEST_CASE("rank-two oracle agreement at the settled window") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    auto nice = nice_rep(s, {FScalar::from_int(c, 3), FScalar::from_int(c, 10)});
    auto flip = flipped_rep(s, FScalar::from_int(c, 3), FScalar::from_int(c, 10));
    REQUIRE(nice.has_value());
    REQUIRE(flip.has_value());
    for (const SymPoint& x : {*nice, *flip}) {
        OrbitCount oc = orbit_count(x);
        CHECK(oc.saturated);
        CHECK(oracle_orbit_count(x, oc.window) == oc.count);
    }
}

TEST_CASE("tangent-model classes match their transfer prediction") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    auto m = [&](int64_t a, int64_t b) {
        return std::make_pair(FScalar::from_int(c, a), FScalar::from_int(c, b));
    };

    SUBCASE("unit distance") {
        auto [m1, m2] = m(-4, -2);
        ClassCounts cc = lie_class_counts(s, m1, m2);
        REQUIRE(cc.exists);
        CHECK(cc.kappa() == 1);
    }

    SUBCASE("distance of valuation one") {
        auto [m1, m2] = m(-4, -1);
        ClassCounts cc = lie_class_counts(s, m1, m2);
        REQUIRE(cc.exists);
        CHECK(cc.kappa() == -3);
    }

    SUBCASE("odd valuation obstructs the lift") {
        auto [m1, m2] = m(3, -4);
        ClassCounts cc = lie_class_counts(s, m1, m2);
        CHECK(!cc.exists);
        CHECK(lie_stable_orbital_rank1(c, m1) == 0);
    }
}

TEST_CASE("oracle battery over rank-one data at p = 5") {
    auto c = make_context(5, 12);
    for (int64_t a : {2, 3, 7, 12, -8, 26}) {
        FScalar r = FScalar::from_int(c, a);
        auto s = make_split_space(c, 1);
        auto x = lift_from_herm(s, EMatrix::diag_f(c, {r}));
        if (!x) continue;
        OrbitCount oc = orbit_count(*x);
        CHECK(oc.saturated);
        CHECK(oracle_orbit_count(*x, oc.window) == oc.count);
    }
    auto walked = self_dual_walk(c, 1);
    CHECK(walked.size() == self_dual_count_rank2(5, 1));
}

TEST_CASE("inert invariant polynomial is rejected as non-elliptic") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    // contraction charpoly t^2 + 30t + 25 reduces to t^2 + 1 mod 3: no roots in
    // the residue field, even discriminant valuation, so the centralizer torus
    // splits over the quadratic extension and the count cannot saturate
    EMatrix x = EMatrix::zero(c, 2, 2);
    auto fi = [&](int64_t v) { return EScalar::from_f(FScalar::from_int(c, v)); };
    x.at(0, 0) = fi(-4);
    x.at(0, 1) = fi(1);
    x.at(1, 0) = fi(3);
    x.at(1, 1) = fi(-2);
    CHECK_THROWS_WITH_AS(lie_orbit_count(s, x),
                         "invariant polynomial is inert: count diverges", Error);
}
