#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "usp/endoscopy.hpp"

using namespace usp;

namespace {

EPoly from_roots(const PrecisionContext& c, int64_t r1, int64_t r2) {
    EPoly f = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -r1), FScalar::one(c)});
    EPoly g = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -r2), FScalar::one(c)});
    return f * g;
}

}  // namespace

TEST_CASE("quadratic classification over F") {
    auto c = make_context(3, 12);
    CHECK(classify_quadratic(from_roots(c, 3, 12)) == SplitType::Split);
    CHECK(classify_quadratic(from_roots(c, 2, 5)) == SplitType::Split);

    EPoly inert = EPoly::from_f_coeffs(
        c, {-FScalar::make(c, 0, 2), FScalar::zero(c), FScalar::one(c)});  // t^2 - eps
    CHECK(classify_quadratic(inert) == SplitType::Inert);

    EPoly ram = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -3), FScalar::zero(c), FScalar::one(c)});
    CHECK(classify_quadratic(ram) == SplitType::Ramified);

    CHECK_THROWS_AS(classify_quadratic(from_roots(c, 4, 4)), Error);
}

TEST_CASE("invariants of the two representatives in a stable class") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    FScalar r1 = FScalar::from_int(c, 3), r2 = FScalar::from_int(c, 12);

    auto nice = nice_rep(s, {r1, r2});
    REQUIRE(nice.has_value());
    CHECK(is_rss(*nice));
    auto inv0 = orbit_invariants(*nice);
    CHECK(inv0.first == 0);
    CHECK(inv0.second == 0);

    auto flip = flipped_rep(s, r1, r2);
    REQUIRE(flip.has_value());
    CHECK(is_rss(*flip));
    CHECK((chi(*flip) - chi(*nice)).near_zero());  // same stable class
    auto inv1 = orbit_invariants(*flip);
    CHECK(inv1.first == 1);
    CHECK(inv1.second == 1);
    CHECK(eigenline_inv(*flip, r1) == 1);
    CHECK(kappa_sign(inv0.second) == 1);
    CHECK(kappa_sign(inv1.second) == -1);
}

TEST_CASE("lift parity across data flavors") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);

    // one even and one odd 1 - r^2: no representative exists at all
    FScalar even = FScalar::from_int(c, 3), odd = FScalar::from_int(c, 2);
    CHECK(!nice_rep(s, {even, odd}).has_value());
    CHECK(!flipped_rep(s, even, odd).has_value());

    // both odd: representatives exist and carry the usual invariants
    FScalar o1 = FScalar::from_int(c, 2), o2 = FScalar::from_int(c, 5);
    auto nice = nice_rep(s, {o1, o2});
    REQUIRE(nice.has_value());
    auto inv = orbit_invariants(*nice);
    CHECK(inv.first == 0);
    CHECK(inv.second == 0);
    auto flip = flipped_rep(s, o1, o2);
    REQUIRE(flip.has_value());
    auto invf = orbit_invariants(*flip);
    CHECK(invf.first == 1);
    CHECK(invf.second == 1);
}

TEST_CASE("tangent model representatives") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    FScalar m1 = FScalar::from_int(c, 3), m2 = FScalar::from_int(c, 6);

    auto x = lie_nice_rep(s, {m1, m2});
    REQUIRE(x.has_value());
    EMatrix m = lie_r(s, *x);
    CHECK((m - EMatrix::diag_f(c, {m1, m2})).near_zero());
    CHECK(eigenline_inv(m, s.phi1, m1) == 0);
    CHECK(eigenline_inv(m, s.phi1, m2) == 0);

    auto y = lie_flipped_rep(s, m1, m2);
    REQUIRE(y.has_value());
    EMatrix my = lie_r(s, *y);
    CHECK((char_poly(my) - char_poly(m)).near_zero());
    CHECK(eigenline_inv(my, s.phi1, m1) == 1);
    CHECK(eigenline_inv(my, s.phi1, m2) == 1);

    // odd product valuation obstructs the factorization
    CHECK(!lie_nice_rep(s, {m1, FScalar::from_int(c, 4)}).has_value());
}

TEST_CASE("companion spaces take the same matrices") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 1);
    auto comp = companion_space(s);
    CHECK(comp.type1() == 1);
    CHECK(comp.type2() == 1);

    EMatrix a(c, 1, 1);
    a.at(0, 0) = EScalar::from_int(c, 3);
    auto x = lift_from_herm(s, a);
    REQUIRE(x.has_value());
    auto y = reinterpret_point(comp, *x);
    CHECK(is_member(comp, y.m));
    CHECK((chi(y) - chi(*x)).near_zero());

    // the companion forms admit no self-dual lattices
    CHECK(self_dual_lattices(c, 1, comp.phi1, 2).empty());
    CHECK(self_dual_lattices(c, 1, comp.phi2, 2).empty());
}

TEST_CASE("transfer factors") {
    auto c = make_context(3, 12);
    EPoly fa = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -3), FScalar::one(c)});
    EPoly fb = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -10), FScalar::one(c)});
    auto t0 = transfer_factor(fa, fb);  // Res = -7, unit
    CHECK(t0.sign == 1);
    CHECK(t0.qexp == 0);
    CHECK(t0.scaled(5, c) == 5);

    EPoly fc = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -6), FScalar::one(c)});
    auto t1 = transfer_factor(fa, fc);  // Res = -3
    CHECK(t1.sign == -1);
    CHECK(t1.qexp == 1);
    CHECK(t1.scaled(5, c) == -15);
    CHECK(t1.scaled(-2, c) == 6);

    auto t2 = transfer_factor(from_roots(c, 3, 12), fb);  // (3-10)(12-10) = -14
    CHECK(t2.sign == 1);
    CHECK(t2.qexp == 0);

    // degree-zero factor contributes trivially
    auto t3 = transfer_factor(fa, EPoly::constant(EScalar::one(c)));
    CHECK(t3.sign == 1);
    CHECK(t3.qexp == 0);

    CHECK_THROWS_AS(transfer_factor(fa, fa), Error);
}
