#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "usp/symspace.hpp"

using namespace usp;

namespace {

// [[alpha, beta], [-conj(beta), conj(alpha)]] with Nm(alpha) + Nm(beta) = 1,
// unitary for the identity form
EMatrix rotation(const PrecisionContext& c, const EScalar& alpha) {
    auto beta = solve_norm(FScalar::one(c) - alpha.norm());
    REQUIRE(beta.has_value());
    EMatrix g(c, 2, 2);
    g.at(0, 0) = alpha;
    g.at(0, 1) = *beta;
    g.at(1, 0) = -beta->conj();
    g.at(1, 1) = alpha.conj();
    return g;
}

EScalar norm_one(const PrecisionContext& c, int64_t s, int64_t t) {
    EScalar w = EScalar::make(FScalar::from_int(c, s), FScalar::from_int(c, t));
    return w * w.conj().inv();
}

}  // namespace

TEST_CASE("space construction and types") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    CHECK(s.n == 2);
    CHECK(s.dim() == 4);
    CHECK(s.type1() == 0);
    CHECK(s.type2() == 0);
    CHECK(s.both_split());
    CHECK(s.phi.eq(EMatrix::identity(c, 4)));
    CHECK(s.eps.at(0, 0).re().unit() == 1);
    CHECK(s.eps.at(2, 2).eq(EScalar::from_int(c, -1)));

    auto ns = make_space(c, 1, {0}, {1});
    CHECK(ns.type1() == 0);
    CHECK(ns.type2() == 1);
    CHECK(!ns.both_split());
    CHECK(ns.phi2.at(0, 0).re().val() == 1);

    CHECK_THROWS_AS(make_space(c, 2, {0}, {0, 0}), Error);
}

TEST_CASE("identity point and membership checks") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    EMatrix id = EMatrix::identity(c, 4);
    CHECK(is_member(s, id));
    auto x = make_point(s, id);
    CHECK(x.block_a().eq(EMatrix::identity(c, 2)));
    CHECK(x.block_b().near_zero());
    CHECK(!is_rss(x));  // cross block vanishes

    // eps itself is unitary and squares correctly but has nonzero trace
    CHECK(is_unitary(s, s.eps));
    CHECK(!is_member(s, s.eps));
    CHECK_THROWS_AS(make_point(s, s.eps), Error);
    CHECK(!is_member(s, id * EScalar::from_int(c, 2)));
}

TEST_CASE("orbit map lands in the space") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 1);
    CHECK(orbit_map(s, EMatrix::identity(c, 2)).m.eq(EMatrix::identity(c, 2)));

    int64_t picks[][3] = {{3, 1, 2}, {6, 2, 1}, {3, 4, 1}, {9, 1, 1}, {12, 5, 2}};
    for (auto [a0, ws, wt] : picks) {
        EMatrix g = rotation(c, EScalar::from_int(c, a0));
        EMatrix t = EMatrix::diag_e(c, {norm_one(c, ws, wt), EScalar::one(c)});
        auto x = orbit_map(s, g * t);
        CHECK(is_member(s, x.m));
        // full matrix inverse agrees with the involution shortcut
        CHECK(x.m.inverse().eq(s.eps * x.m * s.eps));
    }
    CHECK_THROWS_AS(orbit_map(s, EMatrix::identity(c, 2) * EScalar::from_int(c, 3)), Error);
}

TEST_CASE("lift from Hermitian block, rank one") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 1);

    EMatrix a(c, 1, 1);
    a.at(0, 0) = EScalar::from_int(c, 3);  // 1 - a^2 = -8, a unit
    auto x = lift_from_herm(s, a);
    REQUIRE(x.has_value());
    CHECK(is_member(s, x->m));
    CHECK(x->block_a().eq(a));
    CHECK(is_rss(*x));
    CHECK(very_regular(*x, FScalar::from_int(c, 1)));
    CHECK(very_regular(*x, FScalar::from_int(c, -1)));

    // B norm check: Nm(b) = 1 - a^2
    EScalar b = x->block_b().at(0, 0);
    CHECK((b.norm() - FScalar::from_int(c, -8)).near_zero());

    a.at(0, 0) = EScalar::from_int(c, 2);  // 1 - a^2 = -3, odd valuation
    CHECK(!lift_from_herm(s, a).has_value());

    a.at(0, 0) = EScalar::from_int(c, 1);  // 1 - a^2 = 0
    CHECK_THROWS_AS(lift_from_herm(s, a), Error);

    // odd-type second factor accepts exactly the opposite parity
    auto ns = make_space(c, 1, {0}, {1});
    a.at(0, 0) = EScalar::from_int(c, 2);
    auto y = lift_from_herm(ns, a);
    REQUIRE(y.has_value());
    CHECK(is_member(ns, y->m));
    a.at(0, 0) = EScalar::from_int(c, 3);
    CHECK(!lift_from_herm(ns, a).has_value());
}

TEST_CASE("lift from Hermitian block, rank two") {
    for (int64_t p : {3, 5}) {
        auto c = make_context(p, 12);
        auto s = make_split_space(c, 2);
        EMatrix a = EMatrix::diag_f(c, {FScalar::from_int(c, p), FScalar::from_int(c, 4 * p)});
        auto x = lift_from_herm(s, a);
        REQUIRE(x.has_value());
        CHECK(is_member(s, x->m));
        CHECK(is_rss(*x));

        // block relations
        EMatrix bb = x->block_b();
        EMatrix bs = bstar(s, bb);
        int n = s.n;
        CHECK((x->m.submatrix(n, 0, n, n) + bs).near_zero());
        CHECK((x->block_a() * bb - bb * x->block_d()).near_zero());
        CHECK((x->block_a() * x->block_a() + bb * bs - EMatrix::identity(c, n)).near_zero());
        CHECK((s.phi1.inverse() * x->block_a().dagger() * s.phi1 - x->block_a()).near_zero());
        CHECK((s.phi2.inverse() * x->block_d().dagger() * s.phi2 - x->block_d()).near_zero());

        // characteristic polynomial of the contraction block
        EPoly f = chi(*x);
        CHECK(f.degree() == 2);
        CHECK((f.eval(a.at(0, 0))).near_zero());
        CHECK((f.eval(a.at(1, 1))).near_zero());
    }
}

TEST_CASE("full characteristic polynomial from the half one") {
    auto c = make_context(3, 12);

    // rank one by hand: chi = t - a gives t^2 - 2at + 1
    EPoly f = EPoly::from_f_coeffs(c, {FScalar::from_int(c, -3), FScalar::one(c)});
    EPoly g = car_from_chi(f);
    CHECK(g.degree() == 2);
    CHECK(g.coeff(2).eq(EScalar::one(c)));
    CHECK(g.coeff(1).eq(EScalar::from_int(c, -6)));
    CHECK(g.coeff(0).eq(EScalar::one(c)));

    // matches the honest characteristic polynomial on sample points
    auto s = make_split_space(c, 2);
    EMatrix a = EMatrix::diag_f(c, {FScalar::from_int(c, 3), FScalar::from_int(c, 12)});
    auto x = lift_from_herm(s, a);
    REQUIRE(x.has_value());
    CHECK((char_poly(x->m) - car_from_chi(chi(*x))).near_zero());

    auto s1 = make_split_space(c, 1);
    EMatrix g2 = rotation(c, EScalar::from_int(c, 6));
    auto y = orbit_map(s1, g2);
    CHECK((char_poly(y.m) - car_from_chi(chi(y))).near_zero());
}

TEST_CASE("regularity predicates") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);

    // repeated eigenvalue: discriminant vanishes
    EMatrix a = EMatrix::diag_f(c, {FScalar::from_int(c, 3), FScalar::from_int(c, 3)});
    auto x = lift_from_herm(s, a);
    REQUIRE(x.has_value());
    CHECK(!is_rss(*x));

    // eigenvalue close to 1: still rss but not very regular there
    FScalar a1 = FScalar::one(c) + FScalar::make(c, 2, 1);
    EMatrix a2 = EMatrix::diag_f(c, {a1, FScalar::from_int(c, 3)});
    auto y = lift_from_herm(s, a2);
    REQUIRE(y.has_value());
    CHECK(is_rss(*y));
    CHECK(!very_regular(*y, FScalar::from_int(c, 1)));
    CHECK(very_regular(*y, FScalar::from_int(c, -1)));
}

TEST_CASE("conjugation preserves membership and invariants") {
    auto c = make_context(3, 12);
    auto s = make_split_space(c, 2);
    EMatrix a = EMatrix::diag_f(c, {FScalar::from_int(c, 3), FScalar::from_int(c, 12)});
    auto x = lift_from_herm(s, a);
    REQUIRE(x.has_value());

    EMatrix h1 = rotation(c, EScalar::from_int(c, 9));
    EMatrix h2 = EMatrix::diag_e(c, {norm_one(c, 1, 1), norm_one(c, 2, 3)});
    auto y = conjugate(*x, h1, h2);
    CHECK(is_member(s, y.m));
    CHECK((chi(y) - chi(*x)).near_zero());
    CHECK(is_rss(y));
}

TEST_CASE("rank zero space") {
    auto c = make_context(3, 12);
    auto s = make_space(c, 0, {}, {});
    EMatrix m(c, 0, 0);
    CHECK(is_member(s, m));
    auto x = lift_from_herm(s, m);
    REQUIRE(x.has_value());
    CHECK(is_rss(*x));
    CHECK(chi(*x).degree() == 0);
    CHECK(car_from_chi(chi(*x)).degree() == 0);
}
