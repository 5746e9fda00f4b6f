#include "usp/endoscopy.hpp"

namespace usp {

SplitType classify_quadratic(const EPoly& f) {
    if (f.degree() != 2 || !f.has_f_coeffs())
        fail(Error::Kind::BadInput, "classify_quadratic: need a quadratic over F");
    EScalar d = discriminant(f);
    if (d.near_zero()) fail(Error::Kind::NotSquarefree, "classify_quadratic: repeated root");
    if (((d.as_f().val() % 2) + 2) % 2 != 0) return SplitType::Ramified;
    return quadratic_roots_f(f) ? SplitType::Split : SplitType::Inert;
}

int eigenline_inv(const EMatrix& a, const EMatrix& phi1, const FScalar& root) {
    const PrecisionContext& c = a.ctx();
    EMatrix v = kernel_vector(a - EMatrix::identity(c, a.rows()) * EScalar::from_f(root));
    EScalar len = (v.dagger() * phi1 * v).at(0, 0);
    if (len.near_zero()) fail(Error::Kind::Degenerate, "eigenline_inv: isotropic eigenline");
    return static_cast<int>(((len.as_f().val() % 2) + 2) % 2);
}

int eigenline_inv(const SymPoint& x, const FScalar& root) {
    return eigenline_inv(x.block_a(), x.spec.phi1, root);
}

std::pair<int, int> orbit_invariants(const SymPoint& x) {
    auto roots = quadratic_roots_f(chi(x));
    if (!roots) fail(Error::Kind::NoFactorization, "orbit_invariants: no F-roots");
    int i1 = eigenline_inv(x, roots->first);
    int i2 = eigenline_inv(x, roots->second);
    if ((i1 + i2) % 2 != x.spec.type1())
        fail(Error::Kind::PrecisionExhausted, "orbit_invariants: parity constraint violated");
    return {i1, i2};
}

std::optional<SymPoint> nice_rep(const SpaceSpec& spec, const std::vector<FScalar>& roots) {
    if (static_cast<int>(roots.size()) != spec.n)
        fail(Error::Kind::BadInput, "nice_rep: need n roots");
    return lift_from_herm(spec, EMatrix::diag_f(spec.c(), roots));
}

std::optional<SymPoint> flipped_rep(const SpaceSpec& spec, const FScalar& r1, const FScalar& r2) {
    if (spec.n != 2) fail(Error::Kind::BadInput, "flipped_rep: rank two only");
    const PrecisionContext& c = spec.c();
    EMatrix s = split_pair_unit(c).dagger();
    EMatrix a = s * EMatrix::diag_f(c, {r1, r2}) * s.inverse();
    return lift_from_herm(spec, a);
}

std::optional<EMatrix> lie_nice_rep(const SpaceSpec& spec, const std::vector<FScalar>& roots) {
    if (static_cast<int>(roots.size()) != spec.n)
        fail(Error::Kind::BadInput, "lie_nice_rep: need n roots");
    const PrecisionContext& c = spec.c();
    EMatrix target = -EMatrix::diag_f(c, roots) * spec.phi1.inverse();
    std::vector<int64_t> neg2(spec.exps2);
    for (auto& e : neg2) e = -e;
    auto x = congruence_solve(target, EMatrix::diag_powers(c, neg2));
    if (!x) return std::nullopt;
    int extra = val_allowance({x->min_val(), bstar(spec, *x).min_val()});
    if (!(lie_r(spec, *x) - EMatrix::diag_f(c, roots)).near_zero(extra))
        fail(Error::Kind::PrecisionExhausted, "lie_nice_rep: residual check failed");
    return x;
}

std::optional<EMatrix> lie_flipped_rep(const SpaceSpec& spec, const FScalar& m1,
                                       const FScalar& m2) {
    if (spec.n != 2) fail(Error::Kind::BadInput, "lie_flipped_rep: rank two only");
    const PrecisionContext& c = spec.c();
    EMatrix s = split_pair_unit(c).dagger();
    EMatrix m = s * EMatrix::diag_f(c, {m1, m2}) * s.inverse();
    EMatrix target = -m * spec.phi1.inverse();
    std::vector<int64_t> neg2(spec.exps2);
    for (auto& e : neg2) e = -e;
    auto x = congruence_solve(target, EMatrix::diag_powers(c, neg2));
    if (!x) return std::nullopt;
    int extra = val_allowance({x->min_val(), bstar(spec, *x).min_val()});
    if (!(lie_r(spec, *x) - m).near_zero(extra))
        fail(Error::Kind::PrecisionExhausted, "lie_flipped_rep: residual check failed");
    return x;
}

SpaceSpec companion_space(const SpaceSpec& spec) {
    std::vector<int64_t> e1(spec.exps1), e2(spec.exps2);
    for (auto& e : e1) ++e;
    for (auto& e : e2) ++e;
    return make_space(spec.c(), spec.n, e1, e2);
}

SymPoint reinterpret_point(const SpaceSpec& dst, const SymPoint& x) {
    if (dst.n != x.spec.n) fail(Error::Kind::BadInput, "reinterpret_point: rank mismatch");
    return make_point(dst, x.m);
}

int64_t TransferFactor::scaled(int64_t count, const PrecisionContext& c) const {
    int64_t v = sign * count;
    for (int64_t i = 0; i < qexp; ++i) v *= c.p;
    return v;
}

TransferFactor transfer_factor(const EPoly& fa, const EPoly& fb) {
    if (!fa.has_f_coeffs() || !fb.has_f_coeffs())
        fail(Error::Kind::BadInput, "transfer_factor: coefficients must lie in F");
    EScalar d = resultant(fa, fb);
    if (d.near_zero()) fail(Error::Kind::Degenerate, "transfer_factor: shared root");
    int64_t v = d.as_f().val();
    if (v < 0) fail(Error::Kind::BadInput, "transfer_factor: nonintegral resultant");
    return {v % 2 ? -1 : 1, v};
}

}  // namespace usp
