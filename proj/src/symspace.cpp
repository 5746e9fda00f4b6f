#include "usp/symspace.hpp"

#include <numeric>

namespace usp {

namespace {

int parity_sum(const std::vector<int64_t>& exps) {
    int64_t s = std::accumulate(exps.begin(), exps.end(), int64_t{0});
    return static_cast<int>(((s % 2) + 2) % 2);
}

}  // namespace

int SpaceSpec::type1() const { return parity_sum(exps1); }
int SpaceSpec::type2() const { return parity_sum(exps2); }

std::string SpaceSpec::str() const {
    std::string s = "space(n=" + std::to_string(n) + ", phi1=[";
    for (size_t i = 0; i < exps1.size(); ++i) s += (i ? "," : "") + std::to_string(exps1[i]);
    s += "], phi2=[";
    for (size_t i = 0; i < exps2.size(); ++i) s += (i ? "," : "") + std::to_string(exps2[i]);
    return s + "])";
}

SpaceSpec make_space(const PrecisionContext& c, int n, std::vector<int64_t> exps1,
                     std::vector<int64_t> exps2) {
    if (n < 0 || exps1.size() != static_cast<size_t>(n) || exps2.size() != static_cast<size_t>(n))
        fail(Error::Kind::BadInput, "make_space: need n exponents per factor");
    SpaceSpec s;
    s.ctx = &c;
    s.n = n;
    s.exps1 = std::move(exps1);
    s.exps2 = std::move(exps2);
    s.phi1 = EMatrix::diag_powers(c, s.exps1);
    s.phi2 = EMatrix::diag_powers(c, s.exps2);
    s.phi = EMatrix::zero(c, 2 * n, 2 * n);
    s.phi.set_block(0, 0, s.phi1);
    s.phi.set_block(n, n, s.phi2);
    s.eps = EMatrix::zero(c, 2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        s.eps.at(i, i) = EScalar::from_int(c, 1);
        s.eps.at(n + i, n + i) = EScalar::from_int(c, -1);
    }
    return s;
}

SpaceSpec make_split_space(const PrecisionContext& c, int n) {
    return make_space(c, n, std::vector<int64_t>(n, 0), std::vector<int64_t>(n, 0));
}

EMatrix bstar(const SpaceSpec& spec, const EMatrix& b) {
    std::vector<int64_t> neg2(spec.exps2);
    for (auto& e : neg2) e = -e;
    return EMatrix::diag_powers(spec.c(), neg2) * b.dagger() * spec.phi1;
}

bool is_unitary(const SpaceSpec& spec, const EMatrix& m, int extra) {
    if (m.rows() != spec.dim() || m.cols() != spec.dim()) return false;
    int allow = std::max(extra, val_allowance({m.min_val(), m.min_val()}));
    return (m.dagger() * spec.phi * m - spec.phi).near_zero(allow);
}

bool is_member(const SpaceSpec& spec, const EMatrix& m, int extra) {
    if (!is_unitary(spec, m, extra)) return false;
    EMatrix em = spec.eps * m;
    int allow = std::max(extra, val_allowance({m.min_val(), m.min_val()}));
    if (!(em * em - EMatrix::identity(spec.c(), spec.dim())).near_zero(allow)) return false;
    return em.trace().near_zero(std::max(extra, val_allowance({m.min_val()})));
}

SymPoint make_point(const SpaceSpec& spec, const EMatrix& m, int extra) {
    if (!is_member(spec, m, extra)) fail(Error::Kind::BadInput, "make_point: not in the space");
    return SymPoint{spec, m};
}

SymPoint orbit_map(const SpaceSpec& spec, const EMatrix& g) {
    if (!is_unitary(spec, g)) fail(Error::Kind::BadInput, "orbit_map: g not unitary");
    return make_point(spec, g * spec.eps * g.inverse() * spec.eps);
}

std::optional<SymPoint> lift_from_herm(const SpaceSpec& spec, const EMatrix& a) {
    const PrecisionContext& c = spec.c();
    if (a.rows() != spec.n || a.cols() != spec.n)
        fail(Error::Kind::BadInput, "lift_from_herm: block size mismatch");
    int herm_extra = val_allowance({a.min_val(), spec.phi1.inverse().min_val()});
    if (!(spec.phi1.inverse() * a.dagger() * spec.phi1 - a).near_zero(herm_extra))
        fail(Error::Kind::BadInput, "lift_from_herm: A not phi1-Hermitian");
    EMatrix s = EMatrix::identity(c, spec.n) - a * a;
    if (spec.n > 0 && s.det().near_zero())
        fail(Error::Kind::Degenerate, "lift_from_herm: I - A^2 singular");
    // need B with B phi2^-1 B^dagger = (I - A^2) phi1^-1
    EMatrix h = s * spec.phi1.inverse();
    std::vector<int64_t> neg2(spec.exps2);
    for (auto& e : neg2) e = -e;
    auto b = congruence_solve(h, EMatrix::diag_powers(c, neg2));
    if (!b) return std::nullopt;
    EMatrix d = b->inverse() * a * *b;
    EMatrix m = EMatrix::zero(c, spec.dim(), spec.dim());
    m.set_block(0, 0, a);
    m.set_block(0, spec.n, *b);
    m.set_block(spec.n, 0, -bstar(spec, *b));
    m.set_block(spec.n, spec.n, d);
    // the congruence solve and the inverse compound the depth of the inputs,
    // and the solve's internal normalization costs half the determinant
    // valuation, so the membership residuals sit below the strict threshold
    int extra = val_allowance(
                    {a.min_val(), a.min_val(), h.min_val(), b->min_val(), b->min_val()}) +
                static_cast<int>((std::max<int64_t>(h.det().val(), 0) + 1) / 2);
    if (!is_member(spec, m, extra))
        fail(Error::Kind::PrecisionExhausted, "lift_from_herm: check failed");
    return SymPoint{spec, m};
}

EPoly chi(const SymPoint& x) {
    EMatrix a = x.block_a();
    EPoly f = char_poly(a);
    // degree-n products of the entries set the noise floor of the omega parts
    int extra = x.spec.n * val_allowance({a.min_val()});
    if (!f.has_f_coeffs(extra)) fail(Error::Kind::PrecisionExhausted, "chi: coefficients not in F");
    return EPoly::from_f_coeffs(x.c(), f.f_coeffs(extra));
}

EPoly car_from_chi(const EPoly& f) {
    const PrecisionContext& c = f.ctx();
    int n = f.degree();
    EScalar one = EScalar::from_int(c, 1);
    EPoly tt1(c, {one, EScalar::zero(c), one});             // t^2 + 1
    EPoly two_t(c, {EScalar::zero(c), EScalar::from_int(c, 2)});  // 2t
    EPoly acc(c);
    EPoly tt1_pow = EPoly::constant(one);
    std::vector<EPoly> tt1_pows;
    for (int k = 0; k <= n; ++k) {
        tt1_pows.push_back(tt1_pow);
        tt1_pow = tt1_pow * tt1;
    }
    EPoly two_t_pow = EPoly::constant(one);
    for (int k = n; k >= 0; --k) {
        acc = acc + tt1_pows[static_cast<size_t>(k)] * two_t_pow * f.coeff(k);
        two_t_pow = two_t_pow * two_t;
    }
    return acc;
}

bool is_rss(const SymPoint& x) {
    if (x.spec.n == 0) return true;
    EPoly f = chi(x);
    if (discriminant(f).near_zero()) return false;
    const PrecisionContext& c = x.c();
    if (f.eval(EScalar::from_int(c, 1)).near_zero()) return false;
    if (f.eval(EScalar::from_int(c, -1)).near_zero()) return false;
    return !x.block_b().det().near_zero();
}

bool very_regular(const SymPoint& x, const FScalar& nu) {
    EScalar v = chi(x).eval(EScalar::from_f(nu));
    return !v.near_zero() && v.re().val() == 0;
}

SymPoint conjugate(const SymPoint& x, const EMatrix& h1, const EMatrix& h2, int extra) {
    const PrecisionContext& c = x.c();
    EMatrix h = EMatrix::zero(c, x.spec.dim(), x.spec.dim());
    h.set_block(0, 0, h1);
    h.set_block(x.spec.n, x.spec.n, h2);
    if (!is_unitary(x.spec, h)) fail(Error::Kind::BadInput, "conjugate: h not unitary");
    return make_point(x.spec, h * x.m * h.inverse(), extra);
}

}  // namespace usp
