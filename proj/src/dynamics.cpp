#include "usp/dynamics.hpp"

#include <numeric>

namespace usp {

namespace {

EMatrix eval_poly_mat(const EPoly& f, const EMatrix& m) {
    const PrecisionContext& c = m.ctx();
    int n = m.rows();
    EMatrix acc = EMatrix::zero(c, n, n);
    for (int k = f.degree(); k >= 0; --k)
        acc = acc * m + EMatrix::identity(c, n) * f.coeff(k);
    return acc;
}

void check_nu(int nu) {
    if (nu != 1 && nu != -1) fail(Error::Kind::BadInput, "nu must be +-1");
}

// T with T g T^dagger = diag(1, ..., 1[, p]); the exponent vector is the
// normal form of the class of g
std::pair<EMatrix, std::vector<int64_t>> normalize_form(const EMatrix& g) {
    const PrecisionContext& c = g.ctx();
    int r = g.rows();
    EScalar dg = g.det();
    if (dg.near_zero()) fail(Error::Kind::Degenerate, "normalize_form: degenerate Gram");
    std::vector<int64_t> exps(static_cast<size_t>(r), 0);
    if (((dg.as_f().val() % 2) + 2) % 2 != 0) exps.back() = 1;
    auto t = congruence_solve(EMatrix::diag_powers(c, exps), g);
    if (!t) fail(Error::Kind::PrecisionExhausted, "normalize_form: classes disagree");
    return {*t, exps};
}

}  // namespace

EMatrix lie_delta(const SpaceSpec& spec, const EMatrix& x_block) {
    if (x_block.rows() != spec.n || x_block.cols() != spec.n)
        fail(Error::Kind::BadInput, "lie_delta: block size mismatch");
    EMatrix d = EMatrix::zero(spec.c(), spec.dim(), spec.dim());
    d.set_block(0, spec.n, x_block);
    d.set_block(spec.n, 0, -bstar(spec, x_block));
    return d;
}

bool is_odd_antiherm(const SpaceSpec& spec, const EMatrix& delta) {
    if (delta.rows() != spec.dim() || delta.cols() != spec.dim()) return false;
    if (!(spec.eps * delta * spec.eps + delta).near_zero()) return false;
    return (spec.phi.inverse() * delta.dagger() * spec.phi + delta).near_zero();
}

EMatrix lie_r(const SpaceSpec& spec, const EMatrix& x_block) {
    return -(x_block * bstar(spec, x_block));
}

EMatrix cayley_block(const EMatrix& m, int nu) {
    check_nu(nu);
    const PrecisionContext& c = m.ctx();
    EMatrix id = EMatrix::identity(c, m.rows());
    EMatrix den = id - m;
    if (m.rows() > 0 && den.det().near_zero())
        fail(Error::Kind::Degenerate, "cayley_block: 1 is an eigenvalue");
    return -((id + m) * den.inverse() * EScalar::from_int(c, nu));
}

SymPoint cayley(const SpaceSpec& spec, const EMatrix& x_block, int nu) {
    check_nu(nu);
    EMatrix delta = lie_delta(spec, x_block);
    return make_point(spec, cayley_block(delta, nu));
}

EMatrix cayley_inv(const SymPoint& x, int nu) {
    check_nu(nu);
    const PrecisionContext& c = x.c();
    EMatrix id = EMatrix::identity(c, x.spec.dim());
    EMatrix den = x.m - id * EScalar::from_int(c, nu);
    if (x.spec.dim() > 0 && den.det().near_zero())
        fail(Error::Kind::Degenerate, "cayley_inv: nu is an eigenvalue");
    EMatrix delta = den.inverse() * (x.m + id * EScalar::from_int(c, nu));
    if (!is_odd_antiherm(x.spec, delta))
        fail(Error::Kind::PrecisionExhausted, "cayley_inv: tangent check failed");
    return delta.submatrix(0, x.spec.n, x.spec.n, x.spec.n);
}

EPoly cayley_chi(const EPoly& f, int nu) {
    check_nu(nu);
    const PrecisionContext& c = f.ctx();
    int d = f.degree();
    EScalar fnu = f.eval(EScalar::from_int(c, nu));
    if (fnu.near_zero()) fail(Error::Kind::Degenerate, "cayley_chi: f(nu) = 0");
    EScalar one = EScalar::one(c);
    EPoly tp(c, {one, one});                            // t + 1
    EPoly tm(c, {EScalar::from_int(c, -1), one});       // t - 1
    std::vector<EPoly> tp_pows{EPoly::constant(one)};
    for (int k = 0; k < d; ++k) tp_pows.push_back(tp_pows.back() * tp);
    EPoly acc(c);
    EPoly tm_pow = EPoly::constant(one);
    EScalar nu_e = EScalar::from_int(c, nu);
    for (int k = d; k >= 0; --k) {
        acc = acc + tp_pows[static_cast<size_t>(k)] * tm_pow * (f.coeff(k) * nu_e.pow(k));
        tm_pow = tm_pow * tm;
    }
    return acc * fnu.inv();
}

EScalar cayley_res_factor(const EPoly& f, const EPoly& g, int nu) {
    check_nu(nu);
    const PrecisionContext& c = f.ctx();
    int a = f.degree(), b = g.degree();
    EScalar nu_e = EScalar::from_int(c, nu);
    EScalar fv = f.eval(nu_e), gv = g.eval(nu_e);
    if (fv.near_zero() || gv.near_zero())
        fail(Error::Kind::Degenerate, "cayley_res_factor: value at nu vanishes");
    EScalar num = EScalar::from_int(c, -2 * nu).pow(static_cast<int64_t>(a) * b);
    return num * (fv.pow(b) * gv.pow(a)).inv();
}

int64_t tjd_exponent(int dim) {
    int64_t l = 1;
    for (int64_t k = 2; k <= 2 * dim; ++k) l = std::lcm(l, k);
    return l;
}

bool strongly_compact(const EMatrix& m) {
    EPoly f = char_poly(m);
    if (!f.is_integral()) return false;
    EScalar c0 = f.coeff(0);
    return std::min(c0.re().val(), c0.im().val()) == 0;
}

Tjd tjd(const SymPoint& x) {
    const PrecisionContext& c = x.c();
    int dim = x.spec.dim();
    if (!strongly_compact(x.m)) fail(Error::Kind::NotStronglyCompact, "tjd: eigenvalues not units");
    int64_t l = tjd_exponent(dim);
    auto step = [&](EMatrix w) {
        for (int64_t i = 0; i < l; ++i) w = w.pow(c.p);
        return w;
    };
    EMatrix z = x.m, next = step(z);
    int it = 0;
    while (!next.eq(z)) {
        z = next;
        next = step(z);
        if (++it > c.N + 2) fail(Error::Kind::NonConvergence, "tjd: power iteration did not settle");
    }
    EMatrix as = z;
    EMatrix tu = x.m * as.inverse();
    if (!(as * tu).eq(tu * as)) fail(Error::Kind::PrecisionExhausted, "tjd: parts do not commute");
    EMatrix w = tu - EMatrix::identity(c, dim);
    if (dim > 0 && w.pow(dim).min_val() < 1)
        fail(Error::Kind::NonConvergence, "tjd: unipotent part not congruent to 1");
    return {make_point(x.spec, as), make_point(x.spec, tu), it};
}

namespace {

DescentComponent component_for(const SymPoint& x, const EMatrix& as, const EPoly& pfull, int nu,
                               int mult) {
    const PrecisionContext& c = x.c();
    int n = x.spec.n, dim = x.spec.dim();
    if (mult == 0) {
        SpaceSpec s0 = make_space(c, 0, {}, {});
        return {s0, SymPoint{s0, EMatrix(c, 0, 0)}, EMatrix(c, dim, 0)};
    }
    if (mult % 2) fail(Error::Kind::NotInDescentLocus, "descend: odd eigenspace dimension");
    int r = mult / 2;
    EScalar nu_e = EScalar::from_int(c, nu);
    EPoly s = pfull;
    for (int i = 0; i < mult; ++i) s = s.div_linear(nu_e).first;
    EScalar sv = s.eval(nu_e);
    if (sv.near_zero() || std::min(sv.re().val(), sv.im().val()) != 0)
        fail(Error::Kind::PrecisionExhausted, "descend: projector scale not a unit");
    EMatrix proj = eval_poly_mat(s, as) * sv.inv();
    if (!(proj * proj - proj).near_zero())
        fail(Error::Kind::PrecisionExhausted, "descend: projector not idempotent");
    if (!(proj * x.m - x.m * proj).near_zero())
        fail(Error::Kind::PrecisionExhausted, "descend: projector does not commute");
    if (!proj.submatrix(n, 0, n, n).near_zero() || !proj.submatrix(0, n, n, n).near_zero())
        fail(Error::Kind::PrecisionExhausted, "descend: projector mixes the factors");

    Lattice l1 = lattice_from_columns(proj.submatrix(0, 0, n, n));
    Lattice l2 = lattice_from_columns(proj.submatrix(n, n, n, n));
    if (l1.rank() != r || l2.rank() != r)
        fail(Error::Kind::NotInDescentLocus, "descend: eigenspace splits unevenly");
    EMatrix u1 = l1.basis(), u2 = l2.basis();
    auto [t1, e1] = normalize_form(u1.dagger() * x.spec.phi1 * u1);
    auto [t2, e2] = normalize_form(u2.dagger() * x.spec.phi2 * u2);
    u1 = u1 * t1.dagger();
    u2 = u2 * t2.dagger();
    SpaceSpec cs = make_space(c, r, e1, e2);
    EMatrix embed = EMatrix::zero(c, dim, 2 * r);
    embed.set_block(0, 0, u1);
    embed.set_block(n, r, u2);
    if (!(embed.dagger() * x.spec.phi * embed).eq(cs.phi))
        fail(Error::Kind::PrecisionExhausted, "descend: embedding Gram mismatch");
    EMatrix coords = cs.phi.inverse() * embed.dagger() * x.spec.phi * x.m * embed;
    if (!(x.m * embed - embed * coords).near_zero())
        fail(Error::Kind::PrecisionExhausted, "descend: restriction check failed");
    return {cs, make_point(cs, coords), embed};
}

}  // namespace

DescentData descend(const SymPoint& x) {
    const PrecisionContext& c = x.c();
    Tjd parts = tjd(x);
    EPoly pfull = char_poly(parts.as.m);
    int m1 = pfull.root_multiplicity(EScalar::one(c));
    int mm1 = pfull.root_multiplicity(EScalar::from_int(c, -1));
    if (m1 + mm1 != x.spec.dim())
        fail(Error::Kind::NotInDescentLocus, "descend: semisimple part has eigenvalues away from +-1");
    DescentComponent plus = component_for(x, parts.as.m, pfull, 1, m1);
    DescentComponent minus = component_for(x, parts.as.m, pfull, -1, mm1);
    return {parts, plus, minus};
}

}  // namespace usp
