#include "usp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <utility>

namespace usp {

namespace {

constexpr uint64_t kGamma = 0x9E3779B97F4A7C15ull;

uint64_t mix64(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001B3ull;
    }
    return h;
}

}  // namespace

uint64_t Rng::next() { return mix64(state_ += kGamma); }

uint64_t Rng::below(uint64_t bound) {
    if (bound == 0) fail(Error::Kind::BadInput, "below: empty range");
    // reject draws above the largest multiple of bound
    uint64_t residual = -bound % bound;  // 2^64 mod bound
    for (;;) {
        uint64_t x = next();
        if (x >= residual) return x % bound;
    }
}

Rng Rng::fork(uint64_t idx) const { return Rng(mix64(state_ + (idx + 1) * kGamma)); }

FScalar rand_int_f(const PrecisionContext& c, Rng& rng) {
    uint64_t raw = rng.below(c.pN);
    if (raw == 0) return FScalar::zero(c);
    int64_t v = 0;
    while (raw % static_cast<uint64_t>(c.p) == 0) {
        raw /= static_cast<uint64_t>(c.p);
        ++v;
    }
    return FScalar::make(c, v, raw);
}

FScalar rand_unit_f(const PrecisionContext& c, Rng& rng) {
    for (;;) {
        uint64_t raw = rng.below(c.pN);
        if (raw % static_cast<uint64_t>(c.p) != 0) return FScalar::make(c, 0, raw);
    }
}

FScalar rand_unit_res(const PrecisionContext& c, Rng& rng, int64_t res) {
    if (res <= 0 || res >= c.p) fail(Error::Kind::BadInput, "rand_unit_res: residue not a unit");
    uint64_t raw = rng.below(c.pN / static_cast<uint64_t>(c.p)) * static_cast<uint64_t>(c.p) +
                   static_cast<uint64_t>(res);
    return FScalar::make(c, 0, raw);
}

namespace {

EScalar rand_int_e(const PrecisionContext& c, Rng& rng) {
    return EScalar::make(rand_int_f(c, rng), rand_int_f(c, rng));
}

EScalar rand_norm_one(const PrecisionContext& c, Rng& rng) {
    for (;;) {
        EScalar z = rand_int_e(c, rng);
        if (!z.is_zero() && z.val() == 0) return z * z.conj().inv();
    }
}

// left-multiply by [[alpha, beta], [-conj beta, conj alpha]] with
// Nm alpha + Nm beta = 1, embedded in the (i, j) plane
void apply_rotation(EMatrix& h, const PrecisionContext& c, Rng& rng, int i, int j) {
    for (;;) {
        EScalar alpha = rand_int_e(c, rng);
        auto beta = solve_norm(FScalar::one(c) - alpha.norm());
        if (!beta) continue;
        EMatrix g = EMatrix::identity(c, h.rows());
        g.at(i, i) = alpha;
        g.at(i, j) = *beta;
        g.at(j, i) = -beta->conj();
        g.at(j, j) = alpha.conj();
        h = g * h;
        return;
    }
}

EMatrix rand_unitary(const PrecisionContext& c, Rng& rng, int n) {
    std::vector<EScalar> d;
    d.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) d.push_back(rand_norm_one(c, rng));
    EMatrix h = EMatrix::diag_e(c, d);
    for (int i = 0; i + 1 < n; ++i) apply_rotation(h, c, rng, i, i + 1);
    return h;
}

}  // namespace

std::pair<EMatrix, EMatrix> rand_unitary_pair(const PrecisionContext& c, Rng& rng, int n) {
    EMatrix h1 = rand_unitary(c, rng, n);
    EMatrix h2 = rand_unitary(c, rng, n);
    return {h1, h2};
}

namespace {

// ---- serialization ----

Json fs_json(const FScalar& x) {
    if (x.is_zero()) return Json{{"zero", true}};
    return Json{{"v", x.val()}, {"u", x.digits()}};
}

FScalar fs_parse(const PrecisionContext& c, const Json& j) {
    if (j.contains("zero")) return FScalar::zero(c);
    return FScalar::from_digits(c, j.at("v").get<int64_t>(), j.at("u").get<std::string>());
}

Json es_json(const EScalar& x) { return Json{{"re", fs_json(x.re())}, {"im", fs_json(x.im())}}; }

EScalar es_parse(const PrecisionContext& c, const Json& j) {
    return EScalar::make(fs_parse(c, j.at("re")), fs_parse(c, j.at("im")));
}

Json em_json(const EMatrix& m) {
    Json rows = Json::array();
    for (int i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (int j = 0; j < m.cols(); ++j) row.push_back(es_json(m.at(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

EMatrix em_parse(const PrecisionContext& c, const Json& j) {
    int rows = static_cast<int>(j.size());
    int cols = rows ? static_cast<int>(j.at(0).size()) : 0;
    EMatrix m(c, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int k = 0; k < cols; ++k) m.at(i, k) = es_parse(c, j.at(i).at(k));
    return m;
}

Json datum_json(const Datum& d) {
    return Json{{"a", d.a},
                {"b", d.b},
                {"alpha", d.alpha_split ? "split" : "nonsplit"},
                {"beta", d.beta_split ? "split" : "nonsplit"}};
}

Datum datum_parse(const Json& j) {
    Datum d;
    d.a = j.at("a").get<int>();
    d.b = j.at("b").get<int>();
    d.alpha_split = j.at("alpha").get<std::string>() == "split";
    d.beta_split = j.at("beta").get<std::string>() == "split";
    return d;
}

Json config_json(const VerifyConfig& cfg) {
    return Json{{"p", cfg.p},
                {"N", cfg.N},
                {"n", cfg.n},
                {"datum", datum_json(cfg.datum)},
                {"trials", cfg.trials},
                {"seed", cfg.seed},
                {"window", cfg.window}};
}

// ---- shared case plumbing ----

// parity of val(1 - r^2); an exact square collapse counts as even
int lift_parity(const FScalar& r) {
    FScalar f = FScalar::one(r.ctx()) - r * r;
    return f.is_zero() ? 0 : static_cast<int>(((f.val() % 2) + 2) % 2);
}

bool resampleable(const Error& e) {
    switch (e.kind) {
        case Error::Kind::Degenerate:
        case Error::Kind::NoLift:
        case Error::Kind::PrecisionExhausted:
        case Error::Kind::WindowTooSmall:
        case Error::Kind::WindowTooLarge:
            return true;
        default:
            return false;
    }
}

Json orb_json(const ClassCounts& cc) {
    return Json{{"exists", cc.exists},
                {"nice", cc.nice.count},
                {"flipped", cc.flipped.count},
                {"kappa", cc.kappa()},
                {"windows", Json::array({cc.nice.window, cc.flipped.window})},
                {"saturated", cc.nice.saturated && cc.flipped.saturated}};
}

Json tf_json(const TransferFactor& tf) {
    // normalized so the factor carries |Res| = q^(-val Res)
    return Json{{"sign", tf.sign}, {"qexp", -tf.qexp}};
}

struct CaseResult {
    Json record;
    bool resample = false;
};

CaseResult resample_result() {
    CaseResult out;
    out.resample = true;
    return out;
}

// ---- fl / fl-lie cases ----

CaseResult run_pair_case(const Json& payload, bool lie) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>());
    Datum datum = datum_parse(payload.at("datum"));
    int64_t window = payload.at("window").get<int64_t>();
    std::string mode = payload.at("mode").get<std::string>();
    const Json& in = payload.at("inputs");

    Json rec{{"mode", mode}, {"inputs", in}};
    auto s2 = make_split_space(c, 2);
    FScalar r1 = fs_parse(c, in.at("r1"));
    FScalar r2 = fs_parse(c, in.at("r2"));

    ClassCounts cc = lie ? lie_class_counts(s2, r1, r2) : class_counts(s2, r1, r2);
    bool split_datum = datum.alpha_split && datum.beta_split;

    if (!split_datum) {
        // the unit element transfers to zero on a ramified datum, so the
        // kappa orbital must vanish: either no representative exists at all
        // (a parity obstruction) or the two class counts cancel exactly
        rec["orb"] = orb_json(cc);
        rec["so"] = 0;
        bool ok =
            cc.exists ? (cc.kappa() == 0 && cc.nice.saturated && cc.flipped.saturated) : true;
        rec["verdict"] = ok ? "pass" : "fail";
        return {std::move(rec), false};
    }

    // a root of odd lift parity has vanishing rank-one stable orbital, and
    // the kappa side then vanishes too, either with no representative at all
    // or through exact cancellation; such pairs stay in the sample as
    // vanishing instances of the identity
    int64_t so_a = lie ? lie_stable_orbital_rank1(c, r1) : stable_orbital_rank1(c, r1);
    int64_t so_b = lie ? lie_stable_orbital_rank1(c, r2) : stable_orbital_rank1(c, r2);
    rec["orb"] = orb_json(cc);
    rec["so"] = Json{{"a", so_a}, {"b", so_b}};
    int64_t lhs = cc.exists ? cc.kappa() : 0;

    bool ok;
    if (mode == "nonintegral") {
        // the factor is undefined off the integral locus; both sides vanish
        rec["delta_rel"] = nullptr;
        ok = lhs == 0 && so_a * so_b == 0;
    } else {
        TransferFactor tf = transfer_factor(EPoly::linear(EScalar::from_f(r1)),
                                            EPoly::linear(EScalar::from_f(r2)));
        rec["delta_rel"] = tf_json(tf);
        ok = lhs == tf.scaled(so_a * so_b, c);
    }
    ok = ok && (!cc.exists || (cc.nice.saturated && cc.flipped.saturated));

    if (payload.contains("conj_seed") && cc.exists) {
        // the count is a class invariant and the eigenvalues are recoverable
        // from any point of the class
        Rng crng(payload.at("conj_seed").get<uint64_t>());
        auto [h1, h2] = rand_unitary_pair(c, crng, 2);
        bool use_nice = payload.at("conj_rep").get<std::string>() == "nice";
        int64_t want = use_nice ? cc.nice.count : cc.flipped.count;
        // root recovery is well conditioned only when the roots separate in
        // the leading digits; deeper pairs put the discriminant under the
        // conjugation roundoff floor
        bool shallow = (r1 - r2).val() <= 1;
        int64_t got;
        bool recovered = false;
        EPoly f;
        if (lie) {
            auto rep = use_nice ? lie_nice_rep(s2, {r1, r2}) : lie_flipped_rep(s2, r1, r2);
            if (!rep) return resample_result();
            EMatrix y = h1 * *rep * h2.inverse();
            got = lie_orbit_count(s2, y, window).count;
            f = char_poly(lie_r(s2, y));
        } else {
            auto rep = use_nice ? nice_rep(s2, {r1, r2}) : flipped_rep(s2, r1, r2);
            if (!rep) return resample_result();
            SymPoint y = conjugate(*rep, h1, h2, 4);
            got = orbit_count(y, window).count;
            f = chi(y);
        }
        rec["conjugation"] = Json{{"rep", use_nice ? "nice" : "flipped"}, {"count", got}};
        ok = ok && got == want;
        if (shallow) {
            if (auto roots = quadratic_roots_f(EPoly::from_f_coeffs(c, f.f_coeffs(4))))
                recovered = (roots->first.eq(r1) && roots->second.eq(r2)) ||
                            (roots->first.eq(r2) && roots->second.eq(r1));
            rec["conjugation"]["recovered"] = recovered;
            ok = ok && recovered;
        }
    }

    rec["verdict"] = ok ? "pass" : "fail";
    return {std::move(rec), false};
}

// rank-one datum: the twisted and stable orbitals coincide and the factor
// is empty, so the identity is count == rank-one stable orbital
CaseResult run_rank1_case(const Json& payload, bool lie) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>());
    const Json& in = payload.at("inputs");
    Json rec{{"mode", payload.at("mode").get<std::string>()}, {"inputs", in}};
    FScalar r = fs_parse(c, in.at("r1"));
    auto s1 = make_split_space(c, 1);
    int64_t so, count;
    bool saturated;
    if (lie) {
        so = lie_stable_orbital_rank1(c, r);
        // no representative (odd valuation) means the split count is zero
        auto x = lie_nice_rep(s1, {r});
        OrbitCount oc = x ? lie_orbit_count(s1, *x) : OrbitCount{0, 0, true};
        count = oc.count;
        saturated = oc.saturated;
    } else {
        so = stable_orbital_rank1(c, r);
        // same on the group side: an odd lift parity blocks the lift
        auto x = lift_from_herm(s1, EMatrix::diag_f(c, {r}));
        OrbitCount oc = x ? orbit_count(*x) : OrbitCount{0, 0, true};
        count = oc.count;
        saturated = oc.saturated;
    }
    rec["orb"] = Json{{"count", count}, {"saturated", saturated}};
    rec["so"] = so;
    rec["verdict"] = (count == so && saturated) ? "pass" : "fail";
    return {std::move(rec), false};
}

// ---- descent cases ----

CaseResult run_descent_case(const Json& payload) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>());
    int64_t window = payload.at("window").get<int64_t>();
    std::string mode = payload.at("mode").get<std::string>();
    const Json& in = payload.at("inputs");
    Json rec{{"mode", mode}, {"inputs", in}};
    auto s2 = make_split_space(c, 2);
    FScalar r1 = fs_parse(c, in.at("r1"));
    FScalar r2 = fs_parse(c, in.at("r2"));

    ClassCounts cc = class_counts(s2, r1, r2);
    if (mode == "vanish") {
        rec["orb"] = orb_json(cc);
        bool ok =
            cc.exists ? (cc.kappa() == 0 && cc.nice.saturated && cc.flipped.saturated) : true;
        rec["verdict"] = ok ? "pass" : "fail";
        return {std::move(rec), false};
    }
    if (!cc.exists) return resample_result();

    auto nice = nice_rep(s2, {r1, r2});
    if (!nice) return resample_result();
    DescentData dd = descend(*nice);
    OrbitCount op = orbit_count(dd.plus.point, window);
    OrbitCount om = orbit_count(dd.minus.point, window);
    bool product = cc.kappa() == op.count * om.count && op.saturated && om.saturated &&
                   cc.nice.saturated && cc.flipped.saturated;

    // with one eigenvalue at each residue the within-component factors are
    // empty, so factorization says the cross-residue resultant is a unit and
    // the factor is trivial
    TransferFactor tf =
        transfer_factor(EPoly::linear(EScalar::from_f(r1)), EPoly::linear(EScalar::from_f(r2)));
    bool factor = (r1 - r2).val() == 0 && tf.sign == 1 && tf.qexp == 0;

    // eigenvalues of the order-two part are exactly +-1
    auto roots = quadratic_roots_f(EPoly::from_f_coeffs(c, chi(dd.parts.as).f_coeffs(4)));
    FScalar one = FScalar::one(c);
    bool eigres = roots && ((roots->first.eq_exact(-one) && roots->second.eq_exact(one)) ||
                            (roots->first.eq_exact(one) && roots->second.eq_exact(-one)));

    rec["orb"] = orb_json(cc);
    rec["components"] = Json{{"plus", op.count}, {"minus", om.count}};
    rec["delta_rel"] = tf_json(tf);
    rec["checks"] = Json{{"product", product}, {"factorization", factor}, {"eigenvalues", eigres}};
    rec["verdict"] = (product && factor && eigres) ? "pass" : "fail";
    return {std::move(rec), false};
}

// ---- property cases ----

// identities of the Cayley transform, checked mod p^(N-2): the case context
// carries six guard digits so a fixed near-zero threshold has that meaning
CaseResult run_cayley_case(const Json& payload) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>() + 6);
    const Json& in = payload.at("inputs");
    int n = in.at("n").get<int>();
    int nu = in.at("nu").get<int>();
    Json rec{{"mode", payload.at("mode").get<std::string>()}, {"inputs", in}};
    auto s = make_split_space(c, n);
    EMatrix x = em_parse(c, in.at("x"));
    EMatrix xb = em_parse(c, in.at("xb"));

    EMatrix delta = lie_delta(s, x);
    EScalar cond = (EMatrix::identity(c, 2 * n) - delta).det();
    if (cond.near_zero() || cond.val() > 2) return resample_result();

    SymPoint pt = cayley(s, x, nu);
    EMatrix r = lie_r(s, x);
    Json checks;
    checks["antihermitian"] = is_odd_antiherm(s, delta);
    checks["member"] = is_member(s, pt.m, 6);
    checks["roundtrip"] = (cayley_inv(pt, nu) - x).near_zero(6);
    checks["block"] = (pt.block_a() - cayley_block(r, nu)).near_zero(6);
    EMatrix nu_id = EMatrix::identity(c, n) * EScalar::from_int(c, nu);
    checks["contraction"] =
        ((pt.block_a() + nu_id) * (pt.block_a() - nu_id).inverse() - r).near_zero(6);
    EPoly f = chi(pt);
    checks["characteristic"] = (cayley_chi(f, nu) - char_poly(r)).near_zero(6);

    // equivariance under the unitary pair action
    Rng crng(payload.at("conj_seed").get<uint64_t>());
    auto [h1, h2] = rand_unitary_pair(c, crng, n);
    EMatrix xc = h1 * x * h2.inverse();
    EMatrix h = EMatrix::zero(c, 2 * n, 2 * n);
    h.set_block(0, 0, h1);
    h.set_block(n, n, h2);
    checks["equivariance"] = (cayley(s, xc, nu).m - h * pt.m * h.inverse()).near_zero(6);

    // resultant across the transform, against a rank-one partner
    auto s1 = make_split_space(c, 1);
    EScalar condb = (EMatrix::identity(c, 2) - lie_delta(s1, xb)).det();
    if (condb.near_zero() || condb.val() > 2) return resample_result();
    EPoly fb = chi(cayley(s1, xb, nu));
    EScalar lhs = resultant(cayley_chi(f, nu), cayley_chi(fb, nu));
    EScalar rhs = cayley_res_factor(f, fb, nu) * resultant(f, fb);
    checks["resultant"] = (lhs - rhs).near_zero(6);

    bool ok = true;
    for (const auto& [k, v] : checks.items()) ok = ok && v.get<bool>();
    rec["checks"] = std::move(checks);
    rec["verdict"] = ok ? "pass" : "fail";
    return {std::move(rec), false};
}

CaseResult run_tjd_case(const Json& payload) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>());
    std::string mode = payload.at("mode").get<std::string>();
    const Json& in = payload.at("inputs");
    Json rec{{"mode", mode}, {"inputs", in}};
    int n = in.at("n").get<int>();
    auto s = make_split_space(c, n);

    std::vector<FScalar> ev;
    if (in.contains("eigenvalues"))
        for (const auto& e : in.at("eigenvalues")) ev.push_back(fs_parse(c, e));

    SymPoint x = [&] {
        if (mode == "identity" || mode == "neg-identity") {
            int sgn = mode == "identity" ? 1 : -1;
            return make_point(s, EMatrix::identity(c, 2 * n) * EScalar::from_int(c, sgn));
        }
        auto base = lift_from_herm(s, EMatrix::diag_f(c, ev));
        if (!base) fail(Error::Kind::NoLift, "eigenvalues do not lift to the space");
        if (mode != "conj") return *base;
        Rng crng(payload.at("conj_seed").get<uint64_t>());
        auto [h1, h2] = rand_unitary_pair(c, crng, n);
        return conjugate(*base, h1, h2, 4);
    }();

    Json checks;
    checks["compact"] = strongly_compact(x.m);
    Tjd t = tjd(x);
    int depth = val_allowance({x.m.min_val(), x.m.min_val()});
    checks["commute"] = (t.as.m * t.tu.m - t.tu.m * t.as.m).near_zero(depth);
    checks["reassemble"] = (t.as.m * t.tu.m - x.m).near_zero(depth);
    checks["member"] = is_member(s, t.as.m, 4) && is_member(s, t.tu.m, 4);
    int64_t q = 1;
    for (int64_t i = 0; i < tjd_exponent(n); ++i) q *= c.p;
    checks["stationary"] = (t.as.m.pow(q) - t.as.m).near_zero(4);
    checks["unipotent"] = (t.tu.m - EMatrix::identity(c, 2 * n)).min_val() >= 1;
    Tjd t2 = tjd(t.as);
    checks["idempotent"] =
        t2.as.m.eq(t.as.m) && (t2.tu.m - EMatrix::identity(c, 2 * n)).near_zero();

    if (mode == "conj") {
        // uniqueness through equivariance: conjugating before or after the
        // decomposition lands on the same semisimple part
        auto base = lift_from_herm(s, EMatrix::diag_f(c, ev));
        Tjd tb = tjd(*base);
        Rng crng(payload.at("conj_seed").get<uint64_t>());
        auto [h1, h2] = rand_unitary_pair(c, crng, n);
        EMatrix h = EMatrix::zero(c, 2 * n, 2 * n);
        h.set_block(0, 0, h1);
        h.set_block(n, n, h2);
        checks["unique"] = (t.as.m - h * tb.as.m * h.inverse()).near_zero(4);
    }

    bool ok = true;
    for (const auto& [k, v] : checks.items()) ok = ok && v.get<bool>();
    rec["checks"] = std::move(checks);
    rec["verdict"] = ok ? "pass" : "fail";
    return {std::move(rec), false};
}

CaseResult run_lattice_case(const Json& payload) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>());
    const Json& in = payload.at("inputs");
    int64_t w = in.at("window").get<int64_t>();
    Json rec{{"mode", payload.at("mode").get<std::string>()}, {"inputs", in}};

    EMatrix phi = EMatrix::identity(c, 2);
    auto lats = self_dual_lattices(c, 2, phi, w);
    Json checks;
    checks["count"] = lats.size() == self_dual_count_rank2(c.p, w);
    bool dual_ok = true, shell_ok = true;
    std::vector<std::string> keys;
    keys.reserve(lats.size());
    for (const auto& l : lats) {
        dual_ok = dual_ok && l.self_dual(phi) && l.dual(phi).key() == l.key();
        shell_ok = shell_ok && l.shell() <= w;
        keys.push_back(l.key());
    }
    std::sort(keys.begin(), keys.end());
    checks["self_dual"] = dual_ok;
    checks["shells"] = shell_ok;
    checks["canonical"] = std::adjacent_find(keys.begin(), keys.end()) == keys.end();
    checks["standard_present"] =
        std::binary_search(keys.begin(), keys.end(), Lattice::standard(c, 2).key());

    bool ok = true;
    for (const auto& [k, v] : checks.items()) ok = ok && v.get<bool>();
    rec["checks"] = std::move(checks);
    rec["verdict"] = ok ? "pass" : "fail";
    return {std::move(rec), false};
}

CaseResult run_oracle_case(const Json& payload) {
    auto c = make_context(payload.at("p").get<int64_t>(), payload.at("N").get<int>());
    std::string mode = payload.at("mode").get<std::string>();
    const Json& in = payload.at("inputs");
    Json rec{{"mode", mode}, {"inputs", in}};

    std::optional<SymPoint> x;
    if (mode == "n1") {
        auto s1 = make_split_space(c, 1);
        x = lift_from_herm(s1, EMatrix::diag_f(c, {fs_parse(c, in.at("r1"))}));
    } else {
        auto s2 = make_split_space(c, 2);
        x = nice_rep(s2, {fs_parse(c, in.at("r1")), fs_parse(c, in.at("r2"))});
    }
    if (!x) return resample_result();
    OrbitCount engine = orbit_count(*x);
    int64_t oracle = oracle_orbit_count(*x, engine.window);
    rec["engine"] = Json{
        {"count", engine.count}, {"window", engine.window}, {"saturated", engine.saturated}};
    rec["oracle"] = oracle;
    rec["verdict"] = (engine.count == oracle && engine.saturated) ? "pass" : "fail";
    return {std::move(rec), false};
}

CaseResult dispatch_case(const Json& payload) {
    std::string suite = payload.at("suite").get<std::string>();
    if (suite == "fl" || suite == "fl-lie") {
        bool lie = suite == "fl-lie";
        Datum d = datum_parse(payload.at("datum"));
        if (payload.at("n").get<int>() <= 1 || d.a + d.b <= 1) return run_rank1_case(payload, lie);
        return run_pair_case(payload, lie);
    }
    if (suite == "descent") return run_descent_case(payload);
    if (suite == "cayley") return run_cayley_case(payload);
    if (suite == "tjd") return run_tjd_case(payload);
    if (suite == "lattice") return run_lattice_case(payload);
    if (suite == "oracle") return run_oracle_case(payload);
    fail(Error::Kind::BadInput, "unknown suite: " + suite);
}

// ---- drivers ----

constexpr int kResampleBudget = 100;

Json base_payload(const VerifyConfig& cfg, const std::string& suite, const std::string& mode) {
    return Json{{"suite", suite},
                {"p", cfg.p},
                {"N", cfg.N},
                {"n", cfg.n},
                {"datum", datum_json(cfg.datum)},
                {"window", cfg.window},
                {"mode", mode}};
}

// one case end to end: draw inputs, execute, resample within the budget on
// degenerate draws; the final payload is embedded in the record for replay
Json drive_case(int index, Rng& stream, const std::function<Json(Rng&)>& draw) {
    for (int attempt = 0; attempt < kResampleBudget; ++attempt) {
        Json payload = draw(stream);
        CaseResult r;
        try {
            r = dispatch_case(payload);
        } catch (const Error& e) {
            if (resampleable(e)) continue;
            Json rec{{"index", index},
                     {"mode", payload.at("mode")},
                     {"inputs", payload.at("inputs")},
                     {"verdict", std::string("error: ") + e.what()}};
            rec["replay"] = std::move(payload);
            return rec;
        } catch (const std::exception& e) {
            Json rec{{"index", index},
                     {"mode", payload.at("mode")},
                     {"verdict", std::string("error: ") + e.what()}};
            rec["replay"] = std::move(payload);
            return rec;
        }
        if (r.resample) continue;
        r.record["index"] = index;
        r.record["replay"] = std::move(payload);
        return r.record;
    }
    return Json{{"index", index}, {"verdict", "fail"}, {"note", "resample budget exhausted"}};
}

Json assemble(const std::string& suite, const VerifyConfig& cfg, Json cases, int64_t ms,
              const Json& extra_config = Json()) {
    int pass = 0, fail_n = 0;
    for (auto& rec : cases) {
        // normalize key order: index leads, replay trails
        Json norm{{"index", rec.at("index")}};
        for (auto& [k, v] : rec.items())
            if (k != "index" && k != "replay") norm[k] = v;
        if (rec.contains("replay")) norm["replay"] = rec.at("replay");
        rec = std::move(norm);
        if (rec.at("verdict").get<std::string>() == "pass")
            ++pass;
        else
            ++fail_n;
    }
    Json config = config_json(cfg);
    if (extra_config.is_object())
        for (const auto& [k, v] : extra_config.items()) config[k] = v;
    return Json{
        {"schema", "v1"},
        {"suite", suite},
        {"config", std::move(config)},
        {"cases", std::move(cases)},
        {"summary", Json{{"pass", pass}, {"fail", fail_n}, {"total", pass + fail_n}, {"ms", ms}}}};
}

using Clock = std::chrono::steady_clock;

int64_t ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - t0).count();
}

// keeps the auto-grown enumeration window within the depth the digit budget
// supports: every invariant entering the window floor stays at valuation <= 3
bool floor_ok(const FScalar& sum, const FScalar& diff) {
    return sum.val() <= 3 && diff.val() <= 3;
}

Json pair_inputs(const FScalar& r1, const FScalar& r2) {
    return Json{{"r1", fs_json(r1)}, {"r2", fs_json(r2)}};
}

std::pair<FScalar, FScalar> draw_group_pair(const PrecisionContext& c, Rng& rng,
                                            const std::string& mode) {
    for (;;) {
        FScalar r1, r2;
        if (mode == "descent") {
            r1 = FScalar::one(c) + FScalar::make(c, 2, rand_unit_f(c, rng).unit());
            r2 = -FScalar::one(c) - FScalar::make(c, 2, rand_unit_f(c, rng).unit());
        } else if (mode == "dist1" || mode == "dist2") {
            int64_t k = mode == "dist1" ? 1 : 2;
            r1 = rand_unit_f(c, rng);
            r2 = r1 + FScalar::make(c, k, rand_unit_f(c, rng).unit());
        } else {
            r1 = rand_unit_f(c, rng);
            r2 = rand_unit_f(c, rng);
            if (mode == "dist0" && (r1 - r2).val() != 0) continue;
        }
        // at p = 3 a separation of valuation one forces one odd lift parity
        // (units square to 1 mod 3), so that mode admits vanishing pairs
        if (mode != "dist1" && (lift_parity(r1) != 0 || lift_parity(r2) != 0)) continue;
        if ((FScalar::one(c) - r1 * r1).val() > 6) continue;
        if ((FScalar::one(c) - r2 * r2).val() > 6) continue;
        if (!floor_ok(r1 + r2, r1 - r2)) continue;
        return {r1, r2};
    }
}

std::pair<FScalar, FScalar> draw_vanish_pair(const PrecisionContext& c, Rng& rng,
                                             const Datum& datum) {
    auto odd_parity = [&] {
        int64_t sgn = rng.below(2) ? 1 : -1;
        return FScalar::from_int(c, sgn) + FScalar::make(c, 1, rand_unit_f(c, rng).unit());
    };
    for (;;) {
        FScalar r1 = datum.alpha_split ? rand_unit_f(c, rng) : odd_parity();
        FScalar r2 = datum.beta_split ? rand_unit_f(c, rng) : odd_parity();
        if (datum.alpha_split && lift_parity(r1) != 0) continue;
        if (datum.beta_split && lift_parity(r2) != 0) continue;
        if (!floor_ok(r1 + r2, r1 - r2)) continue;
        return {r1, r2};
    }
}

std::pair<FScalar, FScalar> draw_lie_pair(const PrecisionContext& c, Rng& rng,
                                          const std::string& mode) {
    for (;;) {
        FScalar m1, m2;
        if (mode == "deep") {
            m1 = FScalar::make(c, 2, rand_unit_f(c, rng).unit());
            m2 = rand_unit_f(c, rng);
        } else if (mode == "nonintegral") {
            m1 = FScalar::make(c, -2, rand_unit_f(c, rng).unit());
            m2 = rand_unit_f(c, rng);
            return {m1, m2};
        } else if (mode == "dist1" || mode == "dist2") {
            int64_t k = mode == "dist1" ? 1 : 2;
            m1 = rand_unit_f(c, rng);
            m2 = m1 + FScalar::make(c, k, rand_unit_f(c, rng).unit());
        } else {
            m1 = rand_unit_f(c, rng);
            m2 = rand_unit_f(c, rng);
            if (mode == "dist0" && (m1 - m2).val() != 0) continue;
        }
        if (!floor_ok(m1 + m2, m1 - m2)) continue;
        return {m1, m2};
    }
}

std::pair<FScalar, FScalar> draw_lie_vanish_pair(const PrecisionContext& c, Rng& rng,
                                                 const Datum& datum) {
    auto odd = [&] { return FScalar::make(c, 1, rand_unit_f(c, rng).unit()); };
    for (;;) {
        FScalar m1 = datum.alpha_split ? rand_unit_f(c, rng) : odd();
        FScalar m2 = datum.beta_split ? rand_unit_f(c, rng) : odd();
        if (!floor_ok(m1 + m2, m1 - m2)) continue;
        return {m1, m2};
    }
}

std::string fl_mode(const Datum& datum, int i) {
    if (!(datum.alpha_split && datum.beta_split)) return "vanish";
    switch (i % 8) {
        case 1: return "dist0";
        case 3: return "dist1";
        case 5: return "dist2";
        case 7: return "descent";
        default: return "generic";
    }
}

std::string lie_mode(const Datum& datum, int i) {
    if (!(datum.alpha_split && datum.beta_split)) return "vanish";
    switch (i % 8) {
        case 1: return "dist0";
        case 3: return "dist1";
        case 5: return "dist2";
        case 7: return i % 16 == 7 ? "deep" : "nonintegral";
        default: return "generic";
    }
}

Json drive_pair_suite(const VerifyConfig& cfg, bool lie) {
    auto t0 = Clock::now();
    auto c = make_context(cfg.p, cfg.N);
    Rng root(cfg.seed);
    Json cases = Json::array();
    const std::string suite = lie ? "fl-lie" : "fl";
    bool rank1 = cfg.n <= 1 || cfg.datum.a + cfg.datum.b <= 1;
    for (int i = 0; i < cfg.trials; ++i) {
        Rng stream = root.fork(static_cast<uint64_t>(i));
        std::string mode = rank1 ? "rank1" : lie ? lie_mode(cfg.datum, i) : fl_mode(cfg.datum, i);
        auto draw = [&](Rng& rng) {
            Json payload = base_payload(cfg, suite, mode);
            if (rank1) {
                // both parities stay in: odd ones exercise the vanishing side
                FScalar r;
                do {
                    r = rand_int_f(c, rng);
                } while (r.val() > 3 || (FScalar::one(c) - r * r).val() > 6);
                payload["inputs"] = Json{{"r1", fs_json(r)}};
                return payload;
            }
            auto [r1, r2] = mode == "vanish"
                                ? (lie ? draw_lie_vanish_pair(c, rng, cfg.datum)
                                       : draw_vanish_pair(c, rng, cfg.datum))
                            : lie ? draw_lie_pair(c, rng, mode)
                                  : draw_group_pair(c, rng, mode);
            payload["inputs"] = pair_inputs(r1, r2);
            if (mode == "generic" && i % 8 == 4) {
                payload["conj_seed"] = rng.next();
                payload["conj_rep"] = i % 16 == 4 ? "nice" : "flipped";
            }
            return payload;
        };
        cases.push_back(drive_case(i, stream, draw));
    }
    return assemble(lie ? "verify-lie" : "verify-fl", cfg, std::move(cases), ms_since(t0));
}

Json drive_descent(const VerifyConfig& cfg) {
    auto t0 = Clock::now();
    auto c = make_context(cfg.p, cfg.N);
    Rng root(cfg.seed);
    Json cases = Json::array();
    const int64_t depths[3][2] = {{1, 1}, {1, 2}, {2, 1}};
    for (int i = 0; i < cfg.trials; ++i) {
        Rng stream = root.fork(static_cast<uint64_t>(i));
        bool vanish = i % 5 == 4;
        const int64_t* d = depths[i % 3];
        std::string mode =
            vanish ? "vanish" : "split-" + std::to_string(d[0]) + std::to_string(d[1]);
        auto draw = [&](Rng& rng) {
            Json payload = base_payload(cfg, "descent", mode);
            FScalar r1, r2;
            do {
                // descent-locus residues: r1 at +1, r2 at -1; an odd depth
                // on the second root obstructs the rank-one membership
                r1 = FScalar::one(c) +
                     FScalar::make(c, vanish ? 2 : 2 * d[0], rand_unit_f(c, rng).unit());
                r2 = -FScalar::one(c) -
                     FScalar::make(c, vanish ? 1 : 2 * d[1], rand_unit_f(c, rng).unit());
            } while (!floor_ok(r1 + r2, r1 - r2));
            payload["inputs"] = pair_inputs(r1, r2);
            return payload;
        };
        cases.push_back(drive_case(i, stream, draw));
    }
    return assemble("verify-descent", cfg, std::move(cases), ms_since(t0));
}

Json drive_props(const VerifyConfig& cfg, const std::vector<std::string>& suites) {
    auto t0 = Clock::now();
    auto c = make_context(cfg.p, cfg.N);
    Rng root(cfg.seed);
    Json cases = Json::array();
    int index = 0;
    for (const auto& name : suites) {
        Rng section = root.fork(fnv1a(name));
        for (int i = 0; i < cfg.trials; ++i, ++index) {
            Rng stream = section.fork(static_cast<uint64_t>(i));
            auto draw = [&](Rng& rng) -> Json {
                if (name == "cayley") {
                    int n = 1 + i % 3;
                    Json payload = base_payload(cfg, "cayley", "n" + std::to_string(n));
                    auto cg = make_context(cfg.p, cfg.N + 6);
                    EMatrix x(cg, n, n);
                    for (int a = 0; a < n; ++a)
                        for (int b = 0; b < n; ++b) x.at(a, b) = rand_int_e(cg, rng);
                    EMatrix xb(cg, 1, 1);
                    xb.at(0, 0) = rand_int_e(cg, rng);
                    payload["inputs"] = Json{
                        {"n", n}, {"nu", i % 2 ? 1 : -1}, {"x", em_json(x)}, {"xb", em_json(xb)}};
                    payload["conj_seed"] = rng.next();
                    return payload;
                }
                if (name == "tjd") {
                    std::string mode = i == 0       ? "identity"
                                       : i == 1     ? "neg-identity"
                                       : i % 3 == 2 ? "conj"
                                                    : "herm";
                    Json payload = base_payload(cfg, "tjd", mode);
                    int n = mode == "herm" && i % 2 ? 1 : 2;
                    Json ev = Json::array();
                    for (int k = 0; k < n; ++k) {
                        FScalar e;
                        do {
                            e = rand_unit_f(c, rng);
                        } while (lift_parity(e) != 0 || (FScalar::one(c) - e * e).val() > 4);
                        ev.push_back(fs_json(e));
                    }
                    payload["inputs"] = Json{{"n", n}, {"eigenvalues", std::move(ev)}};
                    payload["conj_seed"] = rng.next();
                    return payload;
                }
                if (name == "lattice") {
                    Json payload = base_payload(cfg, "lattice", "enumerate");
                    payload["inputs"] = Json{{"window", static_cast<int64_t>(i % 4)}};
                    return payload;
                }
                if (name == "oracle") {
                    bool two = i % 5 == 4;
                    Json payload = base_payload(cfg, "oracle", two ? "n2" : "n1");
                    if (two) {
                        // a unit pair cannot have both sum and difference at
                        // positive valuation, so these caps keep the window
                        // floor at three or less while staying satisfiable
                        FScalar r1, r2;
                        do {
                            r1 = rand_unit_f(c, rng);
                            r2 = rand_unit_f(c, rng);
                        } while (lift_parity(r1) != 0 || lift_parity(r2) != 0 ||
                                 (r1 - r2).val() > 2 || (r1 + r2).val() > 2 ||
                                 (FScalar::one(c) - r1 * r1).val() > 2 ||
                                 (FScalar::one(c) - r2 * r2).val() > 2);
                        payload["inputs"] = pair_inputs(r1, r2);
                    } else {
                        FScalar r;
                        do {
                            r = rand_int_f(c, rng);
                        } while (lift_parity(r) != 0 || r.val() > 3 ||
                                 (FScalar::one(c) - r * r).val() > 4);
                        payload["inputs"] = Json{{"r1", fs_json(r)}};
                    }
                    return payload;
                }
                fail(Error::Kind::BadInput, "unknown property section: " + name);
            };
            Json rec = drive_case(index, stream, draw);
            Json norm{{"index", rec.at("index")}, {"section", name}};
            for (auto& [k, v] : rec.items())
                if (k != "index") norm[k] = v;
            cases.push_back(std::move(norm));
        }
    }
    Json names = Json::array();
    for (const auto& s : suites) names.push_back(s);
    return assemble("props", cfg, std::move(cases), ms_since(t0), Json{{"suites", names}});
}

}  // namespace

Json verify_fl(const VerifyConfig& cfg) { return drive_pair_suite(cfg, false); }
Json verify_fl_lie(const VerifyConfig& cfg) { return drive_pair_suite(cfg, true); }
Json verify_descent(const VerifyConfig& cfg) { return drive_descent(cfg); }
Json property_suite(const VerifyConfig& cfg, const std::vector<std::string>& suites) {
    return drive_props(cfg, suites);
}

Json run_case(const Json& payload) {
    CaseResult r = dispatch_case(payload);
    if (r.resample)
        fail(Error::Kind::SampleBudget, "replayed inputs hit a degenerate configuration");
    return r.record;
}

void validate_report(const Json& report) {
    auto bad = [](const std::string& msg) { fail(Error::Kind::BadInput, "report: " + msg); };
    if (!report.is_object()) bad("not an object");
    if (report.value("schema", "") != "v1") bad("unknown schema");
    if (!report.contains("suite") || !report.at("suite").is_string()) bad("missing suite");
    if (!report.contains("config") || !report.at("config").is_object()) bad("missing config");
    for (const char* k : {"p", "N", "n", "datum", "trials", "seed", "window"})
        if (!report.at("config").contains(k)) bad(std::string("config missing ") + k);
    if (!report.contains("cases") || !report.at("cases").is_array()) bad("missing cases");
    int pass = 0, fail_n = 0, idx = 0;
    for (const auto& rec : report.at("cases")) {
        if (!rec.is_object()) bad("case not an object");
        if (rec.value("index", -1) != idx++) bad("case index out of order");
        std::string v = rec.value("verdict", "");
        if (v == "pass")
            ++pass;
        else if (v == "fail" || v.rfind("error", 0) == 0)
            ++fail_n;
        else
            bad("unknown verdict");
        if (v != "pass" && !rec.contains("replay") && !rec.contains("note"))
            bad("failing case lacks a replay payload");
    }
    if (!report.contains("summary") || !report.at("summary").is_object()) bad("missing summary");
    const Json& s = report.at("summary");
    if (s.value("pass", -1) != pass || s.value("fail", -1) != fail_n ||
        s.value("total", -1) != pass + fail_n)
        bad("summary totals disagree with cases");
    if (!s.contains("ms") || !s.at("ms").is_number_integer() || s.at("ms").get<int64_t>() < 0)
        bad("missing runtime");
}

bool report_passed(const Json& report) {
    return report.at("summary").at("fail").get<int>() == 0 &&
           report.at("summary").at("total").get<int>() > 0;
}

}  // namespace usp
