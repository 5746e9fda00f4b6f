#include <deque>
#include <map>
#include <string>
#include <vector>

#include "usp/orbital.hpp"

// Independent recount of the lattice pairs fixed by a point.  Self-dual
// lattices of the standard rank-two form sit at the vertices of a tree whose
// edges are index-p exchanges: a neighbor of L is determined by an isotropic
// line of the residue Gram refined to a vector s with <s, s> = 0 mod p^2,
// and is spanned by s/p together with the part of L pairing with s into pO.
// A breadth-first walk over neighbors stays inside the window because the
// shell grows by at most one per step.  Pair membership is decided by
// conjugating x with the pair's basis matrices and testing integrality,
// independent of the engine's per-block containment path.

namespace usp {

namespace {

std::vector<EScalar> residue_reps(const PrecisionContext& c) {
    std::vector<EScalar> out;
    for (int64_t u = 0; u < c.p; ++u)
        for (int64_t v = 0; v < c.p; ++v)
            out.push_back(EScalar::from_int(c, u) +
                          EScalar::omega(c) * EScalar::from_int(c, v));
    return out;
}

std::vector<Lattice> neighbors(const Lattice& l, const std::vector<EScalar>& reps) {
    const PrecisionContext& c = l.ctx();
    EMatrix h = l.embedding();
    EMatrix g = h.dagger() * h;
    EScalar one = EScalar::one(c);
    EScalar zero = EScalar::zero(c);
    EScalar p = EScalar::from_int(c, c.p);
    EScalar pinv = EScalar::from_f(FScalar::from_ratio(c, 1, c.p));
    auto pair_g = [&](const EScalar& xa, const EScalar& xb, const EScalar& ya,
                      const EScalar& yb) {
        return xa.conj() * (g.at(0, 0) * ya + g.at(0, 1) * yb) +
               xb.conj() * (g.at(1, 0) * ya + g.at(1, 1) * yb);
    };
    std::vector<Lattice> out;

    auto try_line = [&](const EScalar& s0a, const EScalar& s0b, int comp) {
        if (pair_g(s0a, s0b, s0a, s0b).val() < 1) return;  // line not isotropic
        EScalar wa = comp == 0 ? one : zero;
        EScalar wb = comp == 0 ? zero : one;
        EScalar mu0 = pair_g(s0a, s0b, wa, wb);
        for (const auto& lam : reps) {
            EScalar cross = mu0 * lam;
            EScalar norm = pair_g(s0a, s0b, s0a, s0b) + p * (cross + cross.conj());
            if (norm.val() < 2) continue;  // refinement misses mod p^2
            EScalar sa = s0a + p * lam * wa;
            EScalar sb = s0b + p * lam * wb;
            EScalar l1 = sa.conj() * g.at(0, 0) + sb.conj() * g.at(1, 0);
            EScalar l2 = sa.conj() * g.at(0, 1) + sb.conj() * g.at(1, 1);
            if (l1.val() != 0 && l2.val() != 0)
                fail(Error::Kind::Degenerate, "walk: residue pairing degenerated");
            int j = l2.val() == 0 ? 1 : 0;
            EMatrix cols(c, 2, 3);
            for (int i = 0; i < 2; ++i) {
                cols.at(i, 0) = pinv * (h.at(i, 0) * sa + h.at(i, 1) * sb);
                cols.at(i, 1) = h.at(i, 0) * l2 - h.at(i, 1) * l1;
                cols.at(i, 2) = p * h.at(i, j);
            }
            Lattice nb = lattice_from_columns(cols);
            if (!nb.self_dual(EMatrix::identity(c, 2)))
                fail(Error::Kind::PrecisionExhausted, "walk left the self-dual family");
            out.push_back(nb);
        }
    };
    for (const auto& b : reps) try_line(one, b, 1);
    try_line(zero, one, 0);
    return out;
}

}  // namespace

std::vector<Lattice> self_dual_walk(const PrecisionContext& c, int64_t window) {
    // same depth bound as the direct enumeration: gram entries reach p^-2W
    if (2 * window > c.N - c.slack - 2)
        fail(Error::Kind::PrecisionExhausted, "window too deep for the working precision");
    auto reps = residue_reps(c);
    std::map<std::string, Lattice> seen;
    std::deque<const Lattice*> queue;
    auto push = [&](Lattice&& l) {
        if (l.shell() > window) return;
        auto [it, fresh] = seen.emplace(l.key(), std::move(l));
        if (fresh) queue.push_back(&it->second);
        if (seen.size() > 500000)
            fail(Error::Kind::WindowTooLarge, "walk produced too many lattices");
    };
    push(Lattice::standard(c, 2));
    while (!queue.empty()) {
        const Lattice* l = queue.front();
        queue.pop_front();
        for (auto& nb : neighbors(*l, reps)) push(std::move(nb));
    }
    std::vector<Lattice> out;
    out.reserve(seen.size());
    for (const auto& [key, l] : seen) out.push_back(l);
    return out;
}

int64_t oracle_orbit_count(const SymPoint& x, int64_t window) {
    const SpaceSpec& spec = x.spec;
    const PrecisionContext& c = spec.c();
    if (spec.n == 0) return 1;
    if (spec.type1() != 0 || spec.type2() != 0) return 0;
    bool standard = spec.phi.eq(EMatrix::identity(c, spec.dim()));
    if (!standard || spec.n > 2)
        fail(Error::Kind::UnsupportedDegree, "oracle covers standard forms of rank <= 2");
    if (spec.n == 1) return x.m.is_integral() ? 1 : 0;

    auto lats = self_dual_walk(c, window);
    std::vector<EMatrix> emb, inv;
    emb.reserve(lats.size());
    inv.reserve(lats.size());
    for (const auto& l : lats) {
        emb.push_back(l.embedding());
        inv.push_back(emb.back().inverse());
    }
    EMatrix a = x.block_a(), b = x.block_b(), d = x.block_d();
    EMatrix bs = bstar(spec, b);
    size_t m = lats.size();
    std::vector<char> keep_a(m), keep_d(m);
    for (size_t i = 0; i < m; ++i) {
        keep_a[i] = (inv[i] * a * emb[i]).is_integral();
        keep_d[i] = (inv[i] * d * emb[i]).is_integral();
    }
    int64_t count = 0;
    for (size_t i = 0; i < m; ++i) {
        if (!keep_a[i]) continue;
        for (size_t j = 0; j < m; ++j) {
            if (!keep_d[j]) continue;
            if (!(inv[i] * b * emb[j]).is_integral()) continue;
            if (!(inv[j] * bs * emb[i]).is_integral()) continue;
            ++count;
        }
    }
    return count;
}

}  // namespace usp
