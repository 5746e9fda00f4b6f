#include "usp/orbital.hpp"

#include <algorithm>
#include <string>

#include "usp/endoscopy.hpp"

namespace usp {

namespace {

bool identity_form(const std::vector<int64_t>& exps) {
    return std::all_of(exps.begin(), exps.end(), [](int64_t e) { return e == 0; });
}

// window floor from the invariants of the contraction charpoly: lattices
// fixed by the class stay within the coefficient and discriminant valuations
int64_t window_floor(const EPoly& f) {
    int64_t w = 1;
    for (int k = 0; k <= f.degree(); ++k) {
        const EScalar& ck = f.coeff(k);
        if (!ck.near_zero()) w = std::max(w, ck.val());
    }
    EScalar d = discriminant(f);
    if (!d.near_zero()) w = std::max(w, (d.val() + 1) / 2);
    return w + 1;
}

struct PairScan {
    int64_t count = 0;
    bool saturated = false;
};

// candidate lists are prefiltered by the stabilizer conditions, then pairs
// are kept when the cross maps land inside the partner lattice
PairScan scan_pairs(const std::vector<Lattice>& c1, const std::vector<Lattice>& c2,
                    const EMatrix& s1, const EMatrix& s2, const EMatrix& m21,
                    const EMatrix& m12, int64_t window) {
    std::vector<const Lattice*> k1, k2;
    for (const auto& l : c1)
        if (l.stabilized_by(s1)) k1.push_back(&l);
    for (const auto& l : c2)
        if (l.stabilized_by(s2)) k2.push_back(&l);
    PairScan out;
    int64_t max_shell = -1;
    for (const Lattice* l1 : k1)
        for (const Lattice* l2 : k2) {
            if (!l2->maps_into(m21, *l1) || !l1->maps_into(m12, *l2)) continue;
            ++out.count;
            max_shell = std::max({max_shell, l1->shell(), l2->shell()});
        }
    out.saturated = max_shell < window;
    return out;
}

const std::vector<Lattice>* factor_candidates(const PrecisionContext& c, int n,
                                              const std::vector<int64_t>& exps,
                                              const EMatrix& phi, int64_t window,
                                              std::vector<Lattice>& local) {
    if (identity_form(exps)) return &self_dual_cache(c, n, window);
    local = self_dual_lattices(c, n, phi, window);
    return &local;
}

OrbitCount grow_and_scan(const PrecisionContext& c, const SpaceSpec& spec, const EPoly& f,
                         const EMatrix& s1, const EMatrix& s2, const EMatrix& m21,
                         const EMatrix& m12, int64_t window) {
    // an inert invariant polynomial splits over the quadratic extension, so the
    // stabilizer torus is noncompact and the lattice count grows without bound;
    // classify a lenient F-projection since chained products leave roundoff in
    // the imaginary parts
    if (f.degree() == 2 && f.has_f_coeffs(4)) {
        EPoly g = EPoly::from_f_coeffs(c, f.f_coeffs(4));
        if (!discriminant(g).near_zero() && classify_quadratic(g) == SplitType::Inert)
            fail(Error::Kind::NotElliptic, "invariant polynomial is inert: count diverges");
    }
    auto run = [&](int64_t w) {
        std::vector<Lattice> loc1, loc2;
        const auto* c1 = factor_candidates(c, spec.n, spec.exps1, spec.phi1, w, loc1);
        const auto* c2 = factor_candidates(c, spec.n, spec.exps2, spec.phi2, w, loc2);
        return scan_pairs(*c1, *c2, s1, s2, m21, m12, w);
    };
    if (window >= 0) {
        PairScan s = run(window);
        return {s.count, window, s.saturated};
    }
    const int64_t floor = window_floor(f);
    for (int64_t w = floor; w <= floor + 3; ++w) {
        PairScan s = run(w);
        if (s.saturated) return {s.count, w, true};
    }
    fail(Error::Kind::WindowTooSmall,
         "orbit count did not saturate by window " + std::to_string(floor + 3));
}

}  // namespace

OrbitCount orbit_count(const SymPoint& x, int64_t window) {
    const SpaceSpec& spec = x.spec;
    if (spec.n == 0) return {1, std::max<int64_t>(window, 0), true};
    if (spec.type1() != 0 || spec.type2() != 0)
        return {0, std::max<int64_t>(window, 0), true};
    return grow_and_scan(spec.c(), spec, chi(x), x.block_a(), x.block_d(), x.block_b(),
                         bstar(spec, x.block_b()), window);
}

OrbitCount lie_orbit_count(const SpaceSpec& spec, const EMatrix& xblock, int64_t window) {
    if (spec.n == 0) return {1, std::max<int64_t>(window, 0), true};
    if (spec.type1() != 0 || spec.type2() != 0)
        return {0, std::max<int64_t>(window, 0), true};
    EMatrix xs = bstar(spec, xblock);
    return grow_and_scan(spec.c(), spec, char_poly(lie_r(spec, xblock)), xblock * xs,
                         xs * xblock, xblock, xs, window);
}

ClassCounts class_counts(const SpaceSpec& spec, const FScalar& r1, const FScalar& r2) {
    ClassCounts out;
    auto nice = nice_rep(spec, {r1, r2});
    auto flip = flipped_rep(spec, r1, r2);
    if (nice.has_value() != flip.has_value())
        fail(Error::Kind::Degenerate, "representatives disagree about the lift parity");
    if (!nice) return out;
    out.exists = true;
    out.nice = orbit_count(*nice);
    out.flipped = orbit_count(*flip);
    return out;
}

ClassCounts lie_class_counts(const SpaceSpec& spec, const FScalar& m1, const FScalar& m2) {
    ClassCounts out;
    auto nice = lie_nice_rep(spec, {m1, m2});
    auto flip = lie_flipped_rep(spec, m1, m2);
    if (nice.has_value() != flip.has_value())
        fail(Error::Kind::Degenerate, "representatives disagree about the lift parity");
    if (!nice) return out;
    out.exists = true;
    out.nice = lie_orbit_count(spec, *nice);
    out.flipped = lie_orbit_count(spec, *flip);
    return out;
}

int64_t stable_orbital_rank1(const PrecisionContext& c, const FScalar& root) {
    SpaceSpec spec = make_split_space(c, 1);
    auto x = lift_from_herm(spec, EMatrix::diag_f(c, {root}));
    if (!x) return 0;
    return orbit_count(*x).count;
}

int64_t lie_stable_orbital_rank1(const PrecisionContext& c, const FScalar& m) {
    SpaceSpec spec = make_split_space(c, 1);
    auto x = lie_nice_rep(spec, {m});
    if (!x) return 0;
    return lie_orbit_count(spec, *x).count;
}

}  // namespace usp
