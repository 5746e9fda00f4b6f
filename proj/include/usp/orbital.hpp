#pragma once

#include "usp/endoscopy.hpp"
#include "usp/lattice.hpp"

// Orbital integrals of the unit Hecke element as exact lattice counts.  A
// point x = [[A, B], [-B~, D]] fixes the pair (L1, L2) of self-dual lattices
// when A L1 <= L1, D L2 <= L2, B L2 <= L1 and B~ L1 <= L2; the orbital
// integral is the number of such pairs.  Candidates are enumerated inside a
// window that grows until no qualifying lattice touches its boundary.

namespace usp {

struct OrbitCount {
    int64_t count = 0;
    int64_t window = 0;
    bool saturated = false;  // no qualifying lattice sits on the boundary shell
};

// window < 0 grows the window from an invariant-derived floor until the
// count saturates and fails WindowTooSmall past a fixed cap; an explicit
// window runs a single enumeration and reports saturation as observed
OrbitCount orbit_count(const SymPoint& x, int64_t window = -1);

// tangent-model count: pairs with X L2 <= L1 and X~ L1 <= L2
OrbitCount lie_orbit_count(const SpaceSpec& spec, const EMatrix& xblock, int64_t window = -1);

// counts over both representatives of the stable class with the given
// contraction eigenvalues, anchored at the vanishing-invariant one
struct ClassCounts {
    bool exists = false;  // determinant parity admits representatives
    OrbitCount nice, flipped;
    int64_t kappa() const { return nice.count - flipped.count; }
    int64_t stable() const { return nice.count + flipped.count; }
};

ClassCounts class_counts(const SpaceSpec& spec, const FScalar& r1, const FScalar& r2);
ClassCounts lie_class_counts(const SpaceSpec& spec, const FScalar& m1, const FScalar& m2);

// rank-one stable orbital integral of the class with the given eigenvalue:
// the count in the split space when the class lifts there, else zero (the
// other packet members have an odd-type factor and carry no lattice pairs)
int64_t stable_orbital_rank1(const PrecisionContext& c, const FScalar& root);
int64_t lie_stable_orbital_rank1(const PrecisionContext& c, const FScalar& m);

// independent recount used to validate the engine: self-dual lattices are
// collected by walking their neighbor tree (isotropic residue lines refined
// mod p^2) rather than by the arithmetic enumeration, and a pair qualifies
// when conjugating x by the pair's basis matrices lands in integral matrices
std::vector<Lattice> self_dual_walk(const PrecisionContext& c, int64_t window);
int64_t oracle_orbit_count(const SymPoint& x, int64_t window);

}  // namespace usp
