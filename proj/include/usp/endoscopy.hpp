#pragma once

#include "usp/dynamics.hpp"

// Orbit invariants inside a stable class, the canonical orbit
// representatives built from a characteristic polynomial, and transfer
// factors for matched rank-one data.

namespace usp {

enum class SplitType { Split, Inert, Ramified };

// how a separable quadratic with F coefficients factors over F: two F-roots,
// irreducible with unit discriminant, or discriminant of odd valuation;
// fails NotSquarefree on a repeated root
SplitType classify_quadratic(const EPoly& f);

// valuation parity of the phi1-length of the eigenline of a at the root
int eigenline_inv(const EMatrix& a, const EMatrix& phi1, const FScalar& root);
int eigenline_inv(const SymPoint& x, const FScalar& root);

// invariants at both roots in canonical root order (rank two); their sum
// matches the parity of val det phi1
std::pair<int, int> orbit_invariants(const SymPoint& x);

// lift of diag(roots): the representative whose eigenline invariants all
// vanish; nullopt when the determinant parity obstructs the lift
std::optional<SymPoint> nice_rep(const SpaceSpec& spec, const std::vector<FScalar>& roots);

// lift of S diag(r1, r2) S^-1 with S^dagger S = p I: the rank-two
// representative with eigenline invariants (1, 1)
std::optional<SymPoint> flipped_rep(const SpaceSpec& spec, const FScalar& r1, const FScalar& r2);

// tangent-model analogues: a block X with lie_r(X) = diag(roots), resp. its
// conjugate by S; invariants read off lie_r the same way
std::optional<EMatrix> lie_nice_rep(const SpaceSpec& spec, const std::vector<FScalar>& roots);
std::optional<EMatrix> lie_flipped_rep(const SpaceSpec& spec, const FScalar& m1,
                                       const FScalar& m2);

// both forms scaled by p: same matrices act, the lattice counts change
SpaceSpec companion_space(const SpaceSpec& spec);
SymPoint reinterpret_point(const SpaceSpec& dst, const SymPoint& x);

inline int kappa_sign(int inv) { return inv % 2 ? -1 : 1; }

// eta(Res(fa, fb)) q^(val Res), stored exactly
struct TransferFactor {
    int sign = 1;
    int64_t qexp = 0;
    int64_t scaled(int64_t count, const PrecisionContext& c) const;
};

TransferFactor transfer_factor(const EPoly& fa, const EPoly& fb);

}  // namespace usp
