#pragma once

#include <optional>

#include "usp/matalg.hpp"

// The symmetric space sitting inside a quasi-split even unitary group: fix
// V = V1 + V2 with Hermitian forms phi1, phi2 held as diagonal p-power
// matrices, the ambient form phi = diag(phi1, phi2), and the involution
// eps = diag(I, -I).  Points are matrices x in U(phi) with (eps x)^2 = I and
// tr(eps x) = 0; they carry the block shape
//   x = [[A, B], [-B~, D]],  B~ = phi2^-1 B^dagger phi1,
// with A phi1-Hermitian, D phi2-Hermitian, A^2 = I - B B~ and A B = B D.

namespace usp {

struct SpaceSpec {
    const PrecisionContext* ctx = nullptr;
    int n = 0;
    std::vector<int64_t> exps1, exps2;  // valuations of the form diagonals
    EMatrix phi1, phi2, phi, eps;

    const PrecisionContext& c() const { return *ctx; }
    int dim() const { return 2 * n; }
    // parity of val det phi_i: 0 = split (admits self-dual lattices)
    int type1() const;
    int type2() const;
    bool both_split() const { return type1() == 0 && type2() == 0; }
    std::string str() const;
};

SpaceSpec make_space(const PrecisionContext& c, int n, std::vector<int64_t> exps1,
                     std::vector<int64_t> exps2);
SpaceSpec make_split_space(const PrecisionContext& c, int n);

struct SymPoint {
    SpaceSpec spec;
    EMatrix m;

    const PrecisionContext& c() const { return spec.c(); }
    EMatrix block_a() const { return m.submatrix(0, 0, spec.n, spec.n); }
    EMatrix block_b() const { return m.submatrix(0, spec.n, spec.n, spec.n); }
    EMatrix block_d() const { return m.submatrix(spec.n, spec.n, spec.n, spec.n); }
};

// B~ = phi2^-1 B^dagger phi1 for maps V2 -> V1
EMatrix bstar(const SpaceSpec& spec, const EMatrix& b);

// extra widens the residual allowance beyond what the matrix depth implies,
// for matrices assembled through deep computation chains
bool is_unitary(const SpaceSpec& spec, const EMatrix& m, int extra = 0);
bool is_member(const SpaceSpec& spec, const EMatrix& m, int extra = 0);

// wraps after checking membership
SymPoint make_point(const SpaceSpec& spec, const EMatrix& m, int extra = 0);

// g eps g^-1 eps for unitary g; always a point of the space
SymPoint orbit_map(const SpaceSpec& spec, const EMatrix& g);

// point with the prescribed phi1-Hermitian contraction block A; nullopt when
// I - A^2 is not a phi-compatible norm (determinant valuation parity)
std::optional<SymPoint> lift_from_herm(const SpaceSpec& spec, const EMatrix& a);

// characteristic polynomial of the contraction block; coefficients lie in F
EPoly chi(const SymPoint& x);

// characteristic polynomial of the full 2n-by-2n matrix, computed from chi:
// car(t) = sum_k c_k (t^2+1)^k (2t)^(n-k)
EPoly car_from_chi(const EPoly& f);

// regular semisimple with invertible cross block and eigenvalues away from
// the fixed points of the involution
bool is_rss(const SymPoint& x);

// val chi(nu) = 0
bool very_regular(const SymPoint& x, const FScalar& nu);

// diag(h1, h2) x diag(h1, h2)^-1 for h_i unitary for phi_i; extra widens the
// membership allowance for the digits the conjugation chain loses
SymPoint conjugate(const SymPoint& x, const EMatrix& h1, const EMatrix& h2, int extra = 0);

}  // namespace usp
