#pragma once

#include "usp/lattice.hpp"
#include "usp/symspace.hpp"

// Maps between the space and its odd tangent block (Cayley transforms),
// topological Jordan decomposition inside the space, and descent to the
// eigenspaces of the order-two semisimple part.

namespace usp {

// delta = [[0, X], [-X~, 0]], the odd anti-Hermitian extension of a block X
EMatrix lie_delta(const SpaceSpec& spec, const EMatrix& x_block);
bool is_odd_antiherm(const SpaceSpec& spec, const EMatrix& delta);

// -X X~, the Hermitian block carrying the invariants of delta
EMatrix lie_r(const SpaceSpec& spec, const EMatrix& x_block);

// -nu (I + M)(I - M)^-1; the same Moebius formula acts on points and on
// their contraction blocks
EMatrix cayley_block(const EMatrix& m, int nu);

// point -nu (I + delta)(I - delta)^-1; fails Degenerate when I - delta is
// singular
SymPoint cayley(const SpaceSpec& spec, const EMatrix& x_block, int nu);

// upper-right block of delta = (x - nu)^-1 (x + nu), inverse to cayley;
// fails Degenerate when nu is an eigenvalue of x
EMatrix cayley_inv(const SymPoint& x, int nu);

// characteristic polynomial of lie_r of the preimage in terms of the one of
// the contraction block: g(t) = f(nu)^-1 sum_k c_k nu^k (t+1)^k (t-1)^(d-k)
EPoly cayley_chi(const EPoly& f, int nu);

// (-2nu)^(ab) / (f(nu)^b g(nu)^a) for a = deg f, b = deg g; multiplying
// Res(f, g) by this gives the resultant of the transformed pair
EScalar cayley_res_factor(const EPoly& f, const EPoly& g, int nu);

// z^(p^l) is stationary on Teichmueller parts of degree <= dim once
// l = lcm(1, ..., 2 dim)
int64_t tjd_exponent(int dim);

// integral characteristic polynomial with unit constant term
bool strongly_compact(const EMatrix& m);

struct Tjd {
    SymPoint as;  // semisimple part, of finite order prime to p
    SymPoint tu;  // topologically unipotent part
    int iterations = 0;
};

// x = as tu with the parts commuting powers of x; fails NotStronglyCompact
// or NonConvergence
Tjd tjd(const SymPoint& x);

struct DescentComponent {
    SpaceSpec spec;  // rank-r factor pair with forms read off the Gram
    SymPoint point;  // x restricted to the eigenspace, in the new basis
    EMatrix embed;   // 2n x 2r with embed^dagger phi embed = component form
};

struct DescentData {
    Tjd parts;
    DescentComponent plus, minus;  // eigenvalue +1 and -1 of the semisimple part
};

// splits x along the +-1 eigenspaces of its semisimple part; fails
// NotInDescentLocus when other eigenvalues occur or a space splits unevenly
DescentData descend(const SymPoint& x);

}  // namespace usp
