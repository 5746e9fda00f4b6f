#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "usp/matalg.hpp"

// O_E-lattices in E^n, held as a canonical column Hermite form over the
// local ring: an upper-triangular integral basis matrix with p-power
// diagonal, off-diagonal entries reduced modulo the diagonal of their row,
// and a global denominator exponent that is minimal.  The canonical form
// makes equality and hashing exact.

namespace usp {

// representative of x modulo p^k with digits below p^k only (k >= 1);
// exact: uses only stored digits
EScalar mod_pk(const EScalar& x, int64_t k);

class Lattice {
public:
    // lattice spanned by the columns of basis * p^-denom
    Lattice(const EMatrix& basis, int64_t denom);

    const PrecisionContext& ctx() const { return basis_.ctx(); }
    int rank() const { return basis_.cols(); }
    int dim() const { return basis_.rows(); }
    const EMatrix& basis() const { return basis_; }  // canonical, integral
    int64_t denom() const { return denom_; }
    // scaled basis columns (entries may be non-integral)
    EMatrix embedding() const;

    static Lattice standard(const PrecisionContext& c, int n);

    bool operator==(const Lattice& o) const;
    bool operator<(const Lattice& o) const { return key() < o.key(); }
    // exact digits of the canonical form, usable as a hash key
    std::string key() const;

    bool contains(const EMatrix& v) const;      // column vector, or matrix of columns
    bool contains_lattice(const Lattice& o) const;
    Lattice scaled(int64_t pow) const;          // multiply by p^pow

    // largest k with p^k L0 <= L <= p^-k L0 required; the shell of L around
    // the standard lattice (full rank only)
    int64_t shell() const;

    bool stabilized_by(const EMatrix& m) const;  // m L <= L
    // m maps this lattice into target
    bool maps_into(const EMatrix& m, const Lattice& target) const;

    // gram matrix with respect to a Hermitian form
    EMatrix gram(const EMatrix& phi) const;
    Lattice dual(const EMatrix& phi) const;
    bool self_dual(const EMatrix& phi) const;

    std::string str() const;

private:
    EMatrix basis_;
    int64_t denom_ = 0;
};

// canonical column Hermite form over O_E; zero columns are dropped, so the
// result can have fewer columns than the input (rank deficiency)
EMatrix hermite_normal_form(const EMatrix& m);

// lattice spanned by possibly dependent, possibly non-integral columns
Lattice lattice_from_columns(const EMatrix& cols);

// all self-dual lattices L with p^W L0 <= L <= p^-W L0 for the standard
// form of the given rank (identity gram).  Rank 1 and 2 supported; a form
// of odd determinant valuation has none.
std::vector<Lattice> self_dual_lattices(const PrecisionContext& c, int rank,
                                        const EMatrix& phi, int64_t window);

// closed-form count of the rank-2 enumeration, used as an independent check
uint64_t self_dual_count_rank2(int64_t p, int64_t window);

// process-wide memo of self-dual lattice lists keyed by (p, N, rank, window)
const std::vector<Lattice>& self_dual_cache(const PrecisionContext& c, int rank,
                                            int64_t window);

}  // namespace usp
