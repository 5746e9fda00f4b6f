#include "usp/lattice.hpp"

#include <algorithm>
#include <deque>
#include <sstream>
#include <tuple>

namespace usp {

namespace {

FScalar mod_pk_f(const FScalar& x, int64_t k) {
    if (x.is_zero() || x.val() >= k) return FScalar::zero(x.ctx());
    if (x.val() < 0) fail(Error::Kind::NotIntegral, "mod reduction of non-integral scalar");
    const PrecisionContext& c = x.ctx();
    int64_t digits = k - x.val();
    if (digits >= c.N) return x;
    uint64_t u = x.unit() % c.ppow[digits];
    return FScalar::make(c, x.val(), u);
}

}  // namespace

EScalar mod_pk(const EScalar& x, int64_t k) {
    return {mod_pk_f(x.re(), k), mod_pk_f(x.im(), k)};
}

EMatrix hermite_normal_form(const EMatrix& m0) {
    const PrecisionContext& c = m0.ctx();
    int n = m0.rows(), r0 = m0.cols();
    EMatrix m = m0;
    // entries indistinguishable from zero at working precision are zero
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < r0; ++j)
            if (m.at(i, j).near_zero()) m.at(i, j) = EScalar::zero(c);
    if (!m.is_integral()) fail(Error::Kind::NotIntegral, "hermite form needs integral input");

    auto col_scale = [&](int j, const EScalar& s) {
        for (int i = 0; i < n; ++i) m.at(i, j) = m.at(i, j) * s;
    };
    auto col_axpy = [&](int dst, int src, const EScalar& q) {  // col_dst -= q col_src
        for (int i = 0; i < n; ++i) m.at(i, dst) = m.at(i, dst) - q * m.at(i, src);
    };
    auto col_swap = [&](int a, int b) {
        for (int i = 0; i < n; ++i) std::swap(m.at(i, a), m.at(i, b));
    };

    int right = r0;  // columns [right, r0) are finished
    std::vector<int> pivot_row;
    for (int row = n - 1; row >= 0 && right > 0; --row) {
        // least valuation in this row among unfinished columns
        int bj = -1;
        int64_t bv = VAL_INF;
        for (int j = 0; j < right; ++j)
            if (m.at(row, j).val() < bv) {
                bv = m.at(row, j).val();
                bj = j;
            }
        if (bj < 0) continue;  // row has no pivot
        if (bv >= c.N - c.slack)
            fail(Error::Kind::PrecisionExhausted, "pivot below working precision");
        --right;
        if (bj != right) col_swap(bj, right);
        // normalize the pivot to an exact power of p
        EScalar piv = m.at(row, right);
        FScalar pa = FScalar::make(c, bv, 1);
        col_scale(right, EScalar::from_f(pa) * piv.inv());
        m.at(row, right) = EScalar::from_f(pa);
        for (int j = 0; j < right; ++j) {
            if (m.at(row, j).is_zero()) continue;
            col_axpy(j, right, m.at(row, j) * EScalar::from_f(pa.inv()));
            m.at(row, j) = EScalar::zero(c);
        }
        pivot_row.push_back(row);
    }
    // columns [right, r0) hold the basis; the rest must be zero
    for (int j = 0; j < right; ++j)
        for (int i = 0; i < n; ++i)
            if (!m.at(i, j).near_zero())
                fail(Error::Kind::PrecisionExhausted, "dependent column failed to clear");
    int rank = r0 - right;
    EMatrix b = m.submatrix(0, right, n, rank);
    // pivot_row was collected bottom-up for columns right..r0-1 in descending
    // order, i.e. column k of b has pivot row pivot_row[rank-1-k]
    // reduce off-diagonal entries modulo the pivot of their row
    for (int j = 0; j < rank; ++j) {
        int prow = pivot_row[static_cast<size_t>(rank - 1 - j)];
        int64_t a = b.at(prow, j).re().val();
        for (int k = j + 1; k < rank; ++k) {
            EScalar cur = b.at(prow, k);
            if (cur.is_zero()) continue;
            EScalar rem = mod_pk(cur, a);
            EScalar q = (cur - rem) * EScalar::from_f(FScalar::make(b.ctx(), -a, 1));
            for (int i = 0; i < n; ++i) b.at(i, k) = b.at(i, k) - q * b.at(i, j);
            b.at(prow, k) = rem;
        }
    }
    return b;
}

Lattice::Lattice(const EMatrix& basis, int64_t denom) : basis_(basis), denom_(denom) {
    basis_ = hermite_normal_form(basis_);
    if (basis_.cols() == 0) fail(Error::Kind::RankDeficient, "empty lattice basis");
    // minimal denominator: strip the common power of p
    int64_t g = basis_.min_val();
    if (g != 0 && g != VAL_INF) {
        basis_ = basis_ * EScalar::from_f(FScalar::make(basis_.ctx(), -g, 1));
        denom_ -= g;
    }
}

EMatrix Lattice::embedding() const {
    return basis_ * EScalar::from_f(FScalar::make(ctx(), -denom_, 1));
}

Lattice Lattice::standard(const PrecisionContext& c, int n) {
    return Lattice(EMatrix::identity(c, n), 0);
}

std::string Lattice::key() const {
    std::ostringstream os;
    os << denom_ << "|" << basis_.rows() << "x" << basis_.cols();
    for (int i = 0; i < basis_.rows(); ++i)
        for (int j = 0; j < basis_.cols(); ++j) {
            const EScalar& x = basis_.at(i, j);
            os << "|" << x.re().val() << ":" << x.re().digits() << ":" << x.im().val() << ":"
               << x.im().digits();
        }
    return os.str();
}

bool Lattice::operator==(const Lattice& o) const { return key() == o.key(); }

bool Lattice::contains(const EMatrix& v) const {
    const PrecisionContext& c = ctx();
    int n = dim(), r = rank();
    // pivot rows of the canonical triangular basis
    std::vector<int> piv(static_cast<size_t>(r), -1);
    for (int j = 0; j < r; ++j)
        for (int i = n - 1; i >= 0; --i)
            if (!basis_.at(i, j).is_zero()) {
                piv[static_cast<size_t>(j)] = i;
                break;
            }
    for (int col = 0; col < v.cols(); ++col) {
        EMatrix rhs(c, n, 1);
        FScalar scale = FScalar::make(c, denom_, 1);
        for (int i = 0; i < n; ++i) rhs.at(i, 0) = v.at(i, col) * EScalar::from_f(scale);
        for (int j = r - 1; j >= 0; --j) {
            int i = piv[static_cast<size_t>(j)];
            EScalar x = rhs.at(i, 0) / basis_.at(i, j);
            if (!x.is_zero() && !x.is_integral() && !x.near_zero()) return false;
            for (int k = 0; k < n; ++k) rhs.at(k, 0) = rhs.at(k, 0) - x * basis_.at(k, j);
        }
        if (!rhs.near_zero()) return false;
    }
    return true;
}

bool Lattice::contains_lattice(const Lattice& o) const { return contains(o.embedding()); }

Lattice Lattice::scaled(int64_t pow) const { return Lattice(basis_, denom_ - pow); }

int64_t Lattice::shell() const {
    if (rank() != dim()) fail(Error::Kind::BadInput, "shell of a non-full lattice");
    int64_t out = std::max<int64_t>(0, -embedding().min_val());
    EMatrix binv = basis_.inverse();
    int64_t inn = std::max<int64_t>(0, -(binv.min_val() + denom_));
    return std::max(out, inn);
}

bool Lattice::stabilized_by(const EMatrix& m) const { return contains(m * embedding()); }

bool Lattice::maps_into(const EMatrix& m, const Lattice& target) const {
    return target.contains(m * embedding());
}

EMatrix Lattice::gram(const EMatrix& phi) const {
    EMatrix e = embedding();
    return e.dagger() * phi * e;
}

Lattice Lattice::dual(const EMatrix& phi) const {
    EMatrix e = embedding();
    if (rank() != dim()) fail(Error::Kind::BadInput, "dual of a non-full lattice");
    return lattice_from_columns((phi * e).inverse().dagger());
}

bool Lattice::self_dual(const EMatrix& phi) const {
    EMatrix g = gram(phi);
    if (!g.is_integral()) return false;
    return g.det().val() == 0;
}

std::string Lattice::str() const {
    std::ostringstream os;
    os << "p^-" << denom_ << " * " << basis_.str();
    return os.str();
}

Lattice lattice_from_columns(const EMatrix& cols) {
    int64_t mv = cols.min_val();
    if (mv == VAL_INF) fail(Error::Kind::RankDeficient, "zero columns");
    int64_t d = std::max<int64_t>(0, -mv);
    EMatrix scaled = cols * EScalar::from_f(FScalar::make(cols.ctx(), d, 1));
    return Lattice(scaled, d);
}

namespace {

// all solutions of s^2 = a (mod p^k), collected by level-by-level lifting
std::vector<uint64_t> sqrt_all_mod_pk(int64_t p, int k, uint64_t a) {
    uint64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= static_cast<uint64_t>(p);
    a %= pk;
    std::vector<uint64_t> sols;
    for (uint64_t s = 0; s < static_cast<uint64_t>(p); ++s)
        if ((s * s) % static_cast<uint64_t>(p) == a % static_cast<uint64_t>(p))
            sols.push_back(s);
    uint64_t mod = static_cast<uint64_t>(p);
    for (int lvl = 1; lvl < k; ++lvl) {
        uint64_t next_mod = mod * static_cast<uint64_t>(p);
        std::vector<uint64_t> next;
        for (uint64_t s : sols)
            for (uint64_t t = 0; t < static_cast<uint64_t>(p); ++t) {
                uint64_t cand = s + t * mod;
                if ((static_cast<unsigned __int128>(cand) * cand) % next_mod == a % next_mod)
                    next.push_back(cand);
            }
        sols = std::move(next);
        mod = next_mod;
    }
    std::sort(sols.begin(), sols.end());
    sols.erase(std::unique(sols.begin(), sols.end()), sols.end());
    return sols;
}

}  // namespace

std::vector<Lattice> self_dual_lattices(const PrecisionContext& c, int rank,
                                        const EMatrix& phi, int64_t window) {
    std::vector<Lattice> out;
    // determinant valuation parity obstructs self-duality outright
    int64_t dv = phi.det().val();
    if (dv % 2 != 0) return out;
    if (rank == 1) {
        // gram of p^-w O is p^-2w phi; self-dual iff 2w = val(det phi)
        Lattice l = Lattice::standard(c, 1).scaled(-dv / 2);
        if (l.self_dual(phi)) out.push_back(l);
        return out;
    }
    if (rank != 2) fail(Error::Kind::UnsupportedDegree, "self-dual enumeration beyond rank 2");
    if (!phi.eq(EMatrix::identity(c, 2)))
        fail(Error::Kind::BadInput, "rank-2 enumeration expects the identity form");
    int64_t W = window;
    if (W < 0) fail(Error::Kind::BadInput, "negative window");
    if (self_dual_count_rank2(c.p, W) > 1000000)
        fail(Error::Kind::WindowTooLarge, "window holds too many lattices");
    // basis entries carry denominators up to p^W, so gram entries reach p^-2W;
    // duality checks then need 2W digits of headroom below the working precision
    if (2 * W > c.N - c.slack - 2)
        fail(Error::Kind::PrecisionExhausted, "window too deep for the working precision");
    out.push_back(Lattice::standard(c, 2));
    // other self-dual lattices in the window: basis columns
    //   p^(W+m) e1  and  p^(W-m) (c0 e1 + e2),  1 <= m <= W,
    // where c0 runs over units modulo p^(2m) with Nm(c0) = -1 (mod p^(2m))
    for (int64_t m = 1; m <= W; ++m) {
        int64_t two_m = 2 * m;
        uint64_t pk = 1;
        for (int64_t i = 0; i < two_m; ++i) pk *= static_cast<uint64_t>(c.p);
        for (uint64_t t = 0; t < pk; ++t) {
            // s^2 - eps t^2 = -1 (mod p^2m)
            uint64_t rhs =
                (static_cast<uint64_t>((static_cast<unsigned __int128>(c.eps) * t % pk) * t % pk) +
                 pk - 1) %
                pk;
            for (uint64_t s : sqrt_all_mod_pk(c.p, static_cast<int>(two_m), rhs)) {
                if (s % static_cast<uint64_t>(c.p) == 0 && t % static_cast<uint64_t>(c.p) == 0)
                    continue;  // c0 must be a unit
                EScalar c0{FScalar::from_int(c, static_cast<int64_t>(s)),
                           FScalar::from_int(c, static_cast<int64_t>(t))};
                EMatrix b(c, 2, 2);
                b.at(0, 0) = EScalar::from_f(FScalar::make(c, W + m, 1));
                b.at(0, 1) = c0 * EScalar::from_f(FScalar::make(c, W - m, 1));
                b.at(1, 1) = EScalar::from_f(FScalar::make(c, W - m, 1));
                out.emplace_back(b, W);
            }
        }
    }
    return out;
}

uint64_t self_dual_count_rank2(int64_t p, int64_t window) {
    uint64_t q = static_cast<uint64_t>(p);
    uint64_t total = 1;
    uint64_t qpow = q;  // q^(2m-1)
    for (int64_t m = 1; m <= window; ++m) {
        total += (q + 1) * qpow;
        qpow *= q * q;
    }
    return total;
}

const std::vector<Lattice>& self_dual_cache(const PrecisionContext& c, int rank,
                                            int64_t window) {
    // entries hold pointers into their context, so they are built against an
    // interned copy that outlives any caller-owned context
    static std::deque<PrecisionContext> contexts;
    static std::map<std::tuple<int64_t, int, int, int, int64_t>, std::vector<Lattice>> cache;
    auto key = std::make_tuple(c.p, c.N, c.slack, rank, window);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const PrecisionContext* own = nullptr;
    for (const auto& k : contexts)
        if (k == c) own = &k;
    if (!own) own = &contexts.emplace_back(c);
    auto lattices = self_dual_lattices(*own, rank, EMatrix::identity(*own, rank), window);
    return cache.emplace(key, std::move(lattices)).first->second;
}

}  // namespace usp
