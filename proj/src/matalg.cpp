#include "usp/matalg.hpp"

#include <algorithm>
#include <sstream>

namespace usp {

EMatrix EMatrix::identity(const PrecisionContext& c, int n) {
    EMatrix m(c, n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = EScalar::one(c);
    return m;
}

EMatrix EMatrix::diag_f(const PrecisionContext& c, const std::vector<FScalar>& d) {
    EMatrix m(c, static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i)
        m.at(static_cast<int>(i), static_cast<int>(i)) = EScalar::from_f(d[i]);
    return m;
}

EMatrix EMatrix::diag_e(const PrecisionContext& c, const std::vector<EScalar>& d) {
    EMatrix m(c, static_cast<int>(d.size()), static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i)
        m.at(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

EMatrix EMatrix::diag_powers(const PrecisionContext& c, const std::vector<int64_t>& exps) {
    EMatrix m(c, static_cast<int>(exps.size()), static_cast<int>(exps.size()));
    for (size_t i = 0; i < exps.size(); ++i)
        m.at(static_cast<int>(i), static_cast<int>(i)) =
            EScalar::from_f(FScalar::make(c, exps[i], 1));
    return m;
}

EMatrix EMatrix::operator+(const EMatrix& o) const {
    EMatrix r(*ctx_, rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] + o.data_[k];
    return r;
}

EMatrix EMatrix::operator-(const EMatrix& o) const {
    EMatrix r(*ctx_, rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] - o.data_[k];
    return r;
}

EMatrix EMatrix::operator*(const EMatrix& o) const {
    if (cols_ != o.rows_) fail(Error::Kind::BadInput, "matrix shape mismatch");
    EMatrix r(*ctx_, rows_, o.cols_);
    for (int i = 0; i < rows_; ++i)
        for (int k = 0; k < cols_; ++k) {
            const EScalar& a = at(i, k);
            if (a.is_zero()) continue;
            for (int j = 0; j < o.cols_; ++j)
                r.at(i, j) = r.at(i, j) + a * o.at(k, j);
        }
    return r;
}

EMatrix EMatrix::operator*(const EScalar& s) const {
    EMatrix r(*ctx_, rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k] * s;
    return r;
}

EMatrix EMatrix::operator-() const {
    EMatrix r(*ctx_, rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = -data_[k];
    return r;
}

EMatrix EMatrix::transpose() const {
    EMatrix r(*ctx_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
        for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
    return r;
}

EMatrix EMatrix::conj() const {
    EMatrix r(*ctx_, rows_, cols_);
    for (size_t k = 0; k < data_.size(); ++k) r.data_[k] = data_[k].conj();
    return r;
}

EMatrix EMatrix::pow(int64_t e) const {
    if (rows_ != cols_) fail(Error::Kind::BadInput, "power of non-square matrix");
    if (e < 0) return inverse().pow(-e);
    EMatrix r = identity(*ctx_, rows_);
    EMatrix b = *this;
    uint64_t m = static_cast<uint64_t>(e);
    while (m) {
        if (m & 1) r = r * b;
        b = b * b;
        m >>= 1;
    }
    return r;
}

EScalar EMatrix::trace() const {
    EScalar t = EScalar::zero(*ctx_);
    for (int i = 0; i < rows_; ++i) t = t + at(i, i);
    return t;
}

EScalar EMatrix::det() const {
    if (rows_ != cols_) fail(Error::Kind::BadInput, "determinant of non-square matrix");
    int n = rows_;
    if (n == 0) return EScalar::one(*ctx_);
    // dp over column subsets: after placing rows 0..k-1 on the columns of S
    std::vector<EScalar> dp(size_t{1} << n, EScalar::zero(*ctx_));
    dp[0] = EScalar::one(*ctx_);
    for (uint32_t s = 0; s < (uint32_t{1} << n); ++s) {
        int row = __builtin_popcount(s);
        if (row >= n || dp[s].is_zero()) continue;
        int sign_bits = 0;
        for (int j = n - 1; j >= 0; --j) {
            if (s & (uint32_t{1} << j)) {
                ++sign_bits;
                continue;
            }
            if (at(row, j).is_zero()) continue;
            EScalar term = dp[s] * at(row, j);
            dp[s | (uint32_t{1} << j)] =
                dp[s | (uint32_t{1} << j)] + ((sign_bits % 2) ? -term : term);
        }
    }
    return dp[(size_t{1} << n) - 1];
}

int64_t EMatrix::min_val() const {
    int64_t v = VAL_INF;
    for (const auto& x : data_) v = std::min(v, x.val());
    return v;
}

bool EMatrix::is_integral() const {
    for (const auto& x : data_)
        if (!x.is_integral()) return false;
    return true;
}

bool EMatrix::near_zero(int extra) const {
    for (const auto& x : data_)
        if (!x.near_zero(extra)) return false;
    return true;
}

bool EMatrix::eq(const EMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) return false;
    for (size_t k = 0; k < data_.size(); ++k)
        if (!data_[k].eq(o.data_[k])) return false;
    return true;
}

bool EMatrix::is_hermitian() const { return rows_ == cols_ && eq(dagger()); }

EMatrix EMatrix::inverse() const {
    if (rows_ != cols_) fail(Error::Kind::BadInput, "inverse of non-square matrix");
    const PrecisionContext& c = *ctx_;
    int n = rows_;
    EMatrix a = *this;
    EMatrix r = identity(c, n);
    std::vector<int> colperm(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) colperm[static_cast<size_t>(j)] = j;
    for (int k = 0; k < n; ++k) {
        // full pivot: least valuation in the remaining block
        int pi = -1, pj = -1;
        int64_t pv = VAL_INF;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j)
                if (a.at(i, j).val() < pv) {
                    pv = a.at(i, j).val();
                    pi = i;
                    pj = j;
                }
        if (pi < 0) fail(Error::Kind::Singular, "matrix is singular");
        if (pv >= c.N - c.slack)
            fail(Error::Kind::PrecisionExhausted, "pivot below working precision");
        if (pi != k)
            for (int j = 0; j < n; ++j) {
                std::swap(a.at(k, j), a.at(pi, j));
                std::swap(r.at(k, j), r.at(pi, j));
            }
        if (pj != k) {
            for (int i = 0; i < n; ++i) std::swap(a.at(i, k), a.at(i, pj));
            std::swap(colperm[static_cast<size_t>(k)], colperm[static_cast<size_t>(pj)]);
        }
        EScalar inv_p = a.at(k, k).inv();
        for (int j = 0; j < n; ++j) {
            a.at(k, j) = a.at(k, j) * inv_p;
            r.at(k, j) = r.at(k, j) * inv_p;
        }
        for (int i = 0; i < n; ++i) {
            if (i == k || a.at(i, k).is_zero()) continue;
            EScalar f = a.at(i, k);
            for (int j = 0; j < n; ++j) {
                a.at(i, j) = a.at(i, j) - f * a.at(k, j);
                r.at(i, j) = r.at(i, j) - f * r.at(k, j);
            }
        }
    }
    // undo the column permutation: we reduced A Q, so r = (A Q)^-1 = Q^-1 A^-1
    EMatrix inv(c, n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv.at(colperm[static_cast<size_t>(i)], j) = r.at(i, j);
    EMatrix probe = *this * inv;
    int extra = val_allowance({min_val(), inv.min_val()});
    if (!(probe - identity(c, n)).near_zero(extra))
        fail(Error::Kind::PrecisionExhausted, "inverse failed residual check");
    return inv;
}

EMatrix EMatrix::submatrix(int i0, int j0, int rows, int cols) const {
    EMatrix r(*ctx_, rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) r.at(i, j) = at(i0 + i, j0 + j);
    return r;
}

void EMatrix::set_block(int i0, int j0, const EMatrix& b) {
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) at(i0 + i, j0 + j) = b.at(i, j);
}

EMatrix EMatrix::hcat(const EMatrix& a, const EMatrix& b) {
    EMatrix r(a.ctx(), a.rows(), a.cols() + b.cols());
    r.set_block(0, 0, a);
    r.set_block(0, a.cols(), b);
    return r;
}

EMatrix EMatrix::vcat(const EMatrix& a, const EMatrix& b) {
    EMatrix r(a.ctx(), a.rows() + b.rows(), a.cols());
    r.set_block(0, 0, a);
    r.set_block(a.rows(), 0, b);
    return r;
}

std::string EMatrix::str() const {
    std::ostringstream os;
    for (int i = 0; i < rows_; ++i) {
        os << (i == 0 ? "[" : " ");
        for (int j = 0; j < cols_; ++j) os << at(i, j).str() << (j + 1 < cols_ ? ", " : "");
        os << (i + 1 < rows_ ? ";\n" : "]");
    }
    return os.str();
}

void EPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back().is_zero()) coeffs_.pop_back();
}

EPoly EPoly::constant(const EScalar& a) {
    EPoly f(a.ctx());
    f.coeffs_ = {a};
    f.trim();
    return f;
}

EPoly EPoly::from_f_coeffs(const PrecisionContext& c, const std::vector<FScalar>& coeffs) {
    std::vector<EScalar> e;
    e.reserve(coeffs.size());
    for (const auto& x : coeffs) e.push_back(EScalar::from_f(x));
    return EPoly(c, std::move(e));
}

EPoly EPoly::linear(const EScalar& a) {
    return EPoly(a.ctx(), {-a, EScalar::one(a.ctx())});
}

EScalar EPoly::coeff(int k) const {
    if (k < 0 || k >= static_cast<int>(coeffs_.size())) return EScalar::zero(*ctx_);
    return coeffs_[static_cast<size_t>(k)];
}

EPoly EPoly::operator+(const EPoly& o) const {
    std::vector<EScalar> r(std::max(coeffs_.size(), o.coeffs_.size()), EScalar::zero(*ctx_));
    for (size_t k = 0; k < r.size(); ++k)
        r[k] = coeff(static_cast<int>(k)) + o.coeff(static_cast<int>(k));
    return EPoly(*ctx_, std::move(r));
}

EPoly EPoly::operator-(const EPoly& o) const {
    std::vector<EScalar> r(std::max(coeffs_.size(), o.coeffs_.size()), EScalar::zero(*ctx_));
    for (size_t k = 0; k < r.size(); ++k)
        r[k] = coeff(static_cast<int>(k)) - o.coeff(static_cast<int>(k));
    return EPoly(*ctx_, std::move(r));
}

EPoly EPoly::operator*(const EPoly& o) const {
    if (coeffs_.empty() || o.coeffs_.empty()) return EPoly(*ctx_);
    std::vector<EScalar> r(coeffs_.size() + o.coeffs_.size() - 1, EScalar::zero(*ctx_));
    for (size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i].is_zero()) continue;
        for (size_t j = 0; j < o.coeffs_.size(); ++j)
            r[i + j] = r[i + j] + coeffs_[i] * o.coeffs_[j];
    }
    return EPoly(*ctx_, std::move(r));
}

EPoly EPoly::operator*(const EScalar& s) const {
    std::vector<EScalar> r = coeffs_;
    for (auto& x : r) x = x * s;
    return EPoly(*ctx_, std::move(r));
}

EScalar EPoly::eval(const EScalar& t) const {
    EScalar acc = EScalar::zero(*ctx_);
    for (size_t k = coeffs_.size(); k-- > 0;) acc = acc * t + coeffs_[k];
    return acc;
}

FScalar EPoly::eval_f(const FScalar& t) const { return eval(EScalar::from_f(t)).as_f(); }

EPoly EPoly::derivative() const {
    if (coeffs_.size() <= 1) return EPoly(*ctx_);
    std::vector<EScalar> r(coeffs_.size() - 1, EScalar::zero(*ctx_));
    for (size_t k = 1; k < coeffs_.size(); ++k)
        r[k - 1] = coeffs_[k] * EScalar::from_int(*ctx_, static_cast<int64_t>(k));
    return EPoly(*ctx_, std::move(r));
}

std::pair<EPoly, EScalar> EPoly::div_linear(const EScalar& a) const {
    if (coeffs_.empty()) return {EPoly(*ctx_), EScalar::zero(*ctx_)};
    std::vector<EScalar> q(coeffs_.size() - 1, EScalar::zero(*ctx_));
    EScalar carry = EScalar::zero(*ctx_);
    for (size_t k = coeffs_.size(); k-- > 0;) {
        EScalar cur = coeffs_[k] + carry * a;
        if (k == 0) return {EPoly(*ctx_, std::move(q)), cur};
        q[k - 1] = cur;
        carry = cur;
    }
    return {EPoly(*ctx_), EScalar::zero(*ctx_)};
}

int EPoly::root_multiplicity(const EScalar& a) const {
    EPoly f = *this;
    int m = 0;
    while (f.degree() >= 1) {
        auto [q, r] = f.div_linear(a);
        if (!r.near_zero()) break;
        ++m;
        f = q;
    }
    return m;
}

bool EPoly::near_zero(int extra) const {
    for (const auto& x : coeffs_)
        if (!x.near_zero(extra)) return false;
    return true;
}

bool EPoly::has_f_coeffs(int extra) const {
    for (const auto& x : coeffs_)
        if (!x.im().near_zero(extra)) return false;
    return true;
}

std::vector<FScalar> EPoly::f_coeffs(int extra) const {
    std::vector<FScalar> r;
    r.reserve(coeffs_.size());
    for (const auto& x : coeffs_) r.push_back(x.as_f(extra));
    return r;
}

bool EPoly::is_integral() const {
    for (const auto& x : coeffs_)
        if (!x.is_integral()) return false;
    return true;
}

std::string EPoly::str() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream os;
    for (size_t k = coeffs_.size(); k-- > 0;) {
        os << "(" << coeffs_[k].str() << ")t^" << k;
        if (k) os << " + ";
    }
    return os.str();
}

EPoly char_poly(const EMatrix& m) {
    if (m.rows() != m.cols()) fail(Error::Kind::BadInput, "char poly of non-square matrix");
    const PrecisionContext& c = m.ctx();
    int n = m.rows();
    if (n == 0) return EPoly::constant(EScalar::one(c));
    // division-free subset DP determinant of tI - M with polynomial entries
    EPoly zero(c);
    std::vector<EPoly> dp(size_t{1} << n, zero);
    dp[0] = EPoly::constant(EScalar::one(c));
    auto entry = [&](int i, int j) {
        EPoly e = EPoly::constant(-m.at(i, j));
        if (i == j) e = e + EPoly(c, {EScalar::zero(c), EScalar::one(c)});
        return e;
    };
    for (uint32_t s = 0; s < (uint32_t{1} << n); ++s) {
        int row = __builtin_popcount(s);
        if (row >= n || dp[s].degree() < 0) continue;
        int sign_bits = 0;
        for (int j = n - 1; j >= 0; --j) {
            if (s & (uint32_t{1} << j)) {
                ++sign_bits;
                continue;
            }
            EPoly term = dp[s] * entry(row, j);
            if (sign_bits % 2) term = term * EScalar::from_int(c, -1);
            dp[s | (uint32_t{1} << j)] = dp[s | (uint32_t{1} << j)] + term;
        }
    }
    return dp[(size_t{1} << n) - 1];
}

EScalar resultant(const EPoly& f, const EPoly& g) {
    const PrecisionContext& c = f.ctx();
    int df = f.degree(), dg = g.degree();
    if (df < 0 || dg < 0) return EScalar::zero(c);
    if (df == 0) return f.coeff(0).pow(dg);
    if (dg == 0) return g.coeff(0).pow(df);
    if (!f.coeff(df).is_unit() || !g.coeff(dg).is_unit())
        fail(Error::Kind::BadInput, "resultant requires unit leading coefficients");
    EMatrix syl(c, df + dg, df + dg);
    for (int r = 0; r < dg; ++r)
        for (int k = 0; k <= df; ++k) syl.at(r, r + k) = f.coeff(df - k);
    for (int r = 0; r < df; ++r)
        for (int k = 0; k <= dg; ++k) syl.at(dg + r, r + k) = g.coeff(dg - k);
    return syl.det();
}

EScalar discriminant(const EPoly& f) {
    const PrecisionContext& c = f.ctx();
    int d = f.degree();
    if (d < 1) fail(Error::Kind::BadInput, "discriminant needs degree >= 1");
    if (!f.coeff(d).is_unit())
        fail(Error::Kind::BadInput, "discriminant requires unit leading coefficient");
    if (d == 1) return EScalar::one(c);
    EScalar r = resultant(f, f.derivative());
    int sign = ((static_cast<int64_t>(d) * (d - 1) / 2) % 2) ? -1 : 1;
    return r * EScalar::from_int(c, sign) * f.coeff(d).inv();
}

namespace {

// deterministic order: valuation, then unit digits
bool f_less(const FScalar& a, const FScalar& b) {
    if (a.is_zero() || b.is_zero()) return !a.is_zero() ? false : !b.is_zero();
    if (a.val() != b.val()) return a.val() < b.val();
    return a.unit() < b.unit();
}

}  // namespace

std::optional<std::pair<FScalar, FScalar>> quadratic_roots_f(const EPoly& f) {
    const PrecisionContext& c = f.ctx();
    if (f.degree() != 2 || !f.has_f_coeffs())
        fail(Error::Kind::BadInput, "expected a quadratic with base-field coefficients");
    FScalar a2 = f.coeff(2).as_f(), a1 = f.coeff(1).as_f(), a0 = f.coeff(0).as_f();
    FScalar disc = a1 * a1 - FScalar::from_int(c, 4) * a2 * a0;
    if (disc.is_zero()) {
        FScalar r = -a1 / (FScalar::from_int(c, 2) * a2);
        return std::make_pair(r, r);
    }
    auto s = hensel_sqrt(disc);
    if (!s) return std::nullopt;
    FScalar two_a = FScalar::from_int(c, 2) * a2;
    FScalar r1 = (-a1 + *s) / two_a;
    FScalar r2 = (-a1 - *s) / two_a;
    if (f_less(r2, r1)) std::swap(r1, r2);
    return std::make_pair(r1, r2);
}

namespace {

// T with T M T^dagger diagonal, via symmetric elimination on the entry of
// least valuation; an off-diagonal minimum is first folded onto the diagonal
// by a row+column operation with u in {1, omega}
std::pair<EMatrix, EMatrix> herm_reduce(const EMatrix& m0) {
    const PrecisionContext& c = m0.ctx();
    int n = m0.rows();
    EMatrix m = m0;
    EMatrix t = EMatrix::identity(c, n);
    auto add_row = [&](int dst, int src, const EScalar& u) {
        // row_dst += u row_src and col_dst += conj(u) col_src, tracked in t
        for (int j = 0; j < n; ++j) {
            m.at(dst, j) = m.at(dst, j) + u * m.at(src, j);
            t.at(dst, j) = t.at(dst, j) + u * t.at(src, j);
        }
        for (int i = 0; i < n; ++i) m.at(i, dst) = m.at(i, dst) + u.conj() * m.at(i, src);
    };
    auto swap_rc = [&](int a, int b) {
        for (int j = 0; j < n; ++j) {
            std::swap(m.at(a, j), m.at(b, j));
            std::swap(t.at(a, j), t.at(b, j));
        }
        for (int i = 0; i < n; ++i) std::swap(m.at(i, a), m.at(i, b));
    };
    for (int k = 0; k < n; ++k) {
        int bi = -1, bj = -1;
        int64_t bv = VAL_INF;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j)
                if (m.at(i, j).val() < bv) {
                    bv = m.at(i, j).val();
                    bi = i;
                    bj = j;
                }
        // a diagonal entry of minimal valuation avoids the folding step (and
        // folding assumes all diagonals sit strictly above the minimum)
        for (int i = k; i < n; ++i)
            if (m.at(i, i).val() == bv) {
                bi = bj = i;
                break;
            }
        if (bv == VAL_INF) fail(Error::Kind::Degenerate, "form is degenerate");
        if (bv >= c.N - c.slack)
            fail(Error::Kind::PrecisionExhausted, "form entries below working precision");
        if (bi != bj) {
            // fold the minimal off-diagonal entry onto the diagonal
            EScalar a = m.at(bi, bj);
            EScalar u = EScalar::one(c);
            if (a.re().val() > a.im().val()) u = EScalar::omega(c);
            add_row(bi, bj, u);
            if (m.at(bi, bi).val() != bv)
                fail(Error::Kind::PrecisionExhausted, "pivot folding lost valuation");
            bj = bi;
        }
        if (bi != k) swap_rc(bi, k);
        EScalar piv = m.at(k, k);
        for (int i = k + 1; i < n; ++i) {
            if (m.at(i, k).is_zero()) continue;
            add_row(i, k, -(m.at(i, k) / piv));
        }
    }
    return {t, m};
}

}  // namespace

std::optional<EMatrix> congruence_solve(const EMatrix& h, const EMatrix& g) {
    const PrecisionContext& c = h.ctx();
    int n = h.rows();
    if (g.rows() != n || h.cols() != n || g.cols() != n)
        fail(Error::Kind::BadInput, "congruence solve needs equal square sizes");
    auto [th, dh] = herm_reduce(h);
    auto [tg, dg] = herm_reduce(g);
    auto parity_of = [&](const EMatrix& d) {
        int64_t v = 0;
        for (int i = 0; i < n; ++i) v += d.at(i, i).as_f().val();
        return static_cast<int>(((v % 2) + 2) % 2);
    };
    if (parity_of(dh) != parity_of(dg)) return std::nullopt;
    // reduce each form to diag(1,...,1[,p]); B = T_h^-1 T_g then maps g to h
    auto full = [&](const EMatrix& form) {
        auto [t, d] = herm_reduce(form);
        // scale rows so each diagonal entry becomes p^(0 or 1)
        std::vector<int> odd;
        for (int i = 0; i < n; ++i) {
            FScalar di = d.at(i, i).as_f();
            int64_t parity = ((di.val() % 2) + 2) % 2;
            FScalar target = FScalar::make(c, parity, 1);
            auto z = solve_norm(target / di);
            if (!z) fail(Error::Kind::PrecisionExhausted, "diagonal normalization failed");
            for (int j = 0; j < n; ++j) t.at(i, j) = *z * t.at(i, j);
            if (parity) odd.push_back(i);
        }
        // (U/p) diag(p,p) (U/p)^dagger = I for the split pair unit U, which
        // turns each pair of p's into a pair of 1's
        EMatrix u = split_pair_unit(c);
        EScalar pinv = EScalar::from_f(FScalar::pi(c)).inv();
        for (size_t k = 0; k + 1 < odd.size(); k += 2) {
            int i1 = odd[k], i2 = odd[k + 1];
            for (int j = 0; j < n; ++j) {
                EScalar r1 = t.at(i1, j), r2 = t.at(i2, j);
                t.at(i1, j) = pinv * (u.at(0, 0) * r1 + u.at(0, 1) * r2);
                t.at(i2, j) = pinv * (u.at(1, 0) * r1 + u.at(1, 1) * r2);
            }
        }
        if (odd.size() % 2 && odd.back() != n - 1) {
            int i1 = odd.back();
            for (int j = 0; j < n; ++j) std::swap(t.at(i1, j), t.at(n - 1, j));
        }
        return t;
    };
    EMatrix ah = full(h);
    EMatrix ag = full(g);
    // ah h ah^dagger = D = ag g ag^dagger, so B = ah^-1 ag satisfies B g B^dagger = h
    EMatrix b = ah.inverse() * ag;
    EMatrix probe = b * g * b.dagger();
    int extra = val_allowance({b.min_val(), g.min_val(), b.min_val(), h.min_val()});
    if (!(probe - h).near_zero(extra))
        fail(Error::Kind::PrecisionExhausted, "congruence residual check failed");
    return b;
}

std::optional<EMatrix> herm_factor(const EMatrix& h) {
    return congruence_solve(h, EMatrix::identity(h.ctx(), h.rows()));
}

EMatrix split_pair_unit(const PrecisionContext& c) {
    auto b = solve_norm(FScalar::from_int(c, c.p - 1));
    if (!b) fail(Error::Kind::PrecisionExhausted, "no element of norm p-1");
    EMatrix u(c, 2, 2);
    u.at(0, 0) = EScalar::one(c);
    u.at(0, 1) = *b;
    u.at(1, 0) = -b->conj();
    u.at(1, 1) = EScalar::one(c);
    return u;
}

EMatrix kernel_vector(const EMatrix& m) {
    const PrecisionContext& c = m.ctx();
    int n = m.rows();
    // eliminate to find the column of the adjugate-like complement: run
    // elimination with full pivoting for n-1 steps, then read the kernel
    EMatrix a = m;
    std::vector<int> colperm(static_cast<size_t>(n));
    for (int j = 0; j < n; ++j) colperm[static_cast<size_t>(j)] = j;
    int steps = 0;
    for (int k = 0; k < n; ++k) {
        int pi = -1, pj = -1;
        int64_t pv = VAL_INF;
        for (int i = k; i < n; ++i)
            for (int j = k; j < n; ++j)
                if (!a.at(i, j).near_zero() && a.at(i, j).val() < pv) {
                    pv = a.at(i, j).val();
                    pi = i;
                    pj = j;
                }
        if (pi < 0) break;
        if (pi != k)
            for (int j = 0; j < n; ++j) std::swap(a.at(k, j), a.at(pi, j));
        if (pj != k) {
            for (int i = 0; i < n; ++i) std::swap(a.at(i, k), a.at(i, pj));
            std::swap(colperm[static_cast<size_t>(k)], colperm[static_cast<size_t>(pj)]);
        }
        EScalar inv_p = a.at(k, k).inv();
        for (int j = 0; j < n; ++j) a.at(k, j) = a.at(k, j) * inv_p;
        for (int i = 0; i < n; ++i) {
            if (i == k) continue;
            EScalar f = a.at(i, k);
            if (f.is_zero()) continue;
            for (int j = 0; j < n; ++j) a.at(i, j) = a.at(i, j) - f * a.at(k, j);
        }
        ++steps;
    }
    if (steps != n - 1) fail(Error::Kind::RankDeficient, "kernel is not one-dimensional");
    // kernel of the reduced system: x_perm = (-a(0,n-1), ..., -a(n-2,n-1), 1)
    EMatrix v(c, n, 1);
    for (int i = 0; i < n - 1; ++i) v.at(colperm[static_cast<size_t>(i)], 0) = -a.at(i, n - 1);
    v.at(colperm[static_cast<size_t>(n - 1)], 0) = EScalar::one(c);
    // clear denominators and common p powers so the vector is primitive
    int64_t mv = v.min_val();
    if (mv != 0 && mv != VAL_INF) {
        EScalar scale = EScalar::from_f(FScalar::make(c, -mv, 1));
        v = v * scale;
    }
    return v;
}

}  // namespace usp
