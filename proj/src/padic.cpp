#include "usp/padic.hpp"

#include <algorithm>
#include <cstdlib>

namespace usp {

void fail(Error::Kind k, const std::string& msg) { throw Error(k, msg); }

namespace {

uint64_t mulmod(uint64_t a, uint64_t b, uint64_t m) {
    return static_cast<uint64_t>((static_cast<unsigned __int128>(a) * b) % m);
}

uint64_t powmod(uint64_t a, uint64_t e, uint64_t m) {
    uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod(r, a, m);
        a = mulmod(a, a, m);
        e >>= 1;
    }
    return r;
}

// multiplicative inverse of a unit mod p^N via Euler's theorem
uint64_t invmod_unit(uint64_t u, const PrecisionContext& c) {
    // phi(p^N) = p^(N-1)(p-1)
    uint64_t phi = (c.pN / static_cast<uint64_t>(c.p)) * static_cast<uint64_t>(c.p - 1);
    return powmod(u, phi - 1, c.pN);
}

bool is_qr_mod_p(int64_t a, int64_t p) {
    a %= p;
    if (a < 0) a += p;
    if (a == 0) return true;
    for (int64_t t = 1; t < p; ++t)
        if ((t * t) % p == a) return true;
    return false;
}

}  // namespace

PrecisionContext make_context(int64_t p, int N, int slack) {
    if (p < 3 || p > 61 || N < slack + 2 || N > 38 || slack < 1)
        fail(Error::Kind::BadInput, "bad precision parameters");
    for (int64_t d = 2; d * d <= p; ++d)
        if (p % d == 0) fail(Error::Kind::BadInput, "p must be prime");
    PrecisionContext c;
    c.p = p;
    c.N = N;
    c.slack = slack;
    c.ppow[0] = 1;
    for (int k = 1; k <= N; ++k) {
        if (c.ppow[k - 1] > (uint64_t{1} << 62) / static_cast<uint64_t>(p))
            fail(Error::Kind::BadInput, "p^N exceeds 2^62");
        c.ppow[k] = c.ppow[k - 1] * static_cast<uint64_t>(p);
    }
    c.pN = c.ppow[N];
    c.eps = 0;
    for (int64_t e = 2; e < p; ++e)
        if (!is_qr_mod_p(e, p)) {
            c.eps = e;
            break;
        }
    if (c.eps == 0) fail(Error::Kind::BadInput, "no quadratic non-residue");
    return c;
}

FScalar FScalar::from_int(const PrecisionContext& c, int64_t n) {
    if (n == 0) return zero(c);
    int64_t v = 0;
    bool neg = n < 0;
    uint64_t m = neg ? static_cast<uint64_t>(-(n + 1)) + 1 : static_cast<uint64_t>(n);
    while (m % static_cast<uint64_t>(c.p) == 0) {
        m /= static_cast<uint64_t>(c.p);
        ++v;
    }
    uint64_t u = m % c.pN;
    if (neg) u = (c.pN - u) % c.pN;
    return make(c, v, u);
}

FScalar FScalar::from_ratio(const PrecisionContext& c, int64_t num, int64_t den) {
    if (den == 0) fail(Error::Kind::ZeroArgument, "zero denominator");
    return from_int(c, num) / from_int(c, den);
}

FScalar FScalar::make(const PrecisionContext& c, int64_t v, uint64_t u) {
    u %= c.pN;
    if (u == 0) return zero(c);
    if (u % static_cast<uint64_t>(c.p) == 0)
        fail(Error::Kind::BadInput, "unit part divisible by p");
    FScalar x;
    x.ctx_ = &c;
    x.zero_ = false;
    x.v_ = v;
    x.u_ = u;
    return x;
}

int64_t FScalar::residue_digit() const {
    if (zero_) return 0;
    return static_cast<int64_t>(u_ % static_cast<uint64_t>(ctx_->p));
}

int64_t FScalar::residue() const {
    if (zero_) return 0;
    if (v_ < 0) fail(Error::Kind::NotIntegral, "residue of non-integral scalar");
    if (v_ > 0) return 0;
    return residue_digit();
}

FScalar FScalar::operator-() const {
    if (zero_) return *this;
    FScalar x = *this;
    x.u_ = ctx_->pN - u_;
    return x;
}

FScalar FScalar::operator+(const FScalar& o) const {
    if (zero_) return o;
    if (o.zero_) return *this;
    const PrecisionContext& c = *ctx_;
    const FScalar *lo = this, *hi = &o;
    if (lo->v_ > hi->v_) std::swap(lo, hi);
    int64_t dv = hi->v_ - lo->v_;
    if (dv >= c.N) return *lo;  // the higher term is invisible at working precision
    uint64_t sum = (lo->u_ + mulmod(hi->u_, c.ppow[dv], c.pN)) % c.pN;
    if (sum == 0) return zero(c);  // cancellation past all working digits
    int64_t shift = 0;
    while (sum % static_cast<uint64_t>(c.p) == 0) {
        sum /= static_cast<uint64_t>(c.p);
        ++shift;
    }
    // digits vacated by the shift are unknown; they enter as zeros, which is
    // what the slack in eq() absorbs
    return make(c, lo->v_ + shift, sum);
}

FScalar FScalar::operator*(const FScalar& o) const {
    if (zero_ || o.zero_) return zero(ctx_ ? *ctx_ : o.ctx());
    return make(*ctx_, v_ + o.v_, mulmod(u_, o.u_, ctx_->pN));
}

FScalar FScalar::inv() const {
    if (zero_) fail(Error::Kind::ZeroArgument, "inverse of zero");
    return make(*ctx_, -v_, invmod_unit(u_, *ctx_));
}

FScalar FScalar::pow(int64_t e) const {
    const PrecisionContext& c = *ctx_;
    if (e == 0) return one(c);
    if (zero_) {
        if (e < 0) fail(Error::Kind::ZeroArgument, "negative power of zero");
        return zero(c);
    }
    FScalar b = e < 0 ? inv() : *this;
    uint64_t m = e < 0 ? static_cast<uint64_t>(-(e + 1)) + 1 : static_cast<uint64_t>(e);
    FScalar r = one(c);
    while (m) {
        if (m & 1) r = r * b;
        b = b * b;
        m >>= 1;
    }
    return r;
}

bool FScalar::eq_exact(const FScalar& o) const {
    if (zero_ || o.zero_) return zero_ == o.zero_;
    return v_ == o.v_ && u_ == o.u_;
}

bool FScalar::near_zero(int extra) const {
    if (zero_) return true;
    if (ctx_->N - ctx_->slack - extra < 1)
        fail(Error::Kind::PrecisionExhausted, "comparison allowance used up all digits");
    return v_ >= ctx_->N - ctx_->slack - extra;
}

bool FScalar::eq(const FScalar& o) const { return (*this - o).near_zero(); }

std::string FScalar::digits() const {
    if (zero_) return "";
    std::string s;
    uint64_t u = u_;
    for (int k = 0; k < ctx_->N; ++k) {
        s += static_cast<char>('0' + static_cast<int>(u % static_cast<uint64_t>(ctx_->p)));
        u /= static_cast<uint64_t>(ctx_->p);
    }
    return s;
}

FScalar FScalar::from_digits(const PrecisionContext& c, int64_t v, const std::string& digits) {
    if (digits.empty()) return zero(c);
    if (static_cast<int>(digits.size()) != c.N)
        fail(Error::Kind::BadInput, "digit string length != N");
    uint64_t u = 0;
    for (int k = c.N - 1; k >= 0; --k) {
        int d = digits[static_cast<size_t>(k)] - '0';
        if (d < 0 || d >= c.p) fail(Error::Kind::BadInput, "digit out of range");
        u = u * static_cast<uint64_t>(c.p) + static_cast<uint64_t>(d);
    }
    return make(c, v, u);
}

std::string FScalar::str() const {
    if (zero_) return "0";
    return "p^" + std::to_string(v_) + "*[" + digits() + "]";
}

int eta(const FScalar& x) {
    if (x.is_zero()) fail(Error::Kind::ZeroArgument, "character of zero");
    return (x.val() % 2 == 0) ? 1 : -1;
}

std::optional<FScalar> hensel_sqrt(const FScalar& x) {
    if (x.is_zero()) return FScalar::zero(x.ctx());
    const PrecisionContext& c = x.ctx();
    if (x.val() % 2 != 0) return std::nullopt;
    int64_t r0 = 0;
    int64_t a = x.residue_digit();
    for (int64_t t = 1; t < c.p; ++t)
        if ((t * t) % c.p == a) {
            r0 = t;
            break;
        }
    if (r0 == 0) return std::nullopt;
    if (r0 > (c.p - 1) / 2) r0 = c.p - r0;  // canonical branch
    FScalar u = FScalar::make(c, 0, static_cast<uint64_t>(r0));
    FScalar target = FScalar::make(c, 0, x.unit());
    FScalar half = FScalar::from_ratio(c, 1, 2);
    for (int it = 0; it < c.N + 2; ++it) {
        FScalar err = u * u - target;
        if (err.is_zero() || err.val() >= c.N) break;
        u = u - half * err * u.inv();  // Newton step for u^2 - target
    }
    return FScalar::make(c, x.val() / 2, u.unit());
}

FScalar EScalar::norm() const { return a_ * a_ - FScalar::from_int(ctx(), ctx().eps) * b_ * b_; }

FScalar EScalar::trace() const { return a_ + a_; }

FScalar EScalar::as_f(int extra) const {
    if (!b_.near_zero(extra)) fail(Error::Kind::BadInput, "scalar not in the base field");
    return a_;
}

EScalar EScalar::operator*(const EScalar& o) const {
    FScalar e = FScalar::from_int(ctx(), ctx().eps);
    return {a_ * o.a_ + e * (b_ * o.b_), a_ * o.b_ + b_ * o.a_};
}

EScalar EScalar::inv() const {
    if (is_zero()) fail(Error::Kind::ZeroArgument, "inverse of zero");
    FScalar n = norm();
    if (n.is_zero()) fail(Error::Kind::ZeroArgument, "zero-norm scalar has no inverse");
    FScalar ni = n.inv();
    return {a_ * ni, -(b_ * ni)};
}

EScalar EScalar::pow(int64_t e) const {
    const PrecisionContext& c = ctx();
    if (e == 0) return one(c);
    if (is_zero()) {
        if (e < 0) fail(Error::Kind::ZeroArgument, "negative power of zero");
        return zero(c);
    }
    EScalar b = e < 0 ? inv() : *this;
    uint64_t m = e < 0 ? static_cast<uint64_t>(-(e + 1)) + 1 : static_cast<uint64_t>(e);
    EScalar r = one(c);
    while (m) {
        if (m & 1) r = r * b;
        b = b * b;
        m >>= 1;
    }
    return r;
}

std::string EScalar::str() const { return a_.str() + " + w*(" + b_.str() + ")"; }

namespace {

// Newton refinement for sqrt in E starting from a residue-field root
EScalar newton_sqrt_e(const EScalar& start, const EScalar& target) {
    const PrecisionContext& c = target.ctx();
    EScalar u = start;
    EScalar half = EScalar::from_f(FScalar::from_ratio(c, 1, 2));
    for (int it = 0; it < c.N + 2; ++it) {
        EScalar err = u * u - target;
        if (err.is_zero() || err.val() >= c.N) break;
        u = u - half * err * u.inv();
    }
    return u;
}

}  // namespace

std::optional<EScalar> hensel_sqrt_e(const EScalar& x) {
    const PrecisionContext& c = x.ctx();
    if (x.is_zero()) return EScalar::zero(c);
    if (x.val() % 2 != 0) return std::nullopt;
    int64_t v = x.val();
    // strip the even valuation, search the residue field k_E = F_{p^2}
    FScalar piv = FScalar::pi(c).pow(v);
    EScalar unit = EScalar{x.re() / piv, x.im() / piv};
    int64_t ar = unit.re().is_zero() ? 0 : (unit.re().val() > 0 ? 0 : unit.re().residue_digit());
    int64_t br = unit.im().is_zero() ? 0 : (unit.im().val() > 0 ? 0 : unit.im().residue_digit());
    for (int64_t s = 0; s < c.p; ++s)
        for (int64_t t = 0; t < c.p; ++t) {
            // (s + t w)^2 = s^2 + eps t^2 + 2 s t w
            if (((s * s + c.eps * t * t) % c.p == ar) && ((2 * s * t) % c.p == br)) {
                if (s == 0 && t == 0) continue;
                EScalar start{FScalar::from_int(c, s), FScalar::from_int(c, t)};
                EScalar root = newton_sqrt_e(start, unit);
                if ((root * root - unit).near_zero()) {
                    FScalar half_pow = FScalar::pi(c).pow(v / 2);
                    return EScalar{root.re() * half_pow, root.im() * half_pow};
                }
            }
        }
    return std::nullopt;
}

std::optional<EScalar> solve_norm(const FScalar& t) {
    const PrecisionContext& c = t.ctx();
    if (t.is_zero()) return EScalar::zero(c);
    if (t.val() % 2 != 0) return std::nullopt;  // norms have even valuation
    FScalar piv = FScalar::pi(c).pow(t.val() / 2);
    FScalar unit = t / (piv * piv);
    int64_t target = unit.residue_digit();
    // find s, u in the residue field with s^2 - eps u^2 = target, then lift:
    // fixing the omega coordinate, Newton on a^2 = target + eps b^2
    for (int64_t s = 0; s < c.p; ++s)
        for (int64_t u = 0; u < c.p; ++u) {
            int64_t n = ((s * s - c.eps * u * u) % c.p + c.p) % c.p;
            if (n != target) continue;
            FScalar b = FScalar::from_int(c, u);
            FScalar rhs = unit + FScalar::from_int(c, c.eps) * b * b;
            if (s == 0) {
                if (rhs.near_zero()) continue;
            }
            auto a = hensel_sqrt(rhs);
            if (!a) continue;
            FScalar av = *a;
            // pick the branch agreeing with s at the residue
            if (av.residue_digit() != s % c.p) av = -av;
            if (av.residue_digit() != s % c.p) continue;
            EScalar z{av * piv, b * piv};
            if ((z.norm() - t).near_zero()) return z;
        }
    return std::nullopt;
}

}  // namespace usp
