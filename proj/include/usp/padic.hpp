#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>

// Exact truncated arithmetic over F = Q_p and its unramified quadratic
// extension E = F(omega), omega^2 = eps, for small odd p.
//
// A nonzero scalar is p^v * u with u a unit held to N base-p digits, so the
// value is known exactly modulo p^(v+N).  Additive cancellation shifts the
// valuation up and zero-pads the vacated high digits ("phantom" digits);
// all equality assertions therefore compare modulo p^(N-slack) and every
// invariant this library verifies is stated at that tolerance.  A difference
// that vanishes in all N working digits collapses to the exact zero sentinel.

namespace usp {

struct Error : std::runtime_error {
    enum class Kind {
        ZeroArgument,
        PrecisionExhausted,
        Singular,
        NotSquarefree,
        NoFactorization,
        NoLift,
        Degenerate,
        RankDeficient,
        WindowTooLarge,
        WindowTooSmall,
        NotElliptic,
        NotStronglyCompact,
        NonConvergence,
        NotIntegral,
        NotInDescentLocus,
        NotStablyConjugate,
        UnsupportedDegree,
        PartitionMismatch,
        LevelTooSmall,
        SampleBudget,
        BadInput,
    };
    Kind kind;
    Error(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
};

[[noreturn]] void fail(Error::Kind k, const std::string& msg);

// Fixed working precision shared by every scalar of a computation.
// p odd prime <= 7 here (residue scans assume tiny p), N working digits,
// slack digits forgiven in comparisons, eps = least positive non-residue.
struct PrecisionContext {
    int64_t p = 3;
    int N = 12;
    int slack = 2;
    int64_t eps = 2;
    uint64_t pN = 0;               // p^N
    std::array<uint64_t, 64> ppow; // p^k, k = 0..N

    bool operator==(const PrecisionContext& o) const {
        return p == o.p && N == o.N && slack == o.slack;
    }
};

PrecisionContext make_context(int64_t p, int N, int slack = 2);

inline constexpr int64_t VAL_INF = INT64_MAX;

// comparison allowance for residuals of exact identities: every input factor
// below the integral range pushes the reliable digits of a cancellation down
// by its depth, so the threshold has to follow the combined deficit
inline int val_allowance(std::initializer_list<int64_t> input_min_vals) {
    int64_t s = 0;
    for (int64_t v : input_min_vals) s += std::min<int64_t>(v, 0);
    return static_cast<int>(-s);
}

class FScalar {
public:
    FScalar() = default;

    static FScalar zero(const PrecisionContext& c) {
        FScalar x;
        x.ctx_ = &c;
        x.zero_ = true;
        return x;
    }
    static FScalar from_int(const PrecisionContext& c, int64_t n);
    static FScalar from_ratio(const PrecisionContext& c, int64_t num, int64_t den);
    // p^v * u, u reduced mod p^N; u must be a p-unit unless zero.
    static FScalar make(const PrecisionContext& c, int64_t v, uint64_t u);
    static FScalar one(const PrecisionContext& c) { return from_int(c, 1); }
    static FScalar pi(const PrecisionContext& c) { return make(c, 1, 1); }

    const PrecisionContext& ctx() const { return *ctx_; }
    bool is_zero() const { return zero_; }
    int64_t val() const { return zero_ ? VAL_INF : v_; }
    uint64_t unit() const { return zero_ ? 0 : u_; }
    // first unit digit (u mod p); zero for the zero scalar
    int64_t residue_digit() const;
    // value mod p as an integer in [0, p), defined when val >= 0
    int64_t residue() const;

    bool is_integral() const { return zero_ || v_ >= 0; }
    bool is_unit() const { return !zero_ && v_ == 0; }

    FScalar operator-() const;
    FScalar operator+(const FScalar& o) const;
    FScalar operator-(const FScalar& o) const { return *this + (-o); }
    FScalar operator*(const FScalar& o) const;
    FScalar operator/(const FScalar& o) const { return *this * o.inv(); }
    FScalar inv() const;
    FScalar pow(int64_t e) const;

    // exact representation equality (all N digits)
    bool eq_exact(const FScalar& o) const;
    // equality mod p^(N - slack)
    bool eq(const FScalar& o) const;
    // val >= N - slack - extra (or exact zero); extra > 0 loosens the
    // threshold for identities whose evaluation is known to lose digits
    bool near_zero(int extra = 0) const;

    // digits little-endian, e.g. 5 = "21" for p=3
    std::string digits() const;
    static FScalar from_digits(const PrecisionContext& c, int64_t v, const std::string& digits);
    std::string str() const;

private:
    const PrecisionContext* ctx_ = nullptr;
    bool zero_ = true;
    int64_t v_ = 0;
    uint64_t u_ = 0;
};

// quadratic character of F^x attached to E/F: (-1)^val
int eta(const FScalar& x);

// canonical square root in F if one exists (unit digit <= (p-1)/2)
std::optional<FScalar> hensel_sqrt(const FScalar& x);

class EScalar {
public:
    EScalar() = default;
    EScalar(const FScalar& a, const FScalar& b) : a_(a), b_(b) {}

    static EScalar zero(const PrecisionContext& c) { return {FScalar::zero(c), FScalar::zero(c)}; }
    static EScalar one(const PrecisionContext& c) { return {FScalar::one(c), FScalar::zero(c)}; }
    static EScalar from_int(const PrecisionContext& c, int64_t n) {
        return {FScalar::from_int(c, n), FScalar::zero(c)};
    }
    static EScalar from_f(const FScalar& a) { return {a, FScalar::zero(a.ctx())}; }
    static EScalar omega(const PrecisionContext& c) { return {FScalar::zero(c), FScalar::one(c)}; }
    static EScalar make(const FScalar& a, const FScalar& b) { return {a, b}; }

    const PrecisionContext& ctx() const { return a_.ctx(); }
    const FScalar& re() const { return a_; }  // coefficient of 1
    const FScalar& im() const { return b_; }  // coefficient of omega

    bool is_zero() const { return a_.is_zero() && b_.is_zero(); }
    int64_t val() const { return std::min(a_.val(), b_.val()); }
    bool is_integral() const { return a_.is_integral() && b_.is_integral(); }
    bool is_unit() const { return !is_zero() && val() == 0; }

    EScalar conj() const { return {a_, -b_}; }
    FScalar norm() const;   // a^2 - eps b^2
    FScalar trace() const;  // 2a
    // the coefficient of 1, insisting the omega part vanishes to slack
    FScalar as_f(int extra = 0) const;
    bool in_f() const { return b_.near_zero(); }

    EScalar operator-() const { return {-a_, -b_}; }
    EScalar operator+(const EScalar& o) const { return {a_ + o.a_, b_ + o.b_}; }
    EScalar operator-(const EScalar& o) const { return {a_ - o.a_, b_ - o.b_}; }
    EScalar operator*(const EScalar& o) const;
    EScalar operator/(const EScalar& o) const { return *this * o.inv(); }
    EScalar inv() const;
    EScalar pow(int64_t e) const;

    bool eq(const EScalar& o) const { return a_.eq(o.a_) && b_.eq(o.b_); }
    bool eq_exact(const EScalar& o) const { return a_.eq_exact(o.a_) && b_.eq_exact(o.b_); }
    bool near_zero(int extra = 0) const { return a_.near_zero(extra) && b_.near_zero(extra); }

    std::string str() const;

private:
    FScalar a_, b_;
};

inline EScalar operator*(const FScalar& s, const EScalar& x) {
    return EScalar::from_f(s) * x;
}

// square root in E of an E scalar (exists iff val even and residue a square
// in the quadratic residue field)
std::optional<EScalar> hensel_sqrt_e(const EScalar& x);

// z with Nm(z) = z zbar = t; exists iff val(t) even (units are norms in the
// unramified extension)
std::optional<EScalar> solve_norm(const FScalar& t);

}  // namespace usp
