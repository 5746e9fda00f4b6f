#pragma once

#include <optional>
#include <vector>

#include "usp/padic.hpp"

// Dense exact linear algebra over E and polynomial utilities used by the
// lattice and orbit machinery.  Everything is tiny (dimension <= 12), so the
// algorithms favor exactness over asymptotics: determinants are computed by
// a division-free subset DP, inverses by full-pivot elimination on the entry
// of least valuation followed by a residual check.

namespace usp {

class EMatrix {
public:
    EMatrix() = default;
    EMatrix(const PrecisionContext& c, int rows, int cols)
        : ctx_(&c), rows_(rows), cols_(cols),
          data_(static_cast<size_t>(rows * cols), EScalar::zero(c)) {}

    static EMatrix identity(const PrecisionContext& c, int n);
    static EMatrix zero(const PrecisionContext& c, int rows, int cols) { return {c, rows, cols}; }
    static EMatrix diag_f(const PrecisionContext& c, const std::vector<FScalar>& d);
    static EMatrix diag_e(const PrecisionContext& c, const std::vector<EScalar>& d);
    // diag(p^e0, ..., p^ek)
    static EMatrix diag_powers(const PrecisionContext& c, const std::vector<int64_t>& exps);

    const PrecisionContext& ctx() const { return *ctx_; }
    int rows() const { return rows_; }
    int cols() const { return cols_; }

    const EScalar& at(int i, int j) const { return data_[static_cast<size_t>(i * cols_ + j)]; }
    EScalar& at(int i, int j) { return data_[static_cast<size_t>(i * cols_ + j)]; }

    EMatrix operator+(const EMatrix& o) const;
    EMatrix operator-(const EMatrix& o) const;
    EMatrix operator*(const EMatrix& o) const;
    EMatrix operator*(const EScalar& s) const;
    EMatrix operator-() const;

    EMatrix transpose() const;
    EMatrix conj() const;
    EMatrix dagger() const { return conj().transpose(); }
    EMatrix pow(int64_t e) const;

    EScalar trace() const;
    EScalar det() const;
    // min valuation over entries (VAL_INF for the zero matrix)
    int64_t min_val() const;
    bool is_integral() const;
    bool near_zero(int extra = 0) const;
    bool eq(const EMatrix& o) const;
    bool is_hermitian() const;

    // fails with Singular / PrecisionExhausted
    EMatrix inverse() const;

    EMatrix submatrix(int i0, int j0, int rows, int cols) const;
    void set_block(int i0, int j0, const EMatrix& b);
    static EMatrix hcat(const EMatrix& a, const EMatrix& b);
    static EMatrix vcat(const EMatrix& a, const EMatrix& b);
    EMatrix col(int j) const { return submatrix(0, j, rows_, 1); }

    std::string str() const;

private:
    const PrecisionContext* ctx_ = nullptr;
    int rows_ = 0, cols_ = 0;
    std::vector<EScalar> data_;
};

class EPoly {
public:
    EPoly() = default;
    explicit EPoly(const PrecisionContext& c) : ctx_(&c) {}
    EPoly(const PrecisionContext& c, std::vector<EScalar> coeffs)
        : ctx_(&c), coeffs_(std::move(coeffs)) {
        trim();
    }
    static EPoly constant(const EScalar& a);
    static EPoly from_f_coeffs(const PrecisionContext& c, const std::vector<FScalar>& coeffs);
    // t - a
    static EPoly linear(const EScalar& a);

    const PrecisionContext& ctx() const { return *ctx_; }
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }  // -1 for zero poly
    EScalar coeff(int k) const;
    const std::vector<EScalar>& coeffs() const { return coeffs_; }

    EPoly operator+(const EPoly& o) const;
    EPoly operator-(const EPoly& o) const;
    EPoly operator*(const EPoly& o) const;
    EPoly operator*(const EScalar& s) const;

    EScalar eval(const EScalar& t) const;
    FScalar eval_f(const FScalar& t) const;
    EPoly derivative() const;
    // quotient and remainder on division by (t - a)
    std::pair<EPoly, EScalar> div_linear(const EScalar& a) const;
    // multiplicity of root a, counting near-zero remainders as zero
    int root_multiplicity(const EScalar& a) const;

    bool near_zero(int extra = 0) const;
    bool has_f_coeffs(int extra = 0) const;
    std::vector<FScalar> f_coeffs(int extra = 0) const;
    bool is_integral() const;

    std::string str() const;

private:
    void trim();
    const PrecisionContext* ctx_ = nullptr;
    std::vector<EScalar> coeffs_;  // coeffs_[k] multiplies t^k; empty = zero
};

// det(tI - M), monic of degree dim(M)
EPoly char_poly(const EMatrix& m);

// resultant of two polynomials with unit leading coefficients
EScalar resultant(const EPoly& f, const EPoly& g);

// disc(f) = (-1)^(d(d-1)/2) Res(f, f') for monic f
EScalar discriminant(const EPoly& f);

// roots in F of a degree-2 polynomial with F coefficients, canonically
// ordered; nullopt when the polynomial is irreducible over F
std::optional<std::pair<FScalar, FScalar>> quadratic_roots_f(const EPoly& f);

// B with B G B^dagger = H for nondegenerate Hermitian G, H of equal size;
// nullopt when the forms are inequivalent (determinant valuation parity)
std::optional<EMatrix> congruence_solve(const EMatrix& h, const EMatrix& g);

// B with B B^dagger = H; nullopt when val(det H) is odd
std::optional<EMatrix> herm_factor(const EMatrix& h);

// [[1, b], [-conj(b), 1]] with Nm(b) = p - 1, so that U U^dagger = p I
EMatrix split_pair_unit(const PrecisionContext& c);

// a kernel vector of M (rank dim-1 expected); fails RankDeficient otherwise
EMatrix kernel_vector(const EMatrix& m);

}  // namespace usp
