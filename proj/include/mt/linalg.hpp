#pragma once

#include <Eigen/Core>
#include <gmpxx.h>

#include <vector>

#include "mt/errors.hpp"
#include "mt/number_field.hpp"
#include "mt/valuation.hpp"

// Exact linear algebra: Eigen dynamic matrices as containers over mpq_class
// (and NFElem), with fraction-free-free :-) plain Gaussian elimination.  Only
// ring/field operations are used — no norms, no sqrt — so the NumTraits
// specializations below are deliberately minimal.

namespace Eigen {

template <>
struct NumTraits<mpq_class> : GenericNumTraits<mpq_class> {
    typedef mpq_class Real;
    typedef mpq_class NonInteger;
    typedef mpq_class Nested;
    typedef mpq_class Literal;
    static inline Real epsilon() { return Real(0); }
    static inline Real dummy_precision() { return Real(0); }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 0,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 100,
        MulCost = 100,
    };
};

template <>
struct NumTraits<mt::NFElem> : GenericNumTraits<mt::NFElem> {
    typedef mt::NFElem Real;
    typedef mt::NFElem NonInteger;
    typedef mt::NFElem Nested;
    typedef mt::NFElem Literal;
    static inline Real epsilon() { return Real(); }
    static inline Real dummy_precision() { return Real(); }
    static inline int digits10() { return 0; }
    enum {
        IsInteger = 0,
        IsSigned = 1,
        IsComplex = 0,
        RequireInitialization = 1,
        ReadCost = 16,
        AddCost = 400,
        MulCost = 800,
    };
};

}  // namespace Eigen

namespace mt {

using QMat = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;
using QVec = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;

template <class S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <class S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <class S>
bool lin_is_zero(const S& x) {
    return x == S(0);
}
inline bool lin_is_zero(const NFElem& x) { return x.is_zero(); }

template <class S>
S lin_inv(const S& x) {
    return S(1) / x;
}
inline NFElem lin_inv(const NFElem& x) { return x.inverse(); }

// In-place reduced row echelon form; returns the pivot columns.
template <class S>
std::vector<long> rref(Mat<S>& A) {
    std::vector<long> pivots;
    long row = 0;
    for (long col = 0; col < A.cols() && row < A.rows(); ++col) {
        long pr = -1;
        for (long r = row; r < A.rows(); ++r) {
            if (!lin_is_zero(A(r, col))) {
                pr = r;
                break;
            }
        }
        if (pr < 0) continue;
        if (pr != row) A.row(pr).swap(A.row(row));
        S inv = lin_inv(A(row, col));
        for (long c = col; c < A.cols(); ++c) A(row, c) = A(row, c) * inv;
        for (long r = 0; r < A.rows(); ++r) {
            if (r == row || lin_is_zero(A(r, col))) continue;
            S f = A(r, col);
            for (long c = col; c < A.cols(); ++c) A(r, c) = A(r, c) - f * A(row, c);
        }
        pivots.push_back(col);
        ++row;
    }
    return pivots;
}

// Basis of the right kernel of A, one column per free variable.
template <class S>
Mat<S> kernel_basis(Mat<S> A) {
    const long n = A.cols();
    std::vector<long> pivots = rref(A);
    std::vector<bool> is_pivot(n, false);
    for (long c : pivots) is_pivot[c] = true;
    std::vector<long> free_cols;
    for (long c = 0; c < n; ++c) {
        if (!is_pivot[c]) free_cols.push_back(c);
    }
    Mat<S> K(n, static_cast<long>(free_cols.size()));
    K.setConstant(S(0));
    for (size_t j = 0; j < free_cols.size(); ++j) {
        long fc = free_cols[j];
        K(fc, static_cast<long>(j)) = S(1);
        for (size_t r = 0; r < pivots.size(); ++r) {
            K(pivots[r], static_cast<long>(j)) = -A(static_cast<long>(r), fc);
        }
    }
    return K;
}

// Rank via rref on a copy.
template <class S>
long rank_of(Mat<S> A) {
    return static_cast<long>(rref(A).size());
}

// Column space basis: returns A restricted to its pivot columns.
template <class S>
Mat<S> column_space_basis(const Mat<S>& A) {
    Mat<S> R = A;
    std::vector<long> pivots = rref(R);
    Mat<S> B(A.rows(), static_cast<long>(pivots.size()));
    for (size_t j = 0; j < pivots.size(); ++j) B.col(static_cast<long>(j)) = A.col(pivots[j]);
    return B;
}

// Solve A x = b (A with full column rank); throws if inconsistent.
template <class S>
Vec<S> solve_exact(const Mat<S>& A, const Vec<S>& b) {
    Mat<S> aug(A.rows(), A.cols() + 1);
    aug.leftCols(A.cols()) = A;
    aug.col(A.cols()) = b;
    std::vector<long> pivots = rref(aug);
    Vec<S> x(A.cols());
    x.setConstant(S(0));
    for (size_t r = 0; r < pivots.size(); ++r) {
        if (pivots[r] == A.cols()) {
            throw internal_error("solve_exact: inconsistent system");
        }
        x(pivots[r]) = aug(static_cast<long>(r), A.cols());
    }
    return x;
}

// Plain matrix product written out coefficient-wise (avoids relying on any
// Eigen kernel beyond storage for the exotic scalar types).
template <class S>
Mat<S> mat_mul(const Mat<S>& A, const Mat<S>& B) {
    if (A.cols() != B.rows()) throw internal_error("mat_mul: shape mismatch");
    Mat<S> C(A.rows(), B.cols());
    C.setConstant(S(0));
    for (long i = 0; i < A.rows(); ++i) {
        for (long k = 0; k < A.cols(); ++k) {
            if (lin_is_zero(A(i, k))) continue;
            for (long j = 0; j < B.cols(); ++j) C(i, j) = C(i, j) + A(i, k) * B(k, j);
        }
    }
    return C;
}

}  // namespace mt
