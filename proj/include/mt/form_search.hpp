#pragma once

#include <vector>

#include "mt/linalg.hpp"
#include "mt/modular_symbols.hpp"

namespace mt {

// Utilities for locating a rational newform inside the symbol space by
// iterated eigenvalue cuts.  Used to derive the auxiliary Hecke eigenvalues
// frozen into the fixtures; the main pipeline consumes explicit eigenvalues.

// Kernel of the stacked system {T_p v = 0, iota v = sign v} on coordinates.
inline QMat nonordinary_sign_space(const SymbolSpace& sp, const QMat& Tp, const QMat& iota,
                                   int sign) {
    const long dim = sp.dim();
    QMat A(2 * dim, dim);
    for (long i = 0; i < dim; ++i) {
        for (long j = 0; j < dim; ++j) {
            A(i, j) = Tp(i, j);
            A(dim + i, j) = iota(i, j) - (i == j ? Rat(sign) : Rat(0));
        }
    }
    return kernel_basis(A);
}

// Matrix B of an operator T restricted to the column space of V: T V = V B.
inline QMat restrict_operator(const QMat& T, const QMat& V) {
    QMat B(V.cols(), V.cols());
    for (long j = 0; j < V.cols(); ++j) {
        QVec img = mat_mul(T, QMat(V.col(j))).col(0);
        QVec b = solve_exact<Rat>(V, img);
        for (long i = 0; i < V.cols(); ++i) B(i, j) = b(i);
    }
    return B;
}

// Integer eigenvalues of a small matrix within [-bound, bound].
inline std::vector<long> integer_spectrum(const QMat& B, long bound) {
    std::vector<long> out;
    for (long a = -bound; a <= bound; ++a) {
        QMat C = B;
        for (long i = 0; i < B.rows(); ++i) C(i, i) -= Rat(a);
        if (rank_of(C) < B.rows()) out.push_back(a);
    }
    return out;
}

// Refine V by the eigenvalue a of the restricted operator B.
inline QMat refine_by_eigenvalue(const QMat& V, const QMat& B, long a) {
    QMat C = B;
    for (long i = 0; i < B.rows(); ++i) C(i, i) -= Rat(a);
    QMat K = kernel_basis(C);
    return mat_mul(V, K);
}

}  // namespace mt
