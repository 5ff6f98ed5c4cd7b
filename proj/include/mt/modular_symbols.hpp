#pragma once

#include <gmpxx.h>

#include <array>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "mt/errors.hpp"
#include "mt/linalg.hpp"
#include "mt/modular.hpp"
#include "mt/number_field.hpp"
#include "mt/scalar_traits.hpp"
#include "mt/valuation.hpp"

namespace mt {

// Exact modular symbols for Gamma_0(N), trivial character, even weight k:
// the Manin presentation of Symb_Gamma(V_{k-2}(Q)) as the kernel of the S-
// and ST-relations on functions P^1(Z/N) -> V_{k-2}, Hecke operators and the
// iota-involution realized through continued-fraction path decompositions,
// eigensymbol extraction from ingested eigenvalues, and path evaluation
// producing the bracket values.

// ---------------------------------------------------------------------------
// 2x2 integer matrices.
// ---------------------------------------------------------------------------
struct Mat22 {
    Int a, b, c, d;

    friend Mat22 operator*(const Mat22& x, const Mat22& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
                x.c * y.b + x.d * y.d};
    }
    Mat22 adj() const { return {d, -b, -c, a}; }  // adjugate; inverse when det=1
    Int det() const { return a * d - b * c; }
};

// Matrix of P |-> P|g on V_w with basis X^j Y^{w-j} (j = column index):
// e_j | g = (dX - cY)^j (-bX + aY)^{w-j}, expanded exactly.
inline std::vector<std::vector<Int>> weight_action(const Mat22& g, long w) {
    std::vector<std::vector<Int>> W(w + 1, std::vector<Int>(w + 1, Int(0)));
    for (long j = 0; j <= w; ++j) {
        // poly in X (index = X-degree) of (dX - cY)^j (-bX + aY)^{w-j}
        std::vector<Int> poly(w + 1, Int(0));
        for (long s = 0; s <= j; ++s) {
            Int left = binomial(Int(j), s) * pow_int(g.d, s) *
                       ((j - s) % 2 ? -pow_int(g.c, j - s) : pow_int(g.c, j - s));
            for (long t = 0; t <= w - j; ++t) {
                Int right = binomial(Int(w - j), t) *
                            (t % 2 ? -pow_int(g.b, t) : pow_int(g.b, t)) *
                            pow_int(g.a, w - j - t);
                poly[s + t] += left * right;
            }
        }
        for (long i = 0; i <= w; ++i) W[i][j] = poly[i];
    }
    return W;
}

// ---------------------------------------------------------------------------
// P^1(Z/N): classes of bottom rows (c : d), canonicalized by the smallest
// unit multiple in lexicographic order.
// ---------------------------------------------------------------------------
class P1Space {
public:
    static P1Space build(const Int& N) {
        P1Space s;
        s.N_ = N;
        for (Int u = 1; u < N; ++u) {
            if (gcd_int(u, N) == 1) s.units_.push_back(u);
        }
        if (N == 1) s.units_.push_back(0);  // the single unit class mod 1
        for (Int c = 0; c < N; ++c) {
            for (Int d = 0; d < N; ++d) {
                if (gcd_int(gcd_int(c, d), N) != 1) continue;
                auto key = s.canonical(c, d);
                if (s.index_.emplace(key, static_cast<long>(s.reps_.size())).second) {
                    s.reps_.push_back(key);
                }
            }
        }
        if (N == 1) {
            s.reps_.assign(1, {Int(0), Int(0)});
            s.index_.clear();
            s.index_[{Int(0), Int(0)}] = 0;
        }
        return s;
    }

    long size() const { return static_cast<long>(reps_.size()); }
    const Int& level() const { return N_; }
    const std::pair<Int, Int>& rep(long i) const { return reps_[i]; }

    long index_of(const Int& c, const Int& d) const {
        if (N_ == 1) return 0;
        auto it = index_.find(canonical(mod_reduce(c, N_), mod_reduce(d, N_)));
        if (it == index_.end()) throw internal_error("P1Space: class not found");
        return it->second;
    }
    long index_of_matrix(const Mat22& g) const { return index_of(g.c, g.d); }

    // An SL2(Z) lift with bottom row congruent to rep(i) mod N.
    Mat22 lift(long i) const {
        Int c = reps_[i].first;
        Int d = reps_[i].second;
        if (N_ == 1) return {Int(1), Int(0), Int(0), Int(1)};
        if (c == 0) c = N_;
        while (gcd_int(c, d) != 1) d += N_;
        // Solve a*d - b*c = 1.
        Int g, a, mb;
        mpz_gcdext(g.get_mpz_t(), a.get_mpz_t(), mb.get_mpz_t(), d.get_mpz_t(), c.get_mpz_t());
        if (g != 1) throw internal_error("P1Space::lift: gcd != 1");
        return {a, -mb, c, d};
    }

private:
    std::pair<Int, Int> canonical(const Int& c, const Int& d) const {
        std::pair<Int, Int> best{N_, N_};
        for (const Int& u : units_) {
            std::pair<Int, Int> cand{mod_mul(u, c, N_), mod_mul(u, d, N_)};
            if (cand < best) best = cand;
        }
        return best;
    }

    Int N_;
    std::vector<Int> units_;
    std::vector<std::pair<Int, Int>> reps_;
    std::map<std::pair<Int, Int>, long> index_;
};

// ---------------------------------------------------------------------------
// Continued-fraction path decomposition: {infty} - {a/m} as a sum of
// unimodular paths h_j({infty} - {0}) with h_j built from convergents.
// ---------------------------------------------------------------------------
inline std::vector<Mat22> unimodular_path(const Int& a_in, const Int& m_in) {
    Int a = a_in, m = m_in;
    if (m == 0) return {};  // {infty} - {infty}
    if (m < 0) {
        a = -a;
        m = -m;
    }
    // Continued-fraction digits by floor division.
    std::vector<Int> digits;
    Int x = a, y = m;
    while (y != 0) {
        Int q, r;
        mpz_fdiv_qr(q.get_mpz_t(), r.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
        digits.push_back(q);
        x = y;
        y = r;
    }
    // Convergents p_j/q_j with p_{-1}/q_{-1} = 1/0.
    std::vector<Mat22> out;
    Int pm1 = 1, qm1 = 0;  // p_{j-1}, q_{j-1}
    Int pj, qj;
    Int pm2 = 0, qm2 = 1;  // p_{j-2}, q_{j-2}
    for (size_t j = 0; j < digits.size(); ++j) {
        pj = digits[j] * pm1 + pm2;
        qj = digits[j] * qm1 + qm2;
        int sgn = (j % 2 == 0) ? 1 : -1;
        out.push_back({Int(sgn) * pm1, pj, Int(sgn) * qm1, qj});
        pm2 = pm1;
        qm2 = qm1;
        pm1 = pj;
        qm1 = qj;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Dimension oracle for S_k(Gamma_0(N)), even k.
// ---------------------------------------------------------------------------
struct DimInfo {
    Int index_mu;
    long eps2 = 0;
    long eps3 = 0;
    long eps_inf = 0;
    long genus = 0;
    long dim_sk = 0;    // dim S_k(Gamma_0(N))
    long dim_eis = 0;   // Eisenstein part of the symbol space
    long dim_symb = 0;  // expected dim of Symb = 2*dim_sk + dim_eis
};

inline std::vector<Int> prime_divisors(Int n) {
    std::vector<Int> ps;
    for (Int q = 2; q * q <= n; ++q) {
        if (mod_reduce(n, q) == 0) {
            ps.push_back(q);
            while (mod_reduce(n, q) == 0) n /= q;
        }
    }
    if (n > 1) ps.push_back(n);
    return ps;
}

inline long euler_phi(const Int& n) {
    Int r = n;
    for (const Int& q : prime_divisors(n)) r = r / q * (q - 1);
    return mpz_get_si(r.get_mpz_t());
}

inline DimInfo dimension_oracle(const Int& N, long k) {
    if (k < 2 || k % 2 != 0) throw unsupported_character("dimension oracle needs even k >= 2");
    DimInfo di;
    auto ps = prime_divisors(N);
    Int mu = N;
    for (const Int& q : ps) mu = mu / q * (q + 1);
    di.index_mu = mu;
    // eps2
    if (mod_reduce(N, Int(4)) == 0) {
        di.eps2 = 0;
    } else {
        long e2 = 1;
        for (const Int& q : ps) {
            if (q == 2) continue;
            long r = mpz_get_si(mod_reduce(q, Int(4)).get_mpz_t());
            e2 *= (r == 1) ? 2 : 0;
        }
        di.eps2 = e2;
    }
    // eps3
    if (mod_reduce(N, Int(9)) == 0) {
        di.eps3 = 0;
    } else {
        long e3 = 1;
        for (const Int& q : ps) {
            if (q == 3) continue;
            long r = mpz_get_si(mod_reduce(q, Int(3)).get_mpz_t());
            e3 *= (r == 1) ? 2 : 0;
        }
        di.eps3 = e3;
    }
    // eps_inf = sum over d | N of phi(gcd(d, N/d))
    long einf = 0;
    for (Int d = 1; d * d <= N; ++d) {
        if (mod_reduce(N, d) != 0) continue;
        Int e = N / d;
        einf += euler_phi(gcd_int(d, e));
        if (e != d) einf += euler_phi(gcd_int(e, d));
    }
    di.eps_inf = einf;
    // genus
    Rat g = Rat(1) + Rat(mu) / 12 - Rat(di.eps2) / 4 - Rat(di.eps3) / 3 - Rat(di.eps_inf) / 2;
    if (g.get_den() != 1) throw internal_error("dimension_oracle: non-integral genus");
    di.genus = mpz_get_si(g.get_num().get_mpz_t());
    if (k == 2) {
        di.dim_sk = di.genus;
        di.dim_eis = di.eps_inf - 1;
    } else {
        di.dim_sk = (k - 1) * (di.genus - 1) + (k / 2 - 1) * di.eps_inf + (k / 4) * di.eps2 +
                    (k / 3) * di.eps3;
        di.dim_eis = di.eps_inf;
    }
    di.dim_symb = 2 * di.dim_sk + di.dim_eis;
    return di;
}

// ---------------------------------------------------------------------------
// The symbol space.
// ---------------------------------------------------------------------------
struct OpTerm {
    long target;                      // class index receiving the contribution
    long source;                      // class index whose value is acted on
    std::vector<std::vector<Int>> W;  // (w+1)x(w+1) weight action (sign folded in)
};

class SymbolSpace {
public:
    static SymbolSpace build(const Int& N, long k) {
        if (k < 2 || k % 2 != 0) {
            throw unsupported_character("only trivial character with even k is supported");
        }
        SymbolSpace sp;
        sp.N_ = N;
        sp.k_ = k;
        sp.w_ = k - 2;
        sp.p1_ = P1Space::build(N);
        sp.dim_info_ = dimension_oracle(N, k);
        sp.build_relations();
        if (sp.basis_.cols() != sp.dim_info_.dim_symb) {
            throw internal_error("symbol space dimension " + std::to_string(sp.basis_.cols()) +
                                 " does not match oracle " +
                                 std::to_string(sp.dim_info_.dim_symb));
        }
        return sp;
    }

    const P1Space& p1() const { return p1_; }
    long weight() const { return k_; }
    long w() const { return w_; }
    const Int& level() const { return N_; }
    long n_classes() const { return p1_.size(); }
    long flat_dim() const { return n_classes() * (w_ + 1); }
    long dim() const { return basis_.cols(); }
    const DimInfo& dim_info() const { return dim_info_; }
    const QMat& basis() const { return basis_; }

    // Coordinates of a kernel vector = entries at the free columns.
    template <class S>
    Vec<S> coordinates(const Vec<S>& flat) const {
        Vec<S> c(dim());
        for (long j = 0; j < dim(); ++j) c(j) = flat(free_cols_[j]);
        return c;
    }

    // Whether a flat vector satisfies all Manin relations.
    bool in_space(const QVec& flat) const {
        for (long r = 0; r < relations_.rows(); ++r) {
            Rat s = 0;
            for (long c = 0; c < relations_.cols(); ++c) {
                if (relations_(r, c) != 0) s += relations_(r, c) * flat(c);
            }
            if (s != 0) return false;
        }
        return true;
    }

    // ---- operator plans -------------------------------------------------
    // Generic plan for M_{xi|A_x}(x) summed over a family of integer
    // matrices A = delta * lift(x): value contributions from the unimodular
    // decomposition of {A infty} - {A 0}.
    std::vector<OpTerm> plan_for(const std::vector<Mat22>& deltas) const {
        std::vector<OpTerm> plan;
        for (long x = 0; x < n_classes(); ++x) {
            Mat22 g = p1_.lift(x);
            for (const Mat22& dl : deltas) {
                Mat22 A = dl * g;
                append_eval_terms(plan, x, A);
            }
        }
        return plan;
    }

    std::vector<OpTerm> hecke_plan(const Int& ell) const {
        if (gcd_int(ell, N_) != 1) {
            throw unsupported_character("T_ell requires ell coprime to the level");
        }
        std::vector<Mat22> deltas;
        for (Int a = 0; a < ell; ++a) deltas.push_back({Int(1), a, Int(0), ell});
        deltas.push_back({ell, Int(0), Int(0), Int(1)});
        return plan_for(deltas);
    }

    std::vector<OpTerm> iota_plan() const {
        return plan_for({Mat22{Int(-1), Int(0), Int(0), Int(1)}});
    }

    // Apply a plan to a flat vector.
    template <class S>
    Vec<S> apply_plan(const std::vector<OpTerm>& plan, const Vec<S>& flat) const {
        Vec<S> out(flat_dim());
        out.setConstant(S(0));
        for (const OpTerm& t : plan) {
            for (long i = 0; i <= w_; ++i) {
                S acc = S(0);
                for (long j = 0; j <= w_; ++j) {
                    if (t.W[i][j] == 0) continue;
                    acc = acc + s_mul_rat(flat(t.source * (w_ + 1) + j), Rat(t.W[i][j]));
                }
                out(t.target * (w_ + 1) + i) = out(t.target * (w_ + 1) + i) + acc;
            }
        }
        return out;
    }

    // Matrix of a plan on the coordinate space (columns = images of basis).
    QMat plan_matrix(const std::vector<OpTerm>& plan) const {
        QMat M(dim(), dim());
        for (long j = 0; j < dim(); ++j) {
            QVec col = basis_.col(j);
            QVec img = apply_plan(plan, col);
            QVec coords = coordinates(img);
            for (long i = 0; i < dim(); ++i) M(i, j) = coords(i);
        }
        return M;
    }

    // ---- path evaluation -------------------------------------------------
    // Value of (xi | A)({infty}-{0}) = xi(A D0)|A for an integer matrix A
    // with nonzero determinant, as a coefficient vector in V_w.
    template <class S>
    std::vector<S> eval_transformed(const Vec<S>& flat, const Mat22& A) const {
        std::vector<OpTerm> plan;
        append_eval_terms(plan, 0, A);  // target unused here
        std::vector<S> val(w_ + 1, S(0));
        for (const OpTerm& t : plan) {
            for (long i = 0; i <= w_; ++i) {
                for (long j = 0; j <= w_; ++j) {
                    if (t.W[i][j] == 0) continue;
                    val[i] = val[i] + s_mul_rat(flat(t.source * (w_ + 1) + j), Rat(t.W[i][j]));
                }
            }
        }
        return val;
    }

private:
    void build_relations() {
        const long w1 = w_ + 1;
        const Mat22 S{Int(0), Int(-1), Int(1), Int(0)};
        const Mat22 tau{Int(0), Int(-1), Int(1), Int(1)};       // S*T
        const Mat22 tau_inv{Int(1), Int(1), Int(-1), Int(0)};   // tau^{-1} (up to -I)
        const Mat22 tau_inv2 = tau_inv * tau_inv;
        auto WS = weight_action(S, w_);
        auto W1 = weight_action(tau_inv, w_);
        auto W2 = weight_action(tau_inv2, w_);

        // Orbits of x -> xS and x -> x*tau on classes.
        auto mul_class = [&](long x, const Mat22& m) {
            const auto& cd = p1_.rep(x);
            return p1_.index_of(cd.first * m.a + cd.second * m.c,
                                cd.first * m.b + cd.second * m.d);
        };
        std::vector<std::array<long, 2>> s_orbits;
        std::vector<std::array<long, 3>> t_orbits;
        {
            std::vector<bool> seen(n_classes(), false);
            for (long x = 0; x < n_classes(); ++x) {
                if (seen[x]) continue;
                long y = mul_class(x, S);
                seen[x] = seen[y] = true;
                s_orbits.push_back({x, y});
            }
        }
        {
            std::vector<bool> seen(n_classes(), false);
            for (long x = 0; x < n_classes(); ++x) {
                if (seen[x]) continue;
                long y = mul_class(x, tau);
                long z = mul_class(y, tau);
                seen[x] = seen[y] = seen[z] = true;
                t_orbits.push_back({x, y, z});
            }
        }
        const long rows = static_cast<long>(s_orbits.size() + t_orbits.size()) * w1;
        relations_ = QMat(rows, flat_dim());
        relations_.setConstant(Rat(0));
        long r0 = 0;
        auto add_block = [&](long row_block, long cls, const std::vector<std::vector<Int>>& W) {
            for (long i = 0; i < w1; ++i) {
                for (long j = 0; j < w1; ++j) {
                    relations_(row_block + i, cls * w1 + j) += Rat(W[i][j]);
                }
            }
        };
        std::vector<std::vector<Int>> id(w1, std::vector<Int>(w1, Int(0)));
        for (long i = 0; i < w1; ++i) id[i][i] = 1;
        // S-relation per orbit {x, xS}: M(xS) + M(x)|S = 0.
        for (const auto& orb : s_orbits) {
            add_block(r0, orb[1], id);
            add_block(r0, orb[0], WS);
            r0 += w1;
        }
        // tau-relation per orbit: M(x) + M(x tau)|tau^{-1} + M(x tau^2)|tau^{-2} = 0.
        for (const auto& orb : t_orbits) {
            add_block(r0, orb[0], id);
            add_block(r0, orb[1], W1);
            add_block(r0, orb[2], W2);
            r0 += w1;
        }
        // Kernel + free columns (coordinates).
        QMat R = relations_;
        std::vector<long> pivots = rref(R);
        std::vector<bool> is_pivot(flat_dim(), false);
        for (long c : pivots) is_pivot[c] = true;
        free_cols_.clear();
        for (long c = 0; c < flat_dim(); ++c) {
            if (!is_pivot[c]) free_cols_.push_back(c);
        }
        basis_ = QMat(flat_dim(), static_cast<long>(free_cols_.size()));
        basis_.setConstant(Rat(0));
        for (size_t j = 0; j < free_cols_.size(); ++j) {
            basis_(free_cols_[j], static_cast<long>(j)) = 1;
            for (size_t r = 0; r < pivots.size(); ++r) {
                basis_(pivots[r], static_cast<long>(j)) =
                    -R(static_cast<long>(r), free_cols_[j]);
            }
        }
    }

    // Contributions of xi(A D0)|A expressed on Manin generators.
    void append_eval_terms(std::vector<OpTerm>& plan, long target, const Mat22& A) const {
        if (A.det() == 0) throw internal_error("eval: singular matrix");
        // {A infty} - {A 0} = ({infty}-{A 0}) - ({infty}-{A infty}).
        for (int side = 0; side < 2; ++side) {
            Int num = side == 0 ? A.b : A.a;
            Int den = side == 0 ? A.d : A.c;
            int sign = side == 0 ? +1 : -1;
            if (den == 0) continue;
            Int g = gcd_int(num, den);
            if (g != 0) {
                num /= g;
                den /= g;
            }
            for (const Mat22& h : unimodular_path(num, den)) {
                OpTerm t;
                t.target = target;
                t.source = p1_.index_of_matrix(h);
                Mat22 act = h.adj() * A;  // h^{-1} A
                t.W = weight_action(act, w_);
                if (sign < 0) {
                    for (auto& row : t.W) {
                        for (auto& v : row) v = -v;
                    }
                }
                plan.push_back(std::move(t));
            }
        }
    }

    Int N_;
    long k_ = 2;
    long w_ = 0;
    P1Space p1_;
    DimInfo dim_info_;
    QMat relations_;
    QMat basis_;
    std::vector<long> free_cols_;
};

using SymbolSpacePtr = std::shared_ptr<const SymbolSpace>;

// ---------------------------------------------------------------------------
// Eigensymbols.
// ---------------------------------------------------------------------------
template <class S>
struct EigenSymbolT {
    SymbolSpacePtr space;
    int sign = +1;           // iota eigenvalue
    Vec<S> flat;             // cohomologically normalized values
    Rat scale;               // the applied normalization factor (p-power)
    std::string form_label;
};

// Cuspidal coordinate subspace: image of (T_ell - (1 + ell^{k-1}))^s with
// s = dim - 2*dim S_k (the expected Eisenstein multiplicity); dimension
// mismatches are fatal (the oracle is part of the contract).
inline QMat cuspidal_subspace(const SymbolSpace& sp, const QMat& hecke_mat, const Int& ell) {
    const long dim = sp.dim();
    const long target = 2 * sp.dim_info().dim_sk;
    long s = dim - target;
    if (s == 0) {
        QMat I(dim, dim);
        I.setConstant(Rat(0));
        for (long i = 0; i < dim; ++i) I(i, i) = 1;
        return I;
    }
    QMat C = hecke_mat;
    Int e = Int(1) + pow_int(ell, static_cast<unsigned long>(sp.weight() - 1));
    for (long i = 0; i < dim; ++i) C(i, i) -= Rat(e);
    QMat P = C;
    for (long i = 1; i < s; ++i) P = mat_mul(P, C);
    QMat B = column_space_basis(P);
    if (B.cols() != target) {
        throw internal_error("cuspidal subspace has dimension " + std::to_string(B.cols()) +
                             ", expected " + std::to_string(target));
    }
    return B;
}

// Intersect ker(T_ell - a_ell) over supplied eigenvalues with the sign
// eigenspace of iota; returns the (unique up to scale) coordinate vector.
template <class S>
Vec<S> eigen_coordinates(const SymbolSpace& sp, const std::vector<QMat>& hecke_mats,
                         const std::vector<S>& eigenvalues, const QMat& iota_mat, int sign) {
    const long dim = sp.dim();
    const long blocks = static_cast<long>(hecke_mats.size()) + 1;
    Mat<S> A(blocks * dim, dim);
    for (size_t b = 0; b < hecke_mats.size(); ++b) {
        for (long i = 0; i < dim; ++i) {
            for (long j = 0; j < dim; ++j) {
                S v = s_from_rat(hecke_mats[b](i, j), eigenvalues[b]);
                if (i == j) v = v - eigenvalues[b];
                A(static_cast<long>(b) * dim + i, j) = v;
            }
        }
    }
    const long r0 = (blocks - 1) * dim;
    for (long i = 0; i < dim; ++i) {
        for (long j = 0; j < dim; ++j) {
            S v = s_from_rat(iota_mat(i, j), eigenvalues.empty() ? S(0) : eigenvalues[0]);
            if (i == j) v = v - s_from_rat(Rat(sign), v);
            A(r0 + i, j) = v;
        }
    }
    Mat<S> K = kernel_basis(A);
    if (K.cols() == 0) {
        throw empty_eigenspace("no symbol with the supplied eigenvalues and sign");
    }
    if (K.cols() > 1) {
        throw ambiguous_eigenspace("eigenspace has dimension " + std::to_string(K.cols()) +
                                   "; supply more eigenvalues");
    }
    return K.col(0);
}

// Flat values of a coordinate vector: flat = basis * coords over S.
template <class S>
Vec<S> flat_from_coordinates(const SymbolSpace& sp, const Vec<S>& coords) {
    Vec<S> flat(sp.flat_dim());
    flat.setConstant(S(0));
    const QMat& B = sp.basis();
    for (long j = 0; j < sp.dim(); ++j) {
        if (lin_is_zero(coords(j))) continue;
        for (long i = 0; i < sp.flat_dim(); ++i) {
            if (B(i, j) == 0) continue;
            flat(i) = flat(i) + s_mul_rat(coords(j), B(i, j));
        }
    }
    return flat;
}

// Cohomological normalization: scale by the p-power making the minimal
// p-adic valuation over all values exactly zero.  Prime-to-p denominators
// are untouched (only p-adic valuations are consumed downstream).
template <class S>
Rat normalize_cohomological(Vec<S>& flat, const PrimeContext& ctx) {
    Val best = Val::infinity();
    for (long i = 0; i < flat.size(); ++i) {
        if (s_is_zero(flat(i))) continue;
        auto [v, certain] = s_ordp(flat(i), ctx);
        if (!certain) throw precision_insufficient("normalization: uncertain valuation");
        if (v < best) best = v;
    }
    if (best.inf) throw zero_series("eigensymbol is identically zero");
    if (best.v.get_den() != 1) {
        throw ramified_context("normalization needs integral valuations (e = 1)");
    }
    long m = mpz_get_si(best.v.get_num().get_mpz_t());
    Rat scale = 1;
    if (m > 0) {
        scale = Rat(1) / Rat(pow_int(ctx.p, static_cast<unsigned long>(m)));
    } else if (m < 0) {
        scale = Rat(pow_int(ctx.p, static_cast<unsigned long>(-m)));
    }
    if (scale != 1) {
        for (long i = 0; i < flat.size(); ++i) flat(i) = s_mul_rat(flat(i), scale);
    }
    return scale;
}

// Full pipeline from Hecke matrices + eigenvalues to a normalized symbol.
template <class S>
EigenSymbolT<S> make_eigensymbol(SymbolSpacePtr sp, const std::vector<QMat>& hecke_mats,
                                 const std::vector<S>& eigenvalues, const QMat& iota_mat,
                                 int sign, const PrimeContext& ctx,
                                 const std::string& label) {
    EigenSymbolT<S> es;
    es.space = sp;
    es.sign = sign;
    es.form_label = label;
    Vec<S> coords = eigen_coordinates(*sp, hecke_mats, eigenvalues, iota_mat, sign);
    es.flat = flat_from_coordinates(*sp, coords);
    es.scale = normalize_cohomological(es.flat, ctx);
    return es;
}

// Bracket values [a/m]_{xi,j}: coefficients of (xi|[1,a;0,m])({infty}-{0})
// on the basis X^j Y^{w-j}, j = 0..w.
template <class S>
std::vector<S> evaluate_path(const EigenSymbolT<S>& es, const Int& a, const Int& m) {
    return es.space->eval_transformed(es.flat, Mat22{Int(1), a, Int(0), m});
}

}  // namespace mt
