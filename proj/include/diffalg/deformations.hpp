#ifndef DIFFALG_DEFORMATIONS_HPP
#define DIFFALG_DEFORMATIONS_HPP

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "extensions.hpp"

namespace diffalg {

/*
 * Truncated formal deformations of (A, mu, d) over the regular bimodule:
 *
 *   mu_t = mu_0 + mu_1 t + ... + mu_N t^N      (degree-2 cochains)
 *   d_t  = d_0  + d_1 t  + ... + d_N t^N       (degree-1 cochains)
 *
 * with mu_0, d_0 the structure maps of A itself.  Index k in the series
 * vectors is the t^k coefficient.
 */
template <class K>
struct TruncatedDeformation {
    std::vector<Cochain<K>> mu;
    std::vector<Cochain<K>> der;

    int order() const { return int(mu.size()) - 1; }

    const std::shared_ptr<const DiffContext<K>>& ctx() const { return mu.front().ctx(); }

    friend bool operator==(const TruncatedDeformation& a, const TruncatedDeformation& b) {
        return a.mu == b.mu && a.der == b.der;
    }
};

// assemble a deformation from the correction terms for t^1..t^N
template <class K>
TruncatedDeformation<K> make_deformation(std::shared_ptr<const DiffContext<K>> ctx,
                                         std::vector<Cochain<K>> mu_corrections,
                                         std::vector<Cochain<K>> der_corrections) {
    if (mu_corrections.size() != der_corrections.size())
        throw invalid_input_error("deformation series for mu and d have different lengths");
    TruncatedDeformation<K> def;
    def.mu.push_back(multiplication_cochain(ctx));
    def.der.push_back(derivation_cochain(ctx));
    for (auto& f : mu_corrections) {
        if (f.degree() != 2 || !f.compatible(def.mu.front()))
            throw invalid_input_error("mu corrections must be degree-2 cochains over the algebra");
        def.mu.push_back(std::move(f));
    }
    for (auto& f : der_corrections) {
        if (f.degree() != 1 || !f.compatible(def.der.front()))
            throw invalid_input_error("d corrections must be degree-1 cochains over the algebra");
        def.der.push_back(std::move(f));
    }
    return def;
}

struct OrderVerdict {
    int order = 0;
    bool associative = false;
    bool leibniz = false;
    bool pass() const { return associative && leibniz; }
};

struct DeformationReport {
    bool pass = true;
    int first_failure = -1; // lowest failing order, -1 when everything passes
    std::vector<OrderVerdict> orders;
};

namespace detail {

template <class K>
std::vector<K> basis_vec(size_t dim, size_t i) {
    std::vector<K> v(dim);
    v[i] = K(1);
    return v;
}

} // namespace detail

/*
 * Order-n conditions, for each n = 1..N:
 *
 *   (associativity)  sum_{i+j=n} mu_i(mu_j(x,y), z) - mu_i(x, mu_j(y,z)) = 0
 *   (leibniz)        sum_{i+j=n} d_i(mu_j(x,y))
 *                      = sum_{i+j=n} mu_i(d_j x, y) + mu_i(x, d_j y)
 *                        + lambda sum_{i+j+k=n} mu_i(d_j x, d_k y)
 */
template <class K>
DeformationReport check_deformation(const TruncatedDeformation<K>& def) {
    const auto& ctx = *def.ctx();
    const size_t D = ctx.dim_a();
    const K& lambda = ctx.algebra.weight;
    const int N = def.order();
    DeformationReport rep;

    // cache d_k(e_p) and mu_k(e_p, e_q) on basis elements
    std::vector<std::vector<std::vector<K>>> dk(N + 1);
    std::vector<std::vector<std::vector<K>>> mk(N + 1);
    for (int k = 0; k <= N; ++k) {
        dk[k].resize(D);
        mk[k].resize(D * D);
        for (size_t p = 0; p < D; ++p) {
            const std::array<size_t, 1> t1{p};
            dk[k][p] = def.der[k].eval_basis(t1);
            for (size_t q = 0; q < D; ++q) {
                const std::array<size_t, 2> t2{p, q};
                mk[k][p * D + q] = def.mu[k].eval_basis(t2);
            }
        }
    }

    auto mu_eval = [&](int k, const std::vector<K>& x, const std::vector<K>& y) {
        const std::array<std::vector<K>, 2> args{x, y};
        return def.mu[k].eval(args);
    };

    for (int n = 1; n <= N; ++n) {
        OrderVerdict v;
        v.order = n;
        v.associative = true;
        v.leibniz = true;

        for (size_t p = 0; p < D && v.associative; ++p)
            for (size_t q = 0; q < D && v.associative; ++q)
                for (size_t r = 0; r < D && v.associative; ++r) {
                    std::vector<K> acc(D);
                    for (int i = 0; i <= n; ++i) {
                        const int j = n - i;
                        std::vector<K> l =
                            mu_eval(i, mk[j][p * D + q], detail::basis_vec<K>(D, r));
                        std::vector<K> rgt =
                            mu_eval(i, detail::basis_vec<K>(D, p), mk[j][q * D + r]);
                        for (size_t t = 0; t < D; ++t) {
                            acc[t] += l[t];
                            acc[t] -= rgt[t];
                        }
                    }
                    for (size_t t = 0; t < D; ++t)
                        if (!acc[t].is_zero()) {
                            v.associative = false;
                            break;
                        }
                }

        for (size_t p = 0; p < D && v.leibniz; ++p)
            for (size_t q = 0; q < D && v.leibniz; ++q) {
                std::vector<K> acc(D);
                for (int i = 0; i <= n; ++i) {
                    const int j = n - i;
                    const std::array<std::vector<K>, 1> arg{mk[j][p * D + q]};
                    std::vector<K> l = def.der[i].eval(arg);
                    std::vector<K> r1 = mu_eval(i, dk[j][p], detail::basis_vec<K>(D, q));
                    std::vector<K> r2 = mu_eval(i, detail::basis_vec<K>(D, p), dk[j][q]);
                    for (size_t t = 0; t < D; ++t) {
                        acc[t] += l[t];
                        acc[t] -= r1[t];
                        acc[t] -= r2[t];
                    }
                }
                if (!lambda.is_zero()) {
                    for (int i = 0; i <= n; ++i)
                        for (int j = 0; i + j <= n; ++j) {
                            const int k = n - i - j;
                            std::vector<K> w = mu_eval(i, dk[j][p], dk[k][q]);
                            for (size_t t = 0; t < D; ++t)
                                if (!w[t].is_zero())
                                    acc[t] -= lambda * w[t];
                        }
                }
                for (size_t t = 0; t < D; ++t)
                    if (!acc[t].is_zero()) {
                        v.leibniz = false;
                        break;
                    }
            }

        if (!v.pass()) {
            rep.pass = false;
            if (rep.first_failure < 0)
                rep.first_failure = n;
        }
        rep.orders.push_back(v);
    }
    return rep;
}

// The t^1 terms of a deformation form a 2-cocycle of the combined complex
// exactly when the order-1 conditions hold.
template <class K>
TwoCocycle<K> infinitesimal(const TruncatedDeformation<K>& def) {
    if (def.order() < 1)
        throw invalid_input_error("infinitesimal part needs a deformation of order at least 1");
    return TwoCocycle<K>{def.mu[1], def.der[1]};
}

// ---------------------------------------------------------------------------
// Gauges: invertible formal series id + phi_1 t + ... acting on deformations
// by mu |-> phi^{-1} mu (phi x phi) and d |-> phi^{-1} d phi, order by order.

template <class K>
struct TruncatedGauge {
    std::vector<Matrix<K>> phi; // phi[0] must be the identity

    int order() const { return int(phi.size()) - 1; }

    static TruncatedGauge identity(size_t dim, int order) {
        TruncatedGauge g;
        g.phi.assign(size_t(order) + 1, Matrix<K>(dim, dim));
        g.phi[0] = Matrix<K>::identity(dim);
        return g;
    }
};

template <class K>
TruncatedGauge<K> make_gauge(size_t dim, std::vector<Matrix<K>> corrections) {
    TruncatedGauge<K> g;
    g.phi.push_back(Matrix<K>::identity(dim));
    for (auto& M : corrections) {
        if (M.rows() != dim || M.cols() != dim)
            throw invalid_input_error("gauge correction matrix has wrong shape");
        g.phi.push_back(std::move(M));
    }
    return g;
}

// coefficients of the inverse series, out to the requested order
template <class K>
TruncatedGauge<K> gauge_inverse(const TruncatedGauge<K>& g, int order) {
    const size_t dim = g.phi[0].rows();
    TruncatedGauge<K> inv = TruncatedGauge<K>::identity(dim, order);
    for (int n = 1; n <= order; ++n) {
        Matrix<K> acc(dim, dim);
        for (int i = 1; i <= n && i <= g.order(); ++i) {
            if (g.phi[i].is_zero())
                continue;
            acc = acc + g.phi[i] * inv.phi[n - i];
        }
        inv.phi[n] = -acc;
    }
    return inv;
}

// composition (g after f), truncated: (g o f)_n = sum_{i+j=n} g_i f_j
template <class K>
TruncatedGauge<K> gauge_compose(const TruncatedGauge<K>& g, const TruncatedGauge<K>& f,
                                int order) {
    const size_t dim = g.phi[0].rows();
    TruncatedGauge<K> out = TruncatedGauge<K>::identity(dim, order);
    for (int n = 0; n <= order; ++n) {
        Matrix<K> acc(dim, dim);
        for (int i = 0; i <= n; ++i) {
            const int j = n - i;
            if (i > g.order() || j > f.order())
                continue;
            if (g.phi[i].is_zero() || f.phi[j].is_zero())
                continue;
            acc = acc + g.phi[i] * f.phi[j];
        }
        out.phi[n] = std::move(acc);
    }
    return out;
}

template <class K>
TruncatedDeformation<K> apply_gauge(const TruncatedDeformation<K>& def,
                                    const TruncatedGauge<K>& g) {
    const auto& ctx = def.ctx();
    const size_t dim = ctx->dim_a();
    if (g.phi[0] != Matrix<K>::identity(dim))
        throw invalid_input_error("gauge series must start at the identity");
    const int N = def.order();
    TruncatedGauge<K> inv = gauge_inverse(g, N);

    auto phi_at = [&](int k) -> const Matrix<K>* { return k <= g.order() ? &g.phi[k] : nullptr; };

    TruncatedDeformation<K> out;
    for (int n = 0; n <= N; ++n) {
        Cochain<K> mu_n(ctx, 2);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b)
                for (int c = 0; a + b + c <= n; ++c) {
                    const int e = n - a - b - c;
                    const Matrix<K>* pc = phi_at(c);
                    const Matrix<K>* pe = phi_at(e);
                    if (!pc || !pe)
                        continue;
                    if (inv.phi[a].is_zero() || pc->is_zero() || pe->is_zero())
                        continue;
                    Cochain<K> term = precompose_slot(def.mu[b], 0, *pc);
                    term = precompose_slot(term, 1, *pe);
                    term = postcompose(term, inv.phi[a]);
                    mu_n += term;
                }
        out.mu.push_back(std::move(mu_n));

        Cochain<K> d_n(ctx, 1);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; a + b <= n; ++b) {
                const int c = n - a - b;
                const Matrix<K>* pc = phi_at(c);
                if (!pc)
                    continue;
                if (inv.phi[a].is_zero() || pc->is_zero())
                    continue;
                Cochain<K> term = precompose_slot(def.der[b], 0, *pc);
                term = postcompose(term, inv.phi[a]);
                d_n += term;
            }
        out.der.push_back(std::move(d_n));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Order-by-order trivialization.  At the first order k with a nonzero pair
// (mu_k, d_k) the pair is a 2-cocycle of the reduced complex; the order can
// be removed by a gauge iff that class vanishes, in which case a preimage
// under the reduced coboundary supplies the gauge correction.

template <class K>
struct TrivializeResult {
    bool trivial = false;
    TruncatedGauge<K> gauge;            // witness when trivial
    int obstruction_order = -1;         // first order no gauge can remove
    std::vector<K> obstruction_class;   // its coordinates in the class basis
};

template <class K>
TrivializeResult<K> trivialize(const ComplexAssembler<K>& asmb,
                               const TruncatedDeformation<K>& def) {
    if (!asmb.ctx()->same_as(*def.ctx()))
        throw invalid_input_error("trivialize: assembler and deformation contexts differ");

    const size_t dim = asmb.ctx()->dim_a();
    const int N = def.order();
    TrivializeResult<K> res;
    TruncatedGauge<K> g = TruncatedGauge<K>::identity(dim, N);
    TruncatedDeformation<K> cur = def;

    for (int k = 1; k <= N; ++k) {
        std::vector<K> zk(cur.mu[k].coeffs());
        zk.insert(zk.end(), cur.der[k].coeffs().begin(), cur.der[k].coeffs().end());
        bool zero = true;
        for (const K& x : zk)
            if (!x.is_zero()) {
                zero = false;
                break;
            }
        if (zero)
            continue;

        // with the lower orders already cleared, the order-k equations say
        // exactly that this pair is a 2-cocycle; anything else is not a
        // deformation, and the class machinery below would not apply to it
        if (find_cocycle_defect(TwoCocycle<K>{cur.mu[k], cur.der[k]}, asmb.budget()))
            throw invalid_input_error("trivialize: the series fails the deformation equations "
                                      "at order " +
                                      std::to_string(k));

        std::vector<K> target(zk.size());
        for (size_t i = 0; i < zk.size(); ++i)
            target[i] = -zk[i];
        auto phik = solve(asmb.boundary(ComplexKind::diff_reduced, 1), target);
        if (!phik) {
            res.obstruction_order = k;
            DegreeHomology<K> h = asmb.homology(ComplexKind::diff_reduced, 2, true);
            Matrix<K> reps = Matrix<K>::from_columns(asmb.dim(ComplexKind::diff_reduced, 2),
                                                     h.representatives);
            res.obstruction_class =
                class_coordinates(reps, asmb.boundary(ComplexKind::diff_reduced, 1), zk);
            return res;
        }

        // phik holds a degree-1 cochain phi; its matrix sends e_j to phi(e_j)
        Matrix<K> corr(dim, dim);
        for (size_t j = 0; j < dim; ++j)
            for (size_t a = 0; a < dim; ++a)
                corr(a, j) = (*phik)[j * dim + a];
        TruncatedGauge<K> step = TruncatedGauge<K>::identity(dim, N);
        step.phi[k] = std::move(corr);
        g = gauge_compose(g, step, N);
        cur = apply_gauge(def, g);
        for (const K& x : cur.mu[k].coeffs())
            if (!x.is_zero())
                throw internal_error("trivialize: gauge step failed to clear its order");
        for (const K& x : cur.der[k].coeffs())
            if (!x.is_zero())
                throw internal_error("trivialize: gauge step failed to clear its order");
    }

    res.trivial = true;
    res.gauge = std::move(g);
    return res;
}

} // namespace diffalg

#endif
