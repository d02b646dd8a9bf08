#ifndef DIFFALG_COCHAIN_HPP
#define DIFFALG_COCHAIN_HPP

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "algebra.hpp"
#include "budget.hpp"
#include "errors.hpp"

namespace diffalg {

/*
 * Multilinear maps A^n -> V stored as coefficient tables over the chosen
 * bases.  Tuples are indexed lexicographically with the FIRST argument most
 * significant:
 *
 *   idx(i_1, ..., i_n) = ((i_1 * D + i_2) * D + ...) * D + i_n
 *
 * and the flat coordinate of the value coefficient a at tuple index t is
 * t * m + a, with D = dim A and m = dim V.
 */

inline size_t tuple_index(std::span<const size_t> t, size_t D) {
    size_t idx = 0;
    for (size_t x : t)
        idx = idx * D + x;
    return idx;
}

// Odometer step over basis tuples in index order; returns false after the
// last tuple.  The LAST slot is least significant.
inline bool next_tuple(std::vector<size_t>& t, size_t D) {
    for (size_t p = t.size(); p-- > 0;) {
        if (++t[p] < D)
            return true;
        t[p] = 0;
    }
    return false;
}

inline size_t pow_checked(size_t base, int exp) {
    size_t r = 1;
    for (int i = 0; i < exp; ++i) {
        if (base != 0 && r > (size_t(1) << 40) / base)
            throw resource_error("cochain coefficient table too large");
        r *= base;
    }
    return r;
}

template <class K>
class Cochain {
public:
    Cochain(std::shared_ptr<const DiffContext<K>> ctx, int degree)
        : ctx_(std::move(ctx)), degree_(degree) {
        if (degree < 0)
            throw invalid_input_error("cochain degree must be nonnegative");
        coeffs_.assign(pow_checked(ctx_->dim_a(), degree) * ctx_->dim_v(), K(0));
    }

    static Cochain element(std::shared_ptr<const DiffContext<K>> ctx, std::vector<K> v) {
        if (v.size() != ctx->dim_v())
            throw invalid_input_error("element has wrong length for the module");
        Cochain c(std::move(ctx), 0);
        c.coeffs_ = std::move(v);
        return c;
    }

    int degree() const { return degree_; }
    const std::shared_ptr<const DiffContext<K>>& ctx() const { return ctx_; }
    size_t tuple_count() const { return coeffs_.size() / ctx_->dim_v(); }
    size_t size() const { return coeffs_.size(); }

    const K& flat(size_t i) const { return coeffs_[i]; }
    K& flat(size_t i) { return coeffs_[i]; }
    const std::vector<K>& coeffs() const { return coeffs_; }

    const K& coeff(std::span<const size_t> tuple, size_t a) const {
        return coeffs_[tuple_index(tuple, ctx_->dim_a()) * ctx_->dim_v() + a];
    }
    K& coeff(std::span<const size_t> tuple, size_t a) {
        return coeffs_[tuple_index(tuple, ctx_->dim_a()) * ctx_->dim_v() + a];
    }

    // value coefficients at one basis tuple, by flat tuple index
    std::span<const K> values(size_t tuple_idx) const {
        const size_t m = ctx_->dim_v();
        return std::span<const K>(coeffs_.data() + tuple_idx * m, m);
    }

    std::vector<K> eval_basis(std::span<const size_t> tuple) const {
        if (tuple.size() != size_t(degree_))
            throw invalid_input_error("eval_basis: wrong number of arguments");
        auto v = values(tuple_index(tuple, ctx_->dim_a()));
        return std::vector<K>(v.begin(), v.end());
    }

    // multilinear extension
    std::vector<K> eval(std::span<const std::vector<K>> args) const {
        if (args.size() != size_t(degree_))
            throw invalid_input_error("eval: wrong number of arguments");
        const size_t D = ctx_->dim_a(), m = ctx_->dim_v();
        std::vector<K> out(m);
        if (degree_ == 0) {
            for (size_t a = 0; a < m; ++a)
                out[a] = coeffs_[a];
            return out;
        }
        std::vector<size_t> t(degree_, 0);
        do {
            K w(1);
            bool zero = false;
            for (int p = 0; p < degree_; ++p) {
                const K& x = args[p][t[p]];
                if (x.is_zero()) {
                    zero = true;
                    break;
                }
                w *= x;
            }
            if (zero)
                continue;
            auto v = values(tuple_index(t, D));
            for (size_t a = 0; a < m; ++a)
                if (!v[a].is_zero())
                    out[a] += w * v[a];
        } while (next_tuple(t, D));
        return out;
    }

    bool is_zero() const {
        for (const K& x : coeffs_)
            if (!x.is_zero())
                return false;
        return true;
    }

    bool compatible(const Cochain& o) const {
        return degree_ == o.degree_ && (ctx_ == o.ctx_ || ctx_->same_as(*o.ctx_));
    }

    Cochain& operator+=(const Cochain& o) {
        require_compatible(o);
        for (size_t i = 0; i < coeffs_.size(); ++i)
            coeffs_[i] += o.coeffs_[i];
        return *this;
    }
    Cochain& operator-=(const Cochain& o) {
        require_compatible(o);
        for (size_t i = 0; i < coeffs_.size(); ++i)
            coeffs_[i] -= o.coeffs_[i];
        return *this;
    }
    Cochain& operator*=(const K& s) {
        for (K& x : coeffs_)
            x *= s;
        return *this;
    }
    friend Cochain operator+(Cochain a, const Cochain& b) { return a += b; }
    friend Cochain operator-(Cochain a, const Cochain& b) { return a -= b; }
    friend Cochain operator*(const K& s, Cochain a) { return a *= s; }
    friend Cochain operator-(Cochain a) {
        for (K& x : a.coeffs_)
            x = -x;
        return a;
    }
    friend bool operator==(const Cochain& a, const Cochain& b) {
        if (!a.compatible(b))
            return false;
        for (size_t i = 0; i < a.coeffs_.size(); ++i)
            if (!(a.coeffs_[i] == b.coeffs_[i]))
                return false;
        return true;
    }

private:
    void require_compatible(const Cochain& o) const {
        if (!compatible(o))
            throw invalid_input_error("cochain degree or context mismatch");
    }

    std::shared_ptr<const DiffContext<K>> ctx_;
    int degree_;
    std::vector<K> coeffs_;
};

// precompose one argument slot with a linear map M on A:
// g(x_1,...,x_n) = f(x_1,..., M x_slot, ..., x_n)
template <class K>
Cochain<K> precompose_slot(const Cochain<K>& f, int slot, const Matrix<K>& M) {
    const size_t D = f.ctx()->dim_a(), m = f.ctx()->dim_v();
    if (slot < 0 || slot >= f.degree())
        throw invalid_input_error("precompose_slot: slot out of range");
    if (M.rows() != D || M.cols() != D)
        throw invalid_input_error("precompose_slot: matrix has wrong shape");
    Cochain<K> g(f.ctx(), f.degree());
    std::vector<size_t> t(f.degree(), 0);
    std::vector<size_t> u(f.degree(), 0);
    do {
        u = t;
        const size_t orig = t[slot];
        for (size_t j = 0; j < D; ++j) {
            const K& s = M(j, orig);
            if (s.is_zero())
                continue;
            u[slot] = j;
            auto src = f.values(tuple_index(u, D));
            const size_t base = tuple_index(t, D) * m;
            for (size_t a = 0; a < m; ++a)
                if (!src[a].is_zero())
                    g.flat(base + a) += s * src[a];
        }
    } while (next_tuple(t, D));
    return g;
}

// postcompose with a linear map on V: g = M . f
template <class K>
Cochain<K> postcompose(const Cochain<K>& f, const Matrix<K>& M) {
    const size_t m = f.ctx()->dim_v();
    if (M.rows() != m || M.cols() != m)
        throw invalid_input_error("postcompose: matrix has wrong shape");
    Cochain<K> g(f.ctx(), f.degree());
    const size_t T = f.tuple_count();
    for (size_t t = 0; t < T; ++t) {
        auto src = f.values(t);
        for (size_t a = 0; a < m; ++a) {
            K acc(0);
            for (size_t b = 0; b < m; ++b)
                if (!M(a, b).is_zero() && !src[b].is_zero())
                    acc += M(a, b) * src[b];
            g.flat(t * m + a) = acc;
        }
    }
    return g;
}

// Which module actions the Hochschild coboundary uses for its outer terms.
// The operator complex runs over the weight-shifted actions; the middle
// terms contract with the algebra multiplication either way.
enum class ActionMode { plain, deformed };

template <class K>
Cochain<K> hochschild_d(const Cochain<K>& f, ActionMode mode = ActionMode::plain) {
    const auto& ctx = *f.ctx();
    const DiffBimodule<K>& V = mode == ActionMode::plain ? ctx.module : ctx.twisted;
    const size_t D = ctx.dim_a(), m = ctx.dim_v();
    const int n = f.degree();
    Cochain<K> out(f.ctx(), n + 1);

    std::vector<size_t> t(n + 1, 0);
    std::vector<size_t> sub(n, 0);
    do {
        const size_t out_base = tuple_index(t, D) * m;

        // x_1 . f(x_2, ..., x_{n+1})
        for (int p = 0; p < n; ++p)
            sub[p] = t[p + 1];
        {
            auto v = f.values(tuple_index(sub, D));
            const Matrix<K>& L = V.left[t[0]];
            for (size_t a = 0; a < m; ++a) {
                K acc(0);
                for (size_t b = 0; b < m; ++b)
                    if (!L(a, b).is_zero() && !v[b].is_zero())
                        acc += L(a, b) * v[b];
                out.flat(out_base + a) += acc;
            }
        }

        // (-1)^{p+1} f(..., x_{p+1} x_{p+2}, ...) contracting positions p, p+1
        for (int p = 0; p < n; ++p) {
            const bool neg = (p % 2) == 0;
            for (int q = 0; q < p; ++q)
                sub[q] = t[q];
            for (int q = p + 1; q < n; ++q)
                sub[q] = t[q + 1];
            for (size_t k = 0; k < D; ++k) {
                const K& s = ctx.algebra.c(t[p], t[p + 1], k);
                if (s.is_zero())
                    continue;
                sub[p] = k;
                auto v = f.values(tuple_index(sub, D));
                for (size_t a = 0; a < m; ++a) {
                    if (v[a].is_zero())
                        continue;
                    if (neg)
                        out.flat(out_base + a) -= s * v[a];
                    else
                        out.flat(out_base + a) += s * v[a];
                }
            }
        }

        // (-1)^{n+1} f(x_1, ..., x_n) . x_{n+1}
        {
            const bool neg = (n % 2) == 0;
            for (int p = 0; p < n; ++p)
                sub[p] = t[p];
            auto v = f.values(tuple_index(sub, D));
            const Matrix<K>& R = V.right[t[n]];
            for (size_t a = 0; a < m; ++a) {
                K acc(0);
                for (size_t b = 0; b < m; ++b)
                    if (!R(a, b).is_zero() && !v[b].is_zero())
                        acc += R(a, b) * v[b];
                if (neg)
                    out.flat(out_base + a) -= acc;
                else
                    out.flat(out_base + a) += acc;
            }
        }
    } while (next_tuple(t, D));
    return out;
}

/*
 * The degree-preserving map connecting the two complexes:
 *
 *   (delta f)(x_1..x_n) = sum_{k=1}^{n} lambda^{k-1}
 *                           sum_{|S|=k} f(.. d x_s for s in S ..)
 *                         - d_V f(x_1..x_n)
 *
 * Two independent implementations.  delta_subset walks the derived-slot
 * subsets directly; delta_tensor substitutes (id + lambda d) one slot at a
 * time and divides the telescoped difference by lambda.  They must agree,
 * and the test suite holds them to that.
 */

template <class K>
Cochain<K> delta_subset(const Cochain<K>& f, const DegreeBudget& budget = {}) {
    if (f.degree() > budget.max_degree)
        throw resource_error("delta_subset: cochain degree exceeds the degree budget");
    const auto& ctx = *f.ctx();
    const size_t D = ctx.dim_a(), m = ctx.dim_v();
    const int n = f.degree();
    const Matrix<K>& Dm = ctx.algebra.derivation;

    std::vector<K> lambda_pow(size_t(n) + 1);
    lambda_pow[0] = K(1);
    for (int k = 1; k <= n; ++k)
        lambda_pow[k] = lambda_pow[k - 1] * ctx.algebra.weight;

    Cochain<K> out(f.ctx(), n);
    std::vector<size_t> t(n, 0);
    std::vector<size_t> work(n, 0);

    // recursive walk over slots: each slot is either untouched or replaced by
    // a basis component of its derivative
    auto walk = [&](auto&& self, int p, int derived, const K& w, size_t out_base) -> void {
        if (p == n) {
            if (derived == 0)
                return;
            const K full = w * lambda_pow[derived - 1];
            if (full.is_zero())
                return;
            auto v = f.values(tuple_index(work, D));
            for (size_t a = 0; a < m; ++a)
                if (!v[a].is_zero())
                    out.flat(out_base + a) += full * v[a];
            return;
        }
        work[p] = t[p];
        self(self, p + 1, derived, w, out_base);
        for (size_t j = 0; j < D; ++j) {
            const K& s = Dm(j, t[p]);
            if (s.is_zero())
                continue;
            work[p] = j;
            self(self, p + 1, derived + 1, w * s, out_base);
        }
        work[p] = t[p];
    };

    if (n == 0) {
        // the sum is empty; only -d_V f(.) remains
    } else {
        do {
            walk(walk, 0, 0, K(1), tuple_index(t, D) * m);
        } while (next_tuple(t, D));
    }

    return out - postcompose(f, ctx.module.dV);
}

template <class K>
Cochain<K> delta_tensor(const Cochain<K>& f, const DegreeBudget& budget = {}) {
    if (f.degree() > budget.max_degree)
        throw resource_error("delta_tensor: cochain degree exceeds the degree budget");
    const auto& ctx = *f.ctx();
    const size_t D = ctx.dim_a();
    const int n = f.degree();
    const Matrix<K>& Dm = ctx.algebra.derivation;
    const K& lambda = ctx.algebra.weight;

    Cochain<K> dvf = postcompose(f, ctx.module.dV);
    if (n == 0)
        return -dvf;

    if (!lambda.is_zero()) {
        // f o (id + lambda d)^{x n}, one slot substitution at a time
        Matrix<K> M = Matrix<K>::identity(D) + lambda * Dm;
        Cochain<K> g = f;
        for (int p = 0; p < n; ++p)
            g = precompose_slot(g, p, M);
        g -= f;
        g *= K(1) / lambda;
        return g - dvf;
    }

    // at weight zero only the single-derived-slot terms survive
    Cochain<K> acc(f.ctx(), n);
    for (int p = 0; p < n; ++p)
        acc += precompose_slot(f, p, Dm);
    return acc - dvf;
}

/*
 * Cochains of the combined complex: degree n holds an n-cochain for the
 * algebra part and an (n-1)-cochain for the operator part; degree 0 is a
 * bare module element.
 */
template <class K>
struct DiffCochain {
    Cochain<K> alg;
    std::optional<Cochain<K>> op;

    int degree() const { return alg.degree(); }

    bool is_zero() const { return alg.is_zero() && (!op || op->is_zero()); }

    friend bool operator==(const DiffCochain& a, const DiffCochain& b) {
        if (!(a.alg == b.alg))
            return false;
        if (a.op.has_value() != b.op.has_value())
            return false;
        return !a.op || *a.op == *b.op;
    }
};

template <class K>
DiffCochain<K> make_diff_cochain(Cochain<K> alg) {
    if (alg.degree() != 0)
        throw invalid_input_error("combined cochain of positive degree needs an operator part");
    return DiffCochain<K>{std::move(alg), std::nullopt};
}

template <class K>
DiffCochain<K> make_diff_cochain(Cochain<K> alg, Cochain<K> op) {
    if (alg.degree() == 0)
        throw invalid_input_error("combined degree-0 cochain has no operator part");
    if (op.degree() != alg.degree() - 1)
        throw invalid_input_error("combined cochain parts have mismatched degrees");
    if (!(alg.ctx() == op.ctx() || alg.ctx()->same_as(*op.ctx())))
        throw invalid_input_error("combined cochain parts have mismatched contexts");
    return DiffCochain<K>{std::move(alg), std::move(op)};
}

// coboundary of the combined complex:
//   degree 0:  v       |-> (d_H v, delta v)
//   degree n:  (f, g)  |-> (d_H f, d_H' g + (-1)^n delta f)
// with d_H the plain and d_H' the weight-shifted Hochschild coboundary.
template <class K>
DiffCochain<K> diff_d(const DiffCochain<K>& c, const DegreeBudget& budget = {}) {
    const int n = c.degree();
    Cochain<K> da = hochschild_d(c.alg, ActionMode::plain);
    Cochain<K> delta = delta_subset(c.alg, budget);
    if (n == 0)
        return make_diff_cochain(std::move(da), std::move(delta));
    Cochain<K> dop = hochschild_d(*c.op, ActionMode::deformed);
    if (n % 2 != 0)
        dop -= delta;
    else
        dop += delta;
    return make_diff_cochain(std::move(da), std::move(dop));
}

// membership in the reduced subcomplex: degree 0 is trimmed to zero and
// degree 1 to pairs with vanishing operator part
template <class K>
bool is_reduced_cochain(const DiffCochain<K>& c) {
    if (c.degree() == 0)
        return c.alg.is_zero();
    if (c.degree() == 1)
        return c.op->is_zero();
    return true;
}

// f(x) = d x as a degree-1 cochain over the regular bimodule
template <class K>
Cochain<K> derivation_cochain(std::shared_ptr<const DiffContext<K>> ctx) {
    if (ctx->dim_v() != ctx->dim_a() || !(ctx->module == regular_bimodule(ctx->algebra)))
        throw invalid_input_error("derivation_cochain needs the regular bimodule");
    Cochain<K> f(ctx, 1);
    const size_t D = ctx->dim_a();
    for (size_t j = 0; j < D; ++j)
        for (size_t a = 0; a < D; ++a)
            f.flat(j * D + a) = ctx->algebra.derivation(a, j);
    return f;
}

// f(x, y) = x y as a degree-2 cochain over the regular bimodule
template <class K>
Cochain<K> multiplication_cochain(std::shared_ptr<const DiffContext<K>> ctx) {
    if (ctx->dim_v() != ctx->dim_a() || !(ctx->module == regular_bimodule(ctx->algebra)))
        throw invalid_input_error("multiplication_cochain needs the regular bimodule");
    Cochain<K> f(ctx, 2);
    const size_t D = ctx->dim_a();
    for (size_t i = 0; i < D; ++i)
        for (size_t j = 0; j < D; ++j)
            for (size_t a = 0; a < D; ++a)
                f.flat((i * D + j) * D + a) = ctx->algebra.c(i, j, a);
    return f;
}

} // namespace diffalg

#endif
