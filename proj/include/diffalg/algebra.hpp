#ifndef DIFFALG_ALGEBRA_HPP
#define DIFFALG_ALGEBRA_HPP

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "matrix.hpp"

namespace diffalg {

/*
 * Finite-dimensional differential algebra of weight lambda, given by structure
 * data in a fixed basis e_0..e_{n-1}:
 *
 *   mult[(i*n+j)*n+k]   coefficient of e_k in e_i * e_j
 *   derivation(i, j)    coefficient of e_i in d(e_j)   (column j = image of e_j)
 *   weight              the scalar lambda in the twisted Leibniz law
 *                       d(xy) = d(x)y + x d(y) + lambda d(x)d(y)
 *
 * A unital algebra carries the coordinates of its two-sided unit and is
 * additionally required to satisfy d(1) = 0.
 */
template <class K>
struct DiffAlgebra {
    size_t dim = 0;
    std::vector<K> mult;
    bool unital = false;
    std::vector<K> unit;
    K weight{};
    Matrix<K> derivation;

    const K& c(size_t i, size_t j, size_t k) const { return mult[(i * dim + j) * dim + k]; }
    K& c(size_t i, size_t j, size_t k) { return mult[(i * dim + j) * dim + k]; }

    std::vector<K> basis_product(size_t i, size_t j) const {
        std::vector<K> v(dim);
        for (size_t k = 0; k < dim; ++k)
            v[k] = c(i, j, k);
        return v;
    }

    std::vector<K> product(std::span<const K> u, std::span<const K> w) const {
        std::vector<K> r(dim);
        for (size_t i = 0; i < dim; ++i) {
            if (u[i].is_zero())
                continue;
            for (size_t j = 0; j < dim; ++j) {
                if (w[j].is_zero())
                    continue;
                const K f = u[i] * w[j];
                for (size_t k = 0; k < dim; ++k) {
                    const K& s = c(i, j, k);
                    if (!s.is_zero())
                        r[k] += f * s;
                }
            }
        }
        return r;
    }

    std::vector<K> derive(const std::vector<K>& v) const { return derivation.mul_vec(v); }

    void check_shapes() const {
        if (mult.size() != dim * dim * dim)
            throw invalid_input_error("algebra: multiplication tensor has wrong size");
        if (derivation.rows() != dim || derivation.cols() != dim)
            throw invalid_input_error("algebra: derivation matrix has wrong shape");
        if (unital && unit.size() != dim)
            throw invalid_input_error("algebra: unit vector has wrong length");
        if (!unital && !unit.empty())
            throw invalid_input_error("algebra: unit vector given for non-unital algebra");
    }

    friend bool operator==(const DiffAlgebra& a, const DiffAlgebra& b) {
        if (a.dim != b.dim || a.unital != b.unital)
            return false;
        if (!(a.weight == b.weight) || a.derivation != b.derivation)
            return false;
        if (a.mult.size() != b.mult.size() || a.unit.size() != b.unit.size())
            return false;
        for (size_t i = 0; i < a.mult.size(); ++i)
            if (!(a.mult[i] == b.mult[i]))
                return false;
        for (size_t i = 0; i < a.unit.size(); ++i)
            if (!(a.unit[i] == b.unit[i]))
                return false;
        return true;
    }
};

/*
 * Differential bimodule over a DiffAlgebra: left/right action tensors plus a
 * module endomorphism d_V satisfying the twisted module Leibniz laws
 *
 *   d_V(xv) = d(x)v + x d_V(v) + lambda d(x) d_V(v)
 *   d_V(vx) = v d(x) + d_V(v)x + lambda d_V(v) d(x)
 *
 * left[i](a,b)  = coefficient of f_a in e_i . f_b
 * right[i](a,b) = coefficient of f_a in f_b . e_i
 */
template <class K>
struct DiffBimodule {
    size_t dim = 0;
    std::vector<Matrix<K>> left;
    std::vector<Matrix<K>> right;
    Matrix<K> dV;

    std::vector<K> act_left(size_t i, std::span<const K> v) const { return left[i].mul_vec(v); }
    std::vector<K> act_right(size_t i, std::span<const K> v) const { return right[i].mul_vec(v); }

    std::vector<K> act_left(std::span<const K> x, std::span<const K> v) const {
        std::vector<K> r(dim);
        for (size_t i = 0; i < x.size(); ++i) {
            if (x[i].is_zero())
                continue;
            std::vector<K> t = left[i].mul_vec(v);
            for (size_t a = 0; a < dim; ++a)
                if (!t[a].is_zero())
                    r[a] += x[i] * t[a];
        }
        return r;
    }

    std::vector<K> act_right(std::span<const K> v, std::span<const K> x) const {
        std::vector<K> r(dim);
        for (size_t i = 0; i < x.size(); ++i) {
            if (x[i].is_zero())
                continue;
            std::vector<K> t = right[i].mul_vec(v);
            for (size_t a = 0; a < dim; ++a)
                if (!t[a].is_zero())
                    r[a] += x[i] * t[a];
        }
        return r;
    }

    std::vector<K> derive(const std::vector<K>& v) const { return dV.mul_vec(v); }

    void check_shapes(size_t algebra_dim) const {
        if (left.size() != algebra_dim || right.size() != algebra_dim)
            throw invalid_input_error("module: action tensor count differs from algebra dimension");
        for (const auto& L : left)
            if (L.rows() != dim || L.cols() != dim)
                throw invalid_input_error("module: left action matrix has wrong shape");
        for (const auto& R : right)
            if (R.rows() != dim || R.cols() != dim)
                throw invalid_input_error("module: right action matrix has wrong shape");
        if (dV.rows() != dim || dV.cols() != dim)
            throw invalid_input_error("module: dV matrix has wrong shape");
    }

    friend bool operator==(const DiffBimodule& a, const DiffBimodule& b) {
        return a.dim == b.dim && a.left == b.left && a.right == b.right && a.dV == b.dV;
    }
};

// ---------------------------------------------------------------------------
// Validation.  Failed axioms come back as a report (they are verdicts about
// the input, not usage errors); malformed shapes throw.

struct Violation {
    std::string identity;        // which axiom family failed
    std::vector<size_t> indices; // witness basis indices
};

struct ValidationReport {
    bool pass = true;
    std::vector<Violation> violations;

    void fail(std::string identity, std::vector<size_t> indices) {
        pass = false;
        violations.push_back({std::move(identity), std::move(indices)});
    }
};

template <class K>
ValidationReport validate_diff_algebra(const DiffAlgebra<K>& A) {
    A.check_shapes();
    ValidationReport rep;
    const size_t n = A.dim;

    // associativity: (e_i e_j) e_k = e_i (e_j e_k)
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k) {
                std::vector<K> ij = A.basis_product(i, j);
                std::vector<K> jk = A.basis_product(j, k);
                std::vector<K> ei(n), ek(n);
                ei[i] = K(1);
                ek[k] = K(1);
                std::vector<K> l = A.product(ij, ek);
                std::vector<K> r = A.product(ei, jk);
                bool ok = true;
                for (size_t t = 0; t < n; ++t)
                    if (!(l[t] == r[t])) {
                        ok = false;
                        break;
                    }
                if (!ok)
                    rep.fail("associativity", {i, j, k});
            }

    if (A.unital) {
        for (size_t j = 0; j < n; ++j) {
            std::vector<K> ej(n);
            ej[j] = K(1);
            std::vector<K> l = A.product(A.unit, ej);
            std::vector<K> r = A.product(ej, A.unit);
            for (size_t t = 0; t < n; ++t) {
                const K want = t == j ? K(1) : K(0);
                if (!(l[t] == want)) {
                    rep.fail("left-unit", {j});
                    break;
                }
            }
            for (size_t t = 0; t < n; ++t) {
                const K want = t == j ? K(1) : K(0);
                if (!(r[t] == want)) {
                    rep.fail("right-unit", {j});
                    break;
                }
            }
        }
        std::vector<K> du = A.derive(A.unit);
        for (size_t t = 0; t < n; ++t)
            if (!du[t].is_zero()) {
                rep.fail("unit-derivation", {});
                break;
            }
    }

    // twisted Leibniz: d(e_i e_j) = d(e_i)e_j + e_i d(e_j) + lambda d(e_i)d(e_j)
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            std::vector<K> lhs = A.derive(A.basis_product(i, j));
            std::vector<K> di = A.derivation.column(i);
            std::vector<K> dj = A.derivation.column(j);
            std::vector<K> ei(n), ej(n);
            ei[i] = K(1);
            ej[j] = K(1);
            std::vector<K> rhs = A.product(di, ej);
            std::vector<K> t2 = A.product(ei, dj);
            std::vector<K> t3 = A.product(di, dj);
            for (size_t t = 0; t < n; ++t) {
                rhs[t] += t2[t];
                rhs[t] += A.weight * t3[t];
            }
            for (size_t t = 0; t < n; ++t)
                if (!(lhs[t] == rhs[t])) {
                    rep.fail("leibniz", {i, j});
                    break;
                }
        }
    return rep;
}

template <class K>
ValidationReport validate_diff_bimodule(const DiffAlgebra<K>& A, const DiffBimodule<K>& V) {
    A.check_shapes();
    V.check_shapes(A.dim);
    ValidationReport rep;
    const size_t n = A.dim;

    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            // left action: rho_l(e_i e_j) = rho_l(e_i) rho_l(e_j)
            Matrix<K> lhsL(V.dim, V.dim);
            for (size_t k = 0; k < n; ++k) {
                const K& s = A.c(i, j, k);
                if (s.is_zero())
                    continue;
                lhsL = lhsL + s * V.left[k];
            }
            if (lhsL != V.left[i] * V.left[j])
                rep.fail("left-action", {i, j});

            // right action: rho_r(e_i e_j) = rho_r(e_j) rho_r(e_i)
            Matrix<K> lhsR(V.dim, V.dim);
            for (size_t k = 0; k < n; ++k) {
                const K& s = A.c(i, j, k);
                if (s.is_zero())
                    continue;
                lhsR = lhsR + s * V.right[k];
            }
            if (lhsR != V.right[j] * V.right[i])
                rep.fail("right-action", {i, j});

            // compatibility: (e_i v) e_j = e_i (v e_j)
            if (V.right[j] * V.left[i] != V.left[i] * V.right[j])
                rep.fail("bimodule-compatibility", {i, j});
        }

    // module Leibniz laws, one basis element of A at a time
    for (size_t i = 0; i < n; ++i) {
        Matrix<K> dAi(V.dim, V.dim); // action of d(e_i) from the left
        Matrix<K> dAiR(V.dim, V.dim);
        for (size_t j = 0; j < n; ++j) {
            const K& s = A.derivation(j, i);
            if (s.is_zero())
                continue;
            dAi = dAi + s * V.left[j];
            dAiR = dAiR + s * V.right[j];
        }
        Matrix<K> lhs = V.dV * V.left[i];
        Matrix<K> rhs = dAi + V.left[i] * V.dV + A.weight * (dAi * V.dV);
        if (lhs != rhs)
            rep.fail("left-leibniz", {i});

        Matrix<K> lhsR = V.dV * V.right[i];
        Matrix<K> rhsR = dAiR + V.right[i] * V.dV + A.weight * (dAiR * V.dV);
        if (lhsR != rhsR)
            rep.fail("right-leibniz", {i});
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Constructions.

// The algebra as a bimodule over itself, with d_V = d.
template <class K>
DiffBimodule<K> regular_bimodule(const DiffAlgebra<K>& A) {
    DiffBimodule<K> V;
    V.dim = A.dim;
    V.left.assign(A.dim, Matrix<K>(A.dim, A.dim));
    V.right.assign(A.dim, Matrix<K>(A.dim, A.dim));
    for (size_t i = 0; i < A.dim; ++i)
        for (size_t a = 0; a < A.dim; ++a)
            for (size_t b = 0; b < A.dim; ++b) {
                V.left[i](a, b) = A.c(i, b, a);
                V.right[i](a, b) = A.c(b, i, a);
            }
    V.dV = A.derivation;
    return V;
}

// Bimodule with the weight-shifted actions x |> v = (x + lambda d(x)) v and
// v <| x = v (x + lambda d(x)); d_V is unchanged.  The shifted actions are
// again a differential bimodule over (A, d), which is what makes the operator
// complex below well defined.
template <class K>
struct DeformedBimodule {
    DiffBimodule<K> base;
    DiffBimodule<K> twisted;
};

template <class K>
DeformedBimodule<K> deform_bimodule(const DiffAlgebra<K>& A, const DiffBimodule<K>& V) {
    V.check_shapes(A.dim);
    DeformedBimodule<K> out{V, V};
    for (size_t i = 0; i < A.dim; ++i) {
        Matrix<K> L = V.left[i];
        Matrix<K> R = V.right[i];
        for (size_t j = 0; j < A.dim; ++j) {
            const K& s = A.derivation(j, i);
            if (s.is_zero())
                continue;
            L = L + (A.weight * s) * V.left[j];
            R = R + (A.weight * s) * V.right[j];
        }
        out.twisted.left[i] = std::move(L);
        out.twisted.right[i] = std::move(R);
    }
    return out;
}

// A two-sided unit is a solution of a linear system; used when constructions
// need to decide whether their output is unital.
template <class K>
std::optional<std::vector<K>> find_unit(const DiffAlgebra<K>& A) {
    if (A.dim == 0)
        return std::nullopt;
    // unknowns u_0..u_{n-1}; equations: sum_i u_i c(i,j,k) = delta_jk and
    // sum_i u_i c(j,i,k) = delta_jk for all j,k.
    const size_t n = A.dim;
    Matrix<K> M(2 * n * n, n);
    std::vector<K> b(2 * n * n);
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k) {
            const size_t rl = j * n + k;
            const size_t rr = n * n + j * n + k;
            for (size_t i = 0; i < n; ++i) {
                M(rl, i) = A.c(i, j, k);
                M(rr, i) = A.c(j, i, k);
            }
            b[rl] = j == k ? K(1) : K(0);
            b[rr] = b[rl];
        }
    return solve(M, b);
}

// Semidirect product A \ltimes V: multiplication (x+u)(y+v) = xy + xv + uy on
// A (+) V, derivation d (+) d_V.  The module part is a square-zero ideal.
template <class K>
DiffAlgebra<K> semidirect_product(const DiffAlgebra<K>& A, const DiffBimodule<K>& V) {
    A.check_shapes();
    V.check_shapes(A.dim);
    const size_t n = A.dim, m = V.dim, N = n + m;
    DiffAlgebra<K> S;
    S.dim = N;
    S.weight = A.weight;
    S.mult.assign(N * N * N, K(0));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            for (size_t k = 0; k < n; ++k)
                S.c(i, j, k) = A.c(i, j, k);
    for (size_t i = 0; i < n; ++i)
        for (size_t a = 0; a < m; ++a)
            for (size_t b = 0; b < m; ++b) {
                S.c(i, n + b, n + a) = V.left[i](a, b);   // e_i . f_b
                S.c(n + b, i, n + a) = V.right[i](a, b);  // f_b . e_i
            }
    S.derivation = Matrix<K>(N, N);
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            S.derivation(i, j) = A.derivation(i, j);
    for (size_t a = 0; a < m; ++a)
        for (size_t b = 0; b < m; ++b)
            S.derivation(n + a, n + b) = V.dV(a, b);
    // The product is unital exactly when A is unital and its unit acts as
    // identity on V; then (1, 0) is the unit and d(1,0) = 0 already holds.
    if (A.unital) {
        Matrix<K> UL(m, m), UR(m, m);
        for (size_t i = 0; i < n; ++i) {
            if (A.unit[i].is_zero())
                continue;
            UL = UL + A.unit[i] * V.left[i];
            UR = UR + A.unit[i] * V.right[i];
        }
        if (UL == Matrix<K>::identity(m) && UR == Matrix<K>::identity(m)) {
            S.unital = true;
            S.unit.assign(N, K(0));
            for (size_t i = 0; i < n; ++i)
                S.unit[i] = A.unit[i];
        }
    }
    return S;
}

// ---------------------------------------------------------------------------
// Kernel bimodule of a surjective homomorphism with square-zero kernel.

template <class K>
struct KernelBimodule {
    DiffBimodule<K> module;  // induced structure on ker(projection)
    Matrix<K> section;       // the section that was used (total_dim x base_dim)
    Matrix<K> kernel;        // kernel basis as columns (total_dim x module_dim)
};

template <class K>
KernelBimodule<K> kernel_bimodule(const DiffAlgebra<K>& total, const DiffAlgebra<K>& base,
                                  const Matrix<K>& projection,
                                  const std::optional<Matrix<K>>& supplied_section = std::nullopt) {
    total.check_shapes();
    base.check_shapes();
    if (projection.rows() != base.dim || projection.cols() != total.dim)
        throw invalid_input_error("kernel_bimodule: projection has wrong shape");
    if (!(total.weight == base.weight))
        throw invalid_input_error("kernel_bimodule: weights differ");
    const size_t n = base.dim, N = total.dim;

    // projection must be a differential-algebra homomorphism
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j) {
            std::vector<K> lhs = projection.mul_vec(total.basis_product(i, j));
            std::vector<K> rhs = base.product(projection.column(i), projection.column(j));
            for (size_t t = 0; t < n; ++t)
                if (!(lhs[t] == rhs[t]))
                    throw invalid_input_error(
                        "kernel_bimodule: projection is not multiplicative at basis pair (" +
                        std::to_string(i) + ", " + std::to_string(j) + ")");
        }
    if (projection * total.derivation != base.derivation * projection)
        throw invalid_input_error("kernel_bimodule: projection does not intertwine derivations");
    if (rank(projection) != n)
        throw invalid_input_error("kernel_bimodule: projection is not surjective");

    std::vector<std::vector<K>> kb = kernel_basis(projection);
    const size_t m = kb.size();
    Matrix<K> killed = Matrix<K>::from_columns(N, kb);

    // square-zero kernel
    for (size_t a = 0; a < m; ++a)
        for (size_t b = 0; b < m; ++b) {
            std::vector<K> prod = total.product(kb[a], kb[b]);
            for (size_t t = 0; t < N; ++t)
                if (!prod[t].is_zero())
                    throw invalid_input_error(
                        "kernel_bimodule: kernel is not square-zero at pair (" +
                        std::to_string(a) + ", " + std::to_string(b) + ")");
        }

    Matrix<K> section;
    if (supplied_section) {
        section = *supplied_section;
        if (section.rows() != N || section.cols() != n)
            throw invalid_input_error("kernel_bimodule: section has wrong shape");
        if (projection * section != Matrix<K>::identity(n))
            throw invalid_input_error("kernel_bimodule: supplied map is not a section");
    } else {
        // echelon-form preimages: column j solves projection . s = e_j with
        // free variables pinned to zero
        section = Matrix<K>(N, n);
        for (size_t j = 0; j < n; ++j) {
            std::vector<K> ej(n);
            ej[j] = K(1);
            auto s = solve(projection, ej);
            if (!s)
                throw internal_error("kernel_bimodule: surjective projection with no preimage");
            section.set_column(j, *s);
        }
    }

    DiffBimodule<K> V;
    V.dim = m;
    V.left.assign(n, Matrix<K>(m, m));
    V.right.assign(n, Matrix<K>(m, m));
    for (size_t i = 0; i < n; ++i) {
        std::vector<K> si = section.column(i);
        for (size_t b = 0; b < m; ++b) {
            auto lv = solve(killed, total.product(si, kb[b]));
            if (!lv)
                throw invalid_input_error("kernel_bimodule: kernel is not stable under the action");
            V.left[i].set_column(b, *lv);
            auto rv = solve(killed, total.product(kb[b], si));
            if (!rv)
                throw invalid_input_error("kernel_bimodule: kernel is not stable under the action");
            V.right[i].set_column(b, *rv);
        }
    }
    V.dV = Matrix<K>(m, m);
    for (size_t b = 0; b < m; ++b) {
        auto dv = solve(killed, total.derive(kb[b]));
        if (!dv)
            throw invalid_input_error("kernel_bimodule: kernel is not stable under the derivation");
        V.dV.set_column(b, *dv);
    }
    return {std::move(V), std::move(section), std::move(killed)};
}

// ---------------------------------------------------------------------------
// Shared (algebra, module) context for cochains.  The twisted actions are
// precomputed once; cochain operations pick plain or twisted as needed.

template <class K>
struct DiffContext {
    DiffAlgebra<K> algebra;
    DiffBimodule<K> module;
    DiffBimodule<K> twisted;

    size_t dim_a() const { return algebra.dim; }
    size_t dim_v() const { return module.dim; }

    static std::shared_ptr<const DiffContext> make(DiffAlgebra<K> a, DiffBimodule<K> v) {
        a.check_shapes();
        v.check_shapes(a.dim);
        auto ctx = std::make_shared<DiffContext>();
        ctx->twisted = deform_bimodule(a, v).twisted;
        ctx->algebra = std::move(a);
        ctx->module = std::move(v);
        return ctx;
    }

    static std::shared_ptr<const DiffContext> regular(DiffAlgebra<K> a) {
        DiffBimodule<K> v = regular_bimodule(a);
        return make(std::move(a), std::move(v));
    }

    bool same_as(const DiffContext& o) const {
        return algebra == o.algebra && module == o.module;
    }
};

// Change of basis e'_i = sum_p P(p,i) e_p, for invariance tests: transports
// multiplication, derivation, unit and module actions to the new basis.
template <class K>
DiffAlgebra<K> change_basis(const DiffAlgebra<K>& A, const Matrix<K>& P) {
    if (P.rows() != A.dim || P.cols() != A.dim)
        throw invalid_input_error("change_basis: matrix has wrong shape");
    Matrix<K> Pinv = inverse(P);
    DiffAlgebra<K> B;
    B.dim = A.dim;
    B.weight = A.weight;
    B.mult.assign(A.dim * A.dim * A.dim, K(0));
    const size_t n = A.dim;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            std::vector<K> prod = A.product(P.column(i), P.column(j));
            std::vector<K> coords = Pinv.mul_vec(prod);
            for (size_t k = 0; k < n; ++k)
                B.c(i, j, k) = coords[k];
        }
    B.derivation = Pinv * A.derivation * P;
    if (A.unital) {
        B.unital = true;
        B.unit = Pinv.mul_vec(A.unit);
    }
    return B;
}

// Same module, expressed over the re-based algebra (the module basis is kept).
template <class K>
DiffBimodule<K> change_basis(const DiffBimodule<K>& V, const Matrix<K>& P) {
    DiffBimodule<K> W;
    W.dim = V.dim;
    W.dV = V.dV;
    const size_t n = P.cols();
    W.left.assign(n, Matrix<K>(V.dim, V.dim));
    W.right.assign(n, Matrix<K>(V.dim, V.dim));
    for (size_t i = 0; i < n; ++i)
        for (size_t p = 0; p < P.rows(); ++p) {
            const K& s = P(p, i);
            if (s.is_zero())
                continue;
            W.left[i] = W.left[i] + s * V.left[p];
            W.right[i] = W.right[i] + s * V.right[p];
        }
    return W;
}

} // namespace diffalg

#endif
