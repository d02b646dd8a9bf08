#ifndef DIFFALG_COHOMOLOGY_HPP
#define DIFFALG_COHOMOLOGY_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cochain.hpp"

namespace diffalg {

/*
 * The four complexes this library knows:
 *
 *   alg           Hochschild complex of A with coefficients in V
 *   op            same spaces, coboundary taken over the weight-shifted actions
 *   diff          combined complex, degree n = (n-cochain, (n-1)-cochain)
 *   diff_reduced  combined complex with degree 0 trimmed to zero and degree 1
 *                 to the algebra part
 */
enum class ComplexKind { alg, op, diff, diff_reduced };

inline const char* complex_name(ComplexKind k) {
    switch (k) {
    case ComplexKind::alg:
        return "alg";
    case ComplexKind::op:
        return "do";
    case ComplexKind::diff:
        return "diff";
    case ComplexKind::diff_reduced:
        return "diff_reduced";
    }
    return "?";
}

inline std::optional<ComplexKind> parse_complex_kind(std::string_view s) {
    if (s == "alg")
        return ComplexKind::alg;
    if (s == "do")
        return ComplexKind::op;
    if (s == "diff")
        return ComplexKind::diff;
    if (s == "diff_reduced")
        return ComplexKind::diff_reduced;
    return std::nullopt;
}

template <class K>
struct DegreeHomology {
    int degree = 0;
    size_t dim_space = 0; // dim of the cochain space in this degree
    size_t rank_out = 0;  // rank of the coboundary leaving this degree
    size_t rank_in = 0;   // rank of the coboundary entering this degree
    size_t dimension = 0; // dim of the cohomology
    std::vector<std::vector<K>> representatives;
};

/*
 * Builds and caches the coboundary matrices of all four complexes over one
 * (algebra, module) context.  Matrices act on flat cochain coordinates; for
 * the combined complexes the algebra part comes first, then the operator
 * part.  The degree budget bounds the largest cochain degree whose table is
 * materialized: the coboundary out of degree n touches degree n + 1.
 */
template <class K>
class ComplexAssembler {
public:
    explicit ComplexAssembler(std::shared_ptr<const DiffContext<K>> ctx, DegreeBudget budget = {})
        : ctx_(std::move(ctx)), budget_(budget) {}

    const std::shared_ptr<const DiffContext<K>>& ctx() const { return ctx_; }
    const DegreeBudget& budget() const { return budget_; }

    size_t dim(ComplexKind k, int n) const {
        if (n < 0)
            return 0;
        const size_t D = ctx_->dim_a(), m = ctx_->dim_v();
        switch (k) {
        case ComplexKind::alg:
        case ComplexKind::op:
            return pow_checked(D, n) * m;
        case ComplexKind::diff:
            return n == 0 ? m : pow_checked(D, n) * m + pow_checked(D, n - 1) * m;
        case ComplexKind::diff_reduced:
            if (n == 0)
                return 0;
            return pow_checked(D, n) * m + (n == 1 ? 0 : pow_checked(D, n - 1) * m);
        }
        throw internal_error("unknown complex kind");
    }

    // coboundary leaving degree n, as a dim(k, n+1) x dim(k, n) matrix
    const Matrix<K>& boundary(ComplexKind k, int n) const {
        auto key = std::make_pair(int(k), n);
        auto it = bnd_.find(key);
        if (it == bnd_.end())
            it = bnd_.emplace(key, build_boundary(k, n)).first;
        return it->second;
    }

    // matrix of the degree-preserving connecting map on n-cochains
    const Matrix<K>& delta_matrix(int n) const {
        auto it = delta_.find(n);
        if (it == delta_.end())
            it = delta_.emplace(n, build_delta(n)).first;
        return it->second;
    }

    DegreeHomology<K> homology(ComplexKind k, int n, bool with_representatives = false) const {
        DegreeHomology<K> H;
        H.degree = n;
        H.dim_space = dim(k, n);
        const Matrix<K>& out = boundary(k, n);
        H.rank_out = rank(out);
        const size_t nullity = H.dim_space - H.rank_out;
        H.rank_in = n > 0 ? rank(boundary(k, n - 1)) : 0;
        if (nullity < H.rank_in)
            throw internal_error("coboundaries do not compose to zero");
        H.dimension = nullity - H.rank_in;
        if (with_representatives && H.dimension > 0) {
            RowSpace<K> seen;
            if (n > 0) {
                const Matrix<K>& in = boundary(k, n - 1);
                for (size_t j = 0; j < in.cols(); ++j)
                    seen.add(in.column(j));
            }
            for (auto& z : kernel_basis(out))
                if (seen.add(z))
                    H.representatives.push_back(std::move(z));
            if (H.representatives.size() != H.dimension)
                throw internal_error("representative count disagrees with the computed dimension");
        }
        return H;
    }

private:
    void require_degree(int n) const {
        if (n > budget_.max_degree)
            throw resource_error("cochain tables of degree " + std::to_string(n) +
                                 " exceed the degree budget (" +
                                 std::to_string(budget_.max_degree) + ")");
    }

    const Matrix<K>& halg(int n) const {
        auto it = halg_.find(n);
        if (it == halg_.end())
            it = halg_.emplace(n, build_hochschild(n, ActionMode::plain)).first;
        return it->second;
    }
    const Matrix<K>& hop(int n) const {
        auto it = hop_.find(n);
        if (it == hop_.end())
            it = hop_.emplace(n, build_hochschild(n, ActionMode::deformed)).first;
        return it->second;
    }

    Matrix<K> build_hochschild(int n, ActionMode mode) const {
        require_degree(n + 1);
        const auto& A = ctx_->algebra;
        const DiffBimodule<K>& V = mode == ActionMode::plain ? ctx_->module : ctx_->twisted;
        const size_t D = ctx_->dim_a(), m = ctx_->dim_v();
        Matrix<K> M(pow_checked(D, n + 1) * m, pow_checked(D, n) * m);
        std::vector<size_t> t(n + 1, 0), sub(n, 0);
        do {
            const size_t ob = tuple_index(t, D) * m;

            for (int p = 0; p < n; ++p)
                sub[p] = t[p + 1];
            {
                const size_t cb = tuple_index(sub, D) * m;
                const Matrix<K>& L = V.left[t[0]];
                for (size_t a = 0; a < m; ++a)
                    for (size_t b = 0; b < m; ++b)
                        if (!L(a, b).is_zero())
                            M(ob + a, cb + b) += L(a, b);
            }

            for (int p = 0; p < n; ++p) {
                const bool neg = (p % 2) == 0;
                for (int q = 0; q < p; ++q)
                    sub[q] = t[q];
                for (int q = p + 1; q < n; ++q)
                    sub[q] = t[q + 1];
                for (size_t k = 0; k < D; ++k) {
                    const K& s = A.c(t[p], t[p + 1], k);
                    if (s.is_zero())
                        continue;
                    sub[p] = k;
                    const size_t cb = tuple_index(sub, D) * m;
                    for (size_t a = 0; a < m; ++a) {
                        if (neg)
                            M(ob + a, cb + a) -= s;
                        else
                            M(ob + a, cb + a) += s;
                    }
                }
            }

            {
                const bool neg = (n % 2) == 0;
                for (int p = 0; p < n; ++p)
                    sub[p] = t[p];
                const size_t cb = tuple_index(sub, D) * m;
                const Matrix<K>& R = V.right[t[n]];
                for (size_t a = 0; a < m; ++a)
                    for (size_t b = 0; b < m; ++b) {
                        if (R(a, b).is_zero())
                            continue;
                        if (neg)
                            M(ob + a, cb + b) -= R(a, b);
                        else
                            M(ob + a, cb + b) += R(a, b);
                    }
            }
        } while (next_tuple(t, D));
        return M;
    }

    Matrix<K> build_delta(int n) const {
        require_degree(n);
        const size_t D = ctx_->dim_a(), m = ctx_->dim_v();
        const Matrix<K>& Dm = ctx_->algebra.derivation;
        const size_t T = pow_checked(D, n);
        Matrix<K> M(T * m, T * m);

        std::vector<K> lambda_pow(size_t(n) + 1);
        lambda_pow[0] = K(1);
        for (int k = 1; k <= n; ++k)
            lambda_pow[k] = lambda_pow[k - 1] * ctx_->algebra.weight;

        std::vector<size_t> t(n, 0), work(n, 0);
        auto walk = [&](auto&& self, int p, int derived, const K& w, size_t ob) -> void {
            if (p == n) {
                if (derived == 0)
                    return;
                const K full = w * lambda_pow[derived - 1];
                if (full.is_zero())
                    return;
                const size_t cb = tuple_index(work, D) * m;
                for (size_t a = 0; a < m; ++a)
                    M(ob + a, cb + a) += full;
                return;
            }
            work[p] = t[p];
            self(self, p + 1, derived, w, ob);
            for (size_t j = 0; j < D; ++j) {
                const K& s = Dm(j, t[p]);
                if (s.is_zero())
                    continue;
                work[p] = j;
                self(self, p + 1, derived + 1, w * s, ob);
            }
            work[p] = t[p];
        };
        if (n > 0) {
            do {
                walk(walk, 0, 0, K(1), tuple_index(t, D) * m);
            } while (next_tuple(t, D));
        }

        const Matrix<K>& dV = ctx_->module.dV;
        for (size_t q = 0; q < T; ++q)
            for (size_t a = 0; a < m; ++a)
                for (size_t b = 0; b < m; ++b)
                    if (!dV(a, b).is_zero())
                        M(q * m + a, q * m + b) -= dV(a, b);
        return M;
    }

    static void paste(Matrix<K>& M, size_t r0, size_t c0, const Matrix<K>& B, bool negate) {
        for (size_t i = 0; i < B.rows(); ++i)
            for (size_t j = 0; j < B.cols(); ++j) {
                const K& x = B(i, j);
                if (x.is_zero())
                    continue;
                if (negate)
                    M(r0 + i, c0 + j) = -x;
                else
                    M(r0 + i, c0 + j) = x;
            }
    }

    Matrix<K> build_boundary(ComplexKind k, int n) const {
        if (n < 0)
            throw internal_error("boundary degree must be nonnegative");
        require_degree(n + 1);
        const size_t m = ctx_->dim_v();
        switch (k) {
        case ComplexKind::alg:
            return halg(n);
        case ComplexKind::op:
            return hop(n);
        case ComplexKind::diff: {
            if (n == 0) {
                const Matrix<K>& top = halg(0);
                const Matrix<K>& bot = delta_matrix(0);
                Matrix<K> M(top.rows() + bot.rows(), m);
                paste(M, 0, 0, top, false);
                paste(M, top.rows(), 0, bot, false);
                return M;
            }
            const Matrix<K>& da = halg(n);
            const Matrix<K>& dop = hop(n - 1);
            const Matrix<K>& dl = delta_matrix(n);
            Matrix<K> M(da.rows() + dl.rows(), da.cols() + dop.cols());
            paste(M, 0, 0, da, false);
            paste(M, da.rows(), 0, dl, n % 2 != 0);
            paste(M, da.rows(), da.cols(), dop, false);
            return M;
        }
        case ComplexKind::diff_reduced: {
            if (n == 0)
                return Matrix<K>(dim(ComplexKind::diff_reduced, 1), 0);
            if (n == 1) {
                const Matrix<K>& da = halg(1);
                const Matrix<K>& dl = delta_matrix(1);
                Matrix<K> M(da.rows() + dl.rows(), da.cols());
                paste(M, 0, 0, da, false);
                paste(M, da.rows(), 0, dl, true);
                return M;
            }
            // from degree 2 on the reduced complex agrees with the full one
            return build_boundary(ComplexKind::diff, n);
        }
        }
        throw internal_error("unknown complex kind");
    }

    std::shared_ptr<const DiffContext<K>> ctx_;
    DegreeBudget budget_;
    mutable std::map<int, Matrix<K>> halg_, hop_, delta_;
    mutable std::map<std::pair<int, int>, Matrix<K>> bnd_;
};

// Coordinates of the class [z] in the basis given by the representative
// columns, modulo the image of the incoming coboundary.  Fails if z is not a
// cocycle class of this degree.
template <class K>
std::vector<K> class_coordinates(const Matrix<K>& reps, const Matrix<K>& boundary_in,
                                 const std::vector<K>& z) {
    const size_t rows = z.size();
    Matrix<K> M(rows, reps.cols() + boundary_in.cols());
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < reps.cols(); ++j)
            M(i, j) = reps(i, j);
        for (size_t j = 0; j < boundary_in.cols(); ++j)
            M(i, reps.cols() + j) = boundary_in(i, j);
    }
    auto x = solve(M, z);
    if (!x)
        throw invalid_input_error("vector does not represent a class of this cohomology");
    return std::vector<K>(x->begin(), x->begin() + reps.cols());
}

// solve the coboundary equation leaving degree n - 1; nullopt when z is not
// a coboundary
template <class K>
std::optional<std::vector<K>> coboundary_preimage(const ComplexAssembler<K>& asmb, ComplexKind k,
                                                  int n, const std::vector<K>& z) {
    if (n < 1)
        throw invalid_input_error("coboundary_preimage needs degree at least 1");
    return solve(asmb.boundary(k, n - 1), z);
}

// ---------------------------------------------------------------------------
// Long exact sequence:
//
//   ... -> H^{n-1}_op -> H^n_diff -> H^n_alg -> H^n_op -> H^{n+1}_diff -> ...
//
// from the termwise-split short exact sequence of complexes in which the
// operator complex (shifted by one) includes into the combined complex and
// the algebra complex is the quotient.  The connecting map on n-cocycles is
// (-1)^n times the delta matrix.

struct LESNode {
    std::string at;    // complex the node lives in: "diff", "alg", or "do"
    int degree = 0;
    size_t dim_h = 0;
    size_t rank_in = 0;
    size_t rank_out = 0;
    bool exact = false;
};

struct LESReport {
    bool pass = true;
    std::vector<LESNode> nodes;
};

namespace detail {

template <class K>
struct LesNodeData {
    DegreeHomology<K> h;
    Matrix<K> reps; // representative columns
    Matrix<K> in;   // coboundary entering this degree
};

template <class K>
LesNodeData<K> les_node_data(const ComplexAssembler<K>& asmb, ComplexKind k, int n) {
    LesNodeData<K> d;
    d.h = asmb.homology(k, n, true);
    d.reps = Matrix<K>::from_columns(asmb.dim(k, n), d.h.representatives);
    d.in = n > 0 ? asmb.boundary(k, n - 1) : Matrix<K>(asmb.dim(k, n), 0);
    return d;
}

// matrix of the map induced on cohomology by the chain map `chain`
template <class K>
Matrix<K> induced_map(const Matrix<K>& chain, const LesNodeData<K>& src,
                      const LesNodeData<K>& tgt) {
    Matrix<K> out(tgt.h.dimension, src.h.dimension);
    for (size_t j = 0; j < src.h.dimension; ++j) {
        std::vector<K> z = chain.mul_vec(src.reps.column(j));
        std::vector<K> coords = class_coordinates(tgt.reps, tgt.in, z);
        out.set_column(j, coords);
    }
    return out;
}

} // namespace detail

template <class K>
LESReport les_check(const ComplexAssembler<K>& asmb, int max_degree) {
    using detail::LesNodeData;
    if (max_degree < 0)
        throw invalid_input_error("les_check needs a nonnegative degree range");
    LESReport rep;

    std::vector<LesNodeData<K>> hdiff, halg, hop;
    for (int n = 0; n <= max_degree; ++n) {
        hdiff.push_back(detail::les_node_data(asmb, ComplexKind::diff, n));
        halg.push_back(detail::les_node_data(asmb, ComplexKind::alg, n));
        hop.push_back(detail::les_node_data(asmb, ComplexKind::op, n));
    }

    // chain maps
    auto iota = [&](int n) { // C^{n-1}_op -> C^n_diff
        Matrix<K> M(asmb.dim(ComplexKind::diff, n), asmb.dim(ComplexKind::op, n - 1));
        const size_t off = asmb.dim(ComplexKind::alg, n);
        for (size_t j = 0; j < M.cols(); ++j)
            M(off + j, j) = K(1);
        return M;
    };
    auto pi = [&](int n) { // C^n_diff -> C^n_alg
        Matrix<K> M(asmb.dim(ComplexKind::alg, n), asmb.dim(ComplexKind::diff, n));
        for (size_t i = 0; i < M.rows(); ++i)
            M(i, i) = K(1);
        return M;
    };

    std::vector<Matrix<K>> pi_ind(max_degree + 1), iota_ind(max_degree + 1),
        delta_ind(max_degree + 1);
    for (int n = 0; n <= max_degree; ++n) {
        pi_ind[n] = detail::induced_map(pi(n), hdiff[n], halg[n]);
        if (n >= 1)
            iota_ind[n] = detail::induced_map(iota(n), hop[n - 1], hdiff[n]);
        Matrix<K> conn = asmb.delta_matrix(n);
        if (n % 2 != 0)
            conn = -conn;
        delta_ind[n] = detail::induced_map(conn, halg[n], hop[n]);
    }

    auto check_node = [&](const char* at, int degree, const Matrix<K>& in, const Matrix<K>& out,
                          size_t dim_h) {
        LESNode node;
        node.at = at;
        node.degree = degree;
        node.dim_h = dim_h;
        node.rank_in = rank(in);
        node.rank_out = rank(out);
        const bool composes_to_zero = (out * in).is_zero();
        node.exact = composes_to_zero && node.rank_in + node.rank_out == dim_h;
        rep.pass = rep.pass && node.exact;
        rep.nodes.push_back(std::move(node));
    };

    for (int n = 0; n <= max_degree; ++n) {
        const Matrix<K> no_in(hdiff[n].h.dimension, 0);
        check_node("diff", n, n >= 1 ? iota_ind[n] : no_in, pi_ind[n], hdiff[n].h.dimension);
        check_node("alg", n, pi_ind[n], delta_ind[n], halg[n].h.dimension);
        if (n + 1 <= max_degree)
            check_node("do", n, delta_ind[n], iota_ind[n + 1], hop[n].h.dimension);
    }
    return rep;
}

} // namespace diffalg

#endif
