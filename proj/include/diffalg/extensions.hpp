#ifndef DIFFALG_EXTENSIONS_HPP
#define DIFFALG_EXTENSIONS_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cohomology.hpp"

namespace diffalg {

/*
 * Abelian extensions of (A, d_A) by a differential bimodule V are glued from
 * a pair (psi, chi): psi bends the multiplication on A (+) V and chi bends
 * the derivation,
 *
 *   (x + u)(y + v) = xy + xv + uy + psi(x, y)
 *   d_E(x + u)     = d_A(x) + chi(x) + d_V(u)
 *
 * The result is associative iff psi is a Hochschild 2-cocycle, and d_E obeys
 * the weighted Leibniz rule iff the pair satisfies the mixed equation; the
 * two conditions together say (psi, chi) is a 2-cocycle of the combined
 * complex.
 */
template <class K>
struct TwoCocycle {
    Cochain<K> psi; // degree 2
    Cochain<K> chi; // degree 1
};

template <class K>
TwoCocycle<K> make_two_cocycle(Cochain<K> psi, Cochain<K> chi) {
    if (psi.degree() != 2 || chi.degree() != 1)
        throw invalid_input_error("a two-cocycle pair needs degrees (2, 1)");
    if (!(psi.ctx() == chi.ctx() || psi.ctx()->same_as(*chi.ctx())))
        throw invalid_input_error("two-cocycle parts live over different contexts");
    return TwoCocycle<K>{std::move(psi), std::move(chi)};
}

// flat coordinates in the combined degree-2 space: psi block first, then chi
template <class K>
std::vector<K> cocycle_to_flat(const TwoCocycle<K>& c) {
    std::vector<K> z(c.psi.coeffs());
    z.insert(z.end(), c.chi.coeffs().begin(), c.chi.coeffs().end());
    return z;
}

template <class K>
TwoCocycle<K> flat_to_cocycle(std::shared_ptr<const DiffContext<K>> ctx,
                              const std::vector<K>& z) {
    Cochain<K> psi(ctx, 2), chi(ctx, 1);
    if (z.size() != psi.size() + chi.size())
        throw invalid_input_error("flat cocycle vector has wrong length");
    for (size_t i = 0; i < psi.size(); ++i)
        psi.flat(i) = z[i];
    for (size_t i = 0; i < chi.size(); ++i)
        chi.flat(i) = z[psi.size() + i];
    return TwoCocycle<K>{std::move(psi), std::move(chi)};
}

// Witness against the cocycle conditions: `equation` is "hochschild" when
// the psi part fails to be a 2-cocycle and "differential" when the mixed
// equation fails; the tuple, value coordinate, and defect pin down where.
template <class K>
struct CocycleDefect {
    std::string equation;
    std::vector<size_t> tuple;
    size_t coord = 0;
    K value{};
};

template <class K>
std::string defect_message(const CocycleDefect<K>& d) {
    std::string s = "cocycle condition (" + d.equation + ") fails at (";
    for (size_t i = 0; i < d.tuple.size(); ++i) {
        if (i)
            s += ", ";
        s += std::to_string(d.tuple[i]);
    }
    s += ") coordinate " + std::to_string(d.coord) + " with defect " + d.value.to_string();
    return s;
}

class cocycle_error : public error {
public:
    explicit cocycle_error(const std::string& what) : error(what) {}
};

namespace detail {

// locate the first nonzero coefficient of a cochain, as a defect witness
template <class K>
std::optional<CocycleDefect<K>> first_nonzero(const Cochain<K>& f, const char* equation) {
    const size_t D = f.ctx()->dim_a(), m = f.ctx()->dim_v();
    for (size_t i = 0; i < f.size(); ++i) {
        if (f.flat(i).is_zero())
            continue;
        CocycleDefect<K> d;
        d.equation = equation;
        d.coord = i % m;
        size_t t = i / m;
        d.tuple.assign(f.degree(), 0);
        for (int p = f.degree(); p-- > 0;) {
            d.tuple[p] = t % D;
            t /= D;
        }
        d.value = f.flat(i);
        return d;
    }
    return std::nullopt;
}

} // namespace detail

template <class K>
std::optional<CocycleDefect<K>> find_cocycle_defect(const TwoCocycle<K>& c,
                                                    const DegreeBudget& budget = {}) {
    Cochain<K> mc = hochschild_d(c.psi, ActionMode::plain);
    if (auto d = detail::first_nonzero(mc, "hochschild"))
        return d;
    Cochain<K> dc = hochschild_d(c.chi, ActionMode::deformed) + delta_subset(c.psi, budget);
    return detail::first_nonzero(dc, "differential");
}

// Glue the extension algebra; no cocycle check here.  The total is reported
// non-unital on purpose: its validation then consists of exactly the
// associativity and Leibniz identities, which mirror the two cocycle
// conditions, and nothing else.
template <class K>
DiffAlgebra<K> extension_structure(const TwoCocycle<K>& c) {
    const auto& ctx = *c.psi.ctx();
    const DiffAlgebra<K>& A = ctx.algebra;
    const DiffBimodule<K>& V = ctx.module;
    const size_t n = A.dim, m = V.dim;

    DiffAlgebra<K> E = semidirect_product(A, V);
    E.unital = false;
    E.unit.clear();
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            auto v = c.psi.values(i * n + j);
            for (size_t a = 0; a < m; ++a)
                E.c(i, j, n + a) += v[a];
        }
    for (size_t j = 0; j < n; ++j) {
        auto v = c.chi.values(j);
        for (size_t a = 0; a < m; ++a)
            E.derivation(n + a, j) += v[a];
    }
    return E;
}

template <class K>
DiffAlgebra<K> build_extension(const TwoCocycle<K>& c, const DegreeBudget& budget = {}) {
    if (auto d = find_cocycle_defect(c, budget))
        throw cocycle_error(defect_message(*d));
    return extension_structure(c);
}

// ---------------------------------------------------------------------------
// Going the other way: read a cocycle off an extension presented by a
// projection and an inclusion, relative to a section.

template <class K>
struct ExtractedCocycle {
    TwoCocycle<K> cocycle;
    Matrix<K> section; // total_dim x base_dim, the section that was used
};

template <class K>
ExtractedCocycle<K> extract_cocycle(const DiffAlgebra<K>& total, const DiffAlgebra<K>& base,
                                    const DiffBimodule<K>& module, const Matrix<K>& projection,
                                    const Matrix<K>& inclusion,
                                    const std::optional<Matrix<K>>& supplied_section = std::nullopt) {
    total.check_shapes();
    base.check_shapes();
    module.check_shapes(base.dim);
    const size_t N = total.dim, n = base.dim, m = module.dim;
    if (projection.rows() != n || projection.cols() != N)
        throw invalid_input_error("extract_cocycle: projection has wrong shape");
    if (inclusion.rows() != N || inclusion.cols() != m)
        throw invalid_input_error("extract_cocycle: inclusion has wrong shape");
    if (N != n + m)
        throw invalid_input_error("extract_cocycle: dimensions do not add up");
    if (!(total.weight == base.weight))
        throw invalid_input_error("extract_cocycle: weights differ");

    // projection: surjective homomorphism intertwining the derivations
    for (size_t i = 0; i < N; ++i)
        for (size_t j = 0; j < N; ++j) {
            std::vector<K> lhs = projection.mul_vec(total.basis_product(i, j));
            std::vector<K> rhs = base.product(projection.column(i), projection.column(j));
            for (size_t t = 0; t < n; ++t)
                if (!(lhs[t] == rhs[t]))
                    throw invalid_input_error("extract_cocycle: projection is not multiplicative");
        }
    if (projection * total.derivation != base.derivation * projection)
        throw invalid_input_error("extract_cocycle: projection does not intertwine derivations");
    if (rank(projection) != n)
        throw invalid_input_error("extract_cocycle: projection is not surjective");

    // inclusion: injective, lands in the kernel, intertwines everything
    if (rank(inclusion) != m)
        throw invalid_input_error("extract_cocycle: inclusion is not injective");
    if (!(projection * inclusion).is_zero())
        throw invalid_input_error("extract_cocycle: inclusion does not land in the kernel");

    // the kernel squares to zero
    for (size_t a = 0; a < m; ++a)
        for (size_t b = 0; b < m; ++b) {
            std::vector<K> prod = total.product(inclusion.column(a), inclusion.column(b));
            for (size_t t = 0; t < N; ++t)
                if (!prod[t].is_zero())
                    throw invalid_input_error("extract_cocycle: kernel does not square to zero");
        }

    Matrix<K> section;
    if (supplied_section) {
        section = *supplied_section;
        if (section.rows() != N || section.cols() != n)
            throw invalid_input_error("extract_cocycle: section has wrong shape");
        if (projection * section != Matrix<K>::identity(n))
            throw invalid_input_error("extract_cocycle: supplied map is not a section");
    } else {
        section = Matrix<K>(N, n);
        for (size_t j = 0; j < n; ++j) {
            std::vector<K> ej(n);
            ej[j] = K(1);
            auto s = solve(projection, ej);
            if (!s)
                throw internal_error("extract_cocycle: surjection with no preimage");
            section.set_column(j, *s);
        }
    }

    // the given module structure must be the one induced on the kernel
    auto into_module = [&](const std::vector<K>& w, const char* what) {
        auto v = solve(inclusion, w);
        if (!v)
            throw invalid_input_error(std::string("extract_cocycle: ") + what);
        return *v;
    };
    for (size_t i = 0; i < n; ++i) {
        std::vector<K> si = section.column(i);
        for (size_t b = 0; b < m; ++b) {
            std::vector<K> lw =
                into_module(total.product(si, inclusion.column(b)), "kernel is not action-stable");
            std::vector<K> rw =
                into_module(total.product(inclusion.column(b), si), "kernel is not action-stable");
            for (size_t a = 0; a < m; ++a) {
                if (!(lw[a] == module.left[i](a, b)))
                    throw invalid_input_error(
                        "extract_cocycle: module left action disagrees with the extension");
                if (!(rw[a] == module.right[i](a, b)))
                    throw invalid_input_error(
                        "extract_cocycle: module right action disagrees with the extension");
            }
        }
    }
    for (size_t b = 0; b < m; ++b) {
        std::vector<K> dw =
            into_module(total.derive(inclusion.column(b)), "kernel is not derivation-stable");
        for (size_t a = 0; a < m; ++a)
            if (!(dw[a] == module.dV(a, b)))
                throw invalid_input_error(
                    "extract_cocycle: module differential disagrees with the extension");
    }

    auto ctx = DiffContext<K>::make(base, module);
    Cochain<K> psi(ctx, 2), chi(ctx, 1);
    for (size_t i = 0; i < n; ++i) {
        std::vector<K> si = section.column(i);
        for (size_t j = 0; j < n; ++j) {
            std::vector<K> w = total.product(si, section.column(j));
            std::vector<K> sij = section.mul_vec(base.basis_product(i, j));
            for (size_t t = 0; t < N; ++t)
                w[t] -= sij[t];
            std::vector<K> v = into_module(w, "section defect left the kernel");
            for (size_t a = 0; a < m; ++a)
                psi.flat((i * n + j) * m + a) = v[a];
        }
        std::vector<K> u = total.derive(si);
        std::vector<K> sd = section.mul_vec(base.derivation.column(i));
        for (size_t t = 0; t < N; ++t)
            u[t] -= sd[t];
        std::vector<K> v = into_module(u, "derivation defect left the kernel");
        for (size_t a = 0; a < m; ++a)
            chi.flat(i * m + a) = v[a];
    }
    return ExtractedCocycle<K>{TwoCocycle<K>{std::move(psi), std::move(chi)}, std::move(section)};
}

template <class K>
ExtractedCocycle<K> extract_cocycle(const DiffAlgebra<K>& total, const DiffAlgebra<K>& base,
                                    const DiffBimodule<K>& module, const Matrix<K>& projection,
                                    const Matrix<K>& inclusion, const Matrix<K>& section) {
    return extract_cocycle(total, base, module, projection, inclusion,
                           std::optional<Matrix<K>>(section));
}

// ---------------------------------------------------------------------------
// Equivalence.  Two cocycle pairs give isomorphic extensions (with an
// isomorphism fixing A and V) iff their difference is a coboundary of the
// reduced complex; the witness phi yields the isomorphism
// (x, v) |-> (x, phi(x) + v).

template <class K>
std::optional<Cochain<K>> cocycles_equivalent(const ComplexAssembler<K>& asmb,
                                              const TwoCocycle<K>& c1, const TwoCocycle<K>& c2) {
    std::vector<K> z = cocycle_to_flat(c1);
    std::vector<K> z2 = cocycle_to_flat(c2);
    for (size_t i = 0; i < z.size(); ++i)
        z[i] -= z2[i];
    auto phi = coboundary_preimage(asmb, ComplexKind::diff_reduced, 2, z);
    if (!phi)
        return std::nullopt;
    Cochain<K> f(asmb.ctx(), 1);
    for (size_t i = 0; i < f.size(); ++i)
        f.flat(i) = (*phi)[i];
    return f;
}

// block matrix of (x, v) |-> (x, phi(x) + v) on A (+) V
template <class K>
Matrix<K> equivalence_isomorphism(const Cochain<K>& phi) {
    const auto& ctx = *phi.ctx();
    const size_t n = ctx.dim_a(), m = ctx.dim_v();
    if (phi.degree() != 1)
        throw invalid_input_error("equivalence_isomorphism needs a degree-1 cochain");
    Matrix<K> Z = Matrix<K>::identity(n + m);
    for (size_t j = 0; j < n; ++j)
        for (size_t a = 0; a < m; ++a)
            Z(n + a, j) = phi.flat(j * m + a);
    return Z;
}

// Does P carry A isomorphically onto B, respecting multiplication, the
// derivations, the weight, and (when both algebras are unital) the units?
template <class K>
bool is_diff_algebra_isomorphism(const DiffAlgebra<K>& A, const DiffAlgebra<K>& B,
                                 const Matrix<K>& P) {
    if (A.dim != B.dim || !(A.weight == B.weight))
        return false;
    if (P.rows() != A.dim || P.cols() != A.dim || rank(P) != A.dim)
        return false;
    for (size_t i = 0; i < A.dim; ++i)
        for (size_t j = 0; j < A.dim; ++j) {
            std::vector<K> lhs = P.mul_vec(A.basis_product(i, j));
            std::vector<K> rhs = B.product(P.column(i), P.column(j));
            for (size_t t = 0; t < A.dim; ++t)
                if (!(lhs[t] == rhs[t]))
                    return false;
        }
    if (P * A.derivation != B.derivation * P)
        return false;
    if (A.unital != B.unital)
        return false;
    if (A.unital) {
        std::vector<K> pu = P.mul_vec(A.unit);
        for (size_t t = 0; t < A.dim; ++t)
            if (!(pu[t] == B.unit[t]))
                return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Classification: equivalence classes of extensions of A by V correspond to
// classes in degree 2 of the reduced combined complex.

template <class K>
struct ExtensionClassification {
    size_t dimension = 0;
    std::vector<TwoCocycle<K>> representatives;
};

template <class K>
ExtensionClassification<K> classify_extensions(const ComplexAssembler<K>& asmb) {
    DegreeHomology<K> h = asmb.homology(ComplexKind::diff_reduced, 2, true);
    ExtensionClassification<K> out;
    out.dimension = h.dimension;
    for (const auto& z : h.representatives)
        out.representatives.push_back(flat_to_cocycle(asmb.ctx(), z));
    return out;
}

// coordinates of the class of `c` in the representative basis computed by
// classify_extensions
template <class K>
std::vector<K> cocycle_class_coordinates(const ComplexAssembler<K>& asmb, const TwoCocycle<K>& c) {
    DegreeHomology<K> h = asmb.homology(ComplexKind::diff_reduced, 2, true);
    Matrix<K> reps =
        Matrix<K>::from_columns(asmb.dim(ComplexKind::diff_reduced, 2), h.representatives);
    return class_coordinates(reps, asmb.boundary(ComplexKind::diff_reduced, 1),
                             cocycle_to_flat(c));
}

} // namespace diffalg

#endif
