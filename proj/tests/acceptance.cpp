// Acceptance gate for the library: eight criteria, one verdict line each,
// exit status zero only when every line passes.  All arithmetic is exact; a
// single wrong entry anywhere fails its criterion outright.

#include <chrono>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "corpus_builders.hpp"
#include "test_support.hpp"

using namespace diffalg;
using K = Rational;
using testsupport::random_cochain;
using testsupport::random_matrix;
using testsupport::random_pair;
using testsupport::random_scalar;

namespace {

struct Verdict {
    bool ok = true;
    std::string note;

    void fail(const std::string& why) {
        if (ok) {
            ok = false;
            note = why;
        }
    }
};

template <class F>
Verdict guarded(F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        Verdict v;
        v.fail(std::string("exception: ") + e.what());
        return v;
    }
}

// 1: the plain, twisted and combined coboundaries square to zero on at least
// a hundred random cochains per corpus instance, inside two minutes
Verdict squares_vanish() {
    Verdict v;
    const auto start = std::chrono::steady_clock::now();
    size_t cochains = 0;
    for (const auto& inst : corpus::instances<K>()) {
        auto ctx = inst.context();
        std::mt19937 rng(101);
        for (int trial = 0; trial < 34 && v.ok; ++trial)
            for (int deg = 0; deg <= 2 && v.ok; ++deg) {
                Cochain<K> f = random_cochain<K>(ctx, deg, rng);
                ++cochains;
                if (!hochschild_d(hochschild_d(f, ActionMode::plain), ActionMode::plain)
                         .is_zero())
                    v.fail(inst.name + ": plain coboundary square is nonzero");
                if (!hochschild_d(hochschild_d(f, ActionMode::deformed), ActionMode::deformed)
                         .is_zero())
                    v.fail(inst.name + ": twisted coboundary square is nonzero");
                DiffCochain<K> c =
                    deg == 0 ? make_diff_cochain(f)
                             : make_diff_cochain(f, random_cochain<K>(ctx, deg - 1, rng));
                if (!diff_d(diff_d(c)).is_zero())
                    v.fail(inst.name + ": combined coboundary square is nonzero");
            }
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (v.ok && ms >= 120000)
        v.fail("runtime budget of two minutes exceeded");
    if (v.ok) {
        std::ostringstream os;
        os << cochains << " cochains, " << ms << " ms";
        v.note = os.str();
    }
    return v;
}

// 2: delta carries plain coboundaries to twisted ones
Verdict delta_intertwines() {
    Verdict v;
    for (const auto& inst : corpus::instances<K>()) {
        auto ctx = inst.context();
        std::mt19937 rng(202);
        for (int deg = 0; deg <= 3 && v.ok; ++deg)
            for (int trial = 0; trial < 5 && v.ok; ++trial) {
                Cochain<K> f = random_cochain<K>(ctx, deg, rng);
                Cochain<K> lhs = delta_subset(hochschild_d(f, ActionMode::plain));
                Cochain<K> rhs = hochschild_d(delta_subset(f), ActionMode::deformed);
                if (!(lhs == rhs))
                    v.fail(inst.name + ": intertwining fails in degree " + std::to_string(deg));
            }
    }
    return v;
}

// 3: the subset walk and the slot-substitution route compute the same delta
Verdict delta_routes_agree() {
    Verdict v;
    size_t covered = 0;
    for (const auto& inst : corpus::instances<K>()) {
        if (inst.algebra.weight.is_zero())
            continue;
        ++covered;
        auto ctx = inst.context();
        std::mt19937 rng(303);
        for (int deg = 1; deg <= 4 && v.ok; ++deg)
            for (int trial = 0; trial < 4 && v.ok; ++trial) {
                Cochain<K> f = random_cochain<K>(ctx, deg, rng);
                if (!(delta_subset(f) == delta_tensor(f)))
                    v.fail(inst.name + ": routes disagree in degree " + std::to_string(deg));
            }
    }
    if (v.ok) {
        v.note = std::to_string(covered) + " nonzero-weight instances";
        if (covered == 0)
            v.fail("no nonzero-weight instance in the corpus");
    }
    return v;
}

// 4: the long exact sequence is exact at every node through degree 3
Verdict sequence_exact() {
    Verdict v;
    for (const auto& inst : corpus::instances<K>()) {
        ComplexAssembler<K> asmb(inst.context());
        LESReport rep = les_check(asmb, 3);
        if (!rep.pass || rep.nodes.size() != 11) {
            for (const auto& nd : rep.nodes)
                if (!nd.exact) {
                    v.fail(inst.name + ": not exact at " + nd.at + " degree " +
                           std::to_string(nd.degree));
                    break;
                }
            if (v.ok)
                v.fail(inst.name + ": wrong node count");
        }
    }
    return v;
}

// 5: dimensions that were computed by hand
Verdict desk_values() {
    Verdict v;
    for (const K& lambda : {K(0), K(1), corpus::frac<K>(-2, 3)}) {
        DiffAlgebra<K> A = corpus::ground_field<K>();
        A.weight = lambda;
        if (!validate_diff_algebra(A).pass) {
            v.fail("ground field rejects weight " + lambda.to_string());
            continue;
        }
        ComplexAssembler<K> asmb(DiffContext<K>::regular(A));
        if (asmb.homology(ComplexKind::diff, 0).dimension != 1)
            v.fail("ground field, weight " + lambda.to_string() + ": combined H0 is not 1");
        if (asmb.homology(ComplexKind::diff, 1).dimension != 1)
            v.fail("ground field, weight " + lambda.to_string() + ": combined H1 is not 1");
    }
    ComplexAssembler<K> asmb(DiffContext<K>::regular(corpus::k2_shift<K>()));
    if (asmb.homology(ComplexKind::diff, 0).dimension != 1)
        v.fail("swap algebra: combined H0 is not 1");
    return v;
}

// 6: gluing a pair into an algebra validates exactly when the pair is closed
Verdict glue_iff_closed() {
    Verdict v;
    size_t disagreements = 0, closed_seen = 0, open_seen = 0;
    for (const auto& inst : corpus::instances<K>()) {
        auto ctx = inst.context();
        ComplexAssembler<K> asmb(ctx);
        Matrix<K> b = asmb.boundary(ComplexKind::diff_reduced, 1);
        auto reps = asmb.homology(ComplexKind::diff_reduced, 2, true).representatives;
        std::mt19937 rng(606);
        for (int t = 0; t < 200; ++t) {
            TwoCocycle<K> c = [&] {
                if (t % 3 == 0) {
                    std::vector<K> phi(b.cols());
                    for (K& x : phi)
                        x = random_scalar<K>(rng);
                    return flat_to_cocycle(ctx, b.mul_vec(phi));
                }
                if (t % 3 == 1 && !reps.empty())
                    return flat_to_cocycle(ctx, reps[size_t(t) % reps.size()]);
                return random_pair<K>(ctx, rng);
            }();
            const bool closed = !find_cocycle_defect(c).has_value();
            const bool valid = validate_diff_algebra(extension_structure(c)).pass;
            (closed ? closed_seen : open_seen) += 1;
            if (closed != valid)
                ++disagreements;
        }
    }
    if (disagreements)
        v.fail(std::to_string(disagreements) + " disagreements");
    else if (closed_seen == 0 || open_seen == 0)
        v.fail("sampling failed to cover both closed and non-closed pairs");
    else
        v.note = std::to_string(closed_seen) + " closed / " + std::to_string(open_seen) +
                 " open samples";
    return v;
}

// 7: building an extension and reading its cocycle back are inverse; the
// section only moves the answer by a coboundary; matching classes give
// isomorphic totals
Verdict extensions_round_trip() {
    Verdict v;
    for (const auto& inst : corpus::instances<K>()) {
        auto ctx = inst.context();
        const size_t n = ctx->dim_a(), m = ctx->dim_v();
        ComplexAssembler<K> asmb(ctx);
        Matrix<K> b = asmb.boundary(ComplexKind::diff_reduced, 1);
        std::mt19937 rng(707);

        std::vector<TwoCocycle<K>> pool;
        for (int t = 0; t < 2; ++t) {
            std::vector<K> phi(b.cols());
            for (K& x : phi)
                x = random_scalar<K>(rng);
            pool.push_back(flat_to_cocycle(ctx, b.mul_vec(phi)));
        }
        for (const auto& rep : asmb.homology(ComplexKind::diff_reduced, 2, true).representatives)
            pool.push_back(flat_to_cocycle(ctx, rep));

        Matrix<K> proj(n, n + m), incl(n + m, m);
        for (size_t i = 0; i < n; ++i)
            proj(i, i) = K(1);
        for (size_t a = 0; a < m; ++a)
            incl(n + a, a) = K(1);

        for (const TwoCocycle<K>& c : pool) {
            if (!v.ok)
                break;
            DiffAlgebra<K> total = build_extension(c);

            ExtractedCocycle<K> canon =
                extract_cocycle(total, inst.algebra, ctx->module, proj, incl);
            if (!(canon.cocycle.psi == c.psi) || !(canon.cocycle.chi == c.chi)) {
                v.fail(inst.name + ": canonical extraction changed the cocycle");
                break;
            }

            auto section_with = [&](const Matrix<K>& lower) {
                Matrix<K> s(n + m, n);
                for (size_t i = 0; i < n; ++i)
                    s(i, i) = K(1);
                for (size_t a = 0; a < m; ++a)
                    for (size_t j = 0; j < n; ++j)
                        s(n + a, j) = lower(a, j);
                return s;
            };
            Matrix<K> low1 = random_matrix<K>(m, n, rng);
            Matrix<K> low2 = random_matrix<K>(m, n, rng);
            ExtractedCocycle<K> e1 = extract_cocycle(total, inst.algebra, ctx->module, proj,
                                                     incl, section_with(low1));
            ExtractedCocycle<K> e2 = extract_cocycle(total, inst.algebra, ctx->module, proj,
                                                     incl, section_with(low2));
            std::vector<K> got = cocycle_to_flat(e2.cocycle);
            std::vector<K> other = cocycle_to_flat(e1.cocycle);
            for (size_t i = 0; i < got.size(); ++i)
                got[i] -= other[i];
            std::vector<K> phi(n * m);
            for (size_t j = 0; j < n; ++j)
                for (size_t a = 0; a < m; ++a)
                    phi[j * m + a] = low2(a, j) - low1(a, j);
            std::vector<K> want = b.mul_vec(phi);
            for (size_t i = 0; i < got.size(); ++i)
                if (!(got[i] == want[i])) {
                    v.fail(inst.name + ": section change is not the expected coboundary");
                    break;
                }
            if (!v.ok)
                break;

            std::vector<K> shift(b.cols());
            for (K& x : shift)
                x = random_scalar<K>(rng);
            std::vector<K> moved = cocycle_to_flat(c);
            std::vector<K> delta = b.mul_vec(shift);
            for (size_t i = 0; i < moved.size(); ++i)
                moved[i] += delta[i];
            TwoCocycle<K> c2 = flat_to_cocycle(ctx, moved);
            auto link = cocycles_equivalent(asmb, c, c2);
            if (!link) {
                v.fail(inst.name + ": cohomologous pair not recognized");
                break;
            }
            if (!is_diff_algebra_isomorphism(extension_structure(c), extension_structure(c2),
                                             equivalence_isomorphism(*link)))
                v.fail(inst.name + ": comparison map is not an isomorphism of the totals");
        }
    }
    return v;
}

// 8: infinitesimals of valid series are closed, gauges are recovered exactly
// through order 4, and a non-exact seed is obstructed at order 1 with the
// right class
Verdict deformations_behave() {
    Verdict v;
    for (const auto& inst : corpus::instances<K>()) {
        auto rctx = DiffContext<K>::regular(inst.algebra);
        ComplexAssembler<K> asmb(rctx);
        const size_t dim = inst.algebra.dim;
        std::mt19937 rng(808);
        std::vector<Cochain<K>> zmus(4, Cochain<K>(rctx, 2));
        std::vector<Cochain<K>> zders(4, Cochain<K>(rctx, 1));
        TruncatedDeformation<K> trivial = make_deformation(rctx, zmus, zders);

        for (int t = 0; t < 3 && v.ok; ++t) {
            std::vector<Matrix<K>> corr;
            for (int k = 0; k < 4; ++k)
                corr.push_back(random_matrix<K>(dim, dim, rng));
            TruncatedDeformation<K> def = apply_gauge(trivial, make_gauge(dim, corr));
            if (!check_deformation(def).pass) {
                v.fail(inst.name + ": gauged trivial series fails the equations");
                break;
            }
            if (find_cocycle_defect(infinitesimal(def))) {
                v.fail(inst.name + ": infinitesimal of a valid series is not closed");
                break;
            }
            TrivializeResult<K> res = trivialize(asmb, def);
            if (!res.trivial) {
                v.fail(inst.name + ": trivial series reported obstructed");
                break;
            }
            if (!(apply_gauge(def, res.gauge) == trivial))
                v.fail(inst.name + ": recovered gauge does not flatten the series");
        }
        if (!v.ok)
            break;
    }
    if (!v.ok)
        return v;

    // an honestly deformable but non-trivializable series: x*x = t
    DiffAlgebra<K> A = corpus::dual_numbers_static<K>();
    auto rctx = DiffContext<K>::regular(A);
    ComplexAssembler<K> asmb(rctx);
    {
        std::vector<Cochain<K>> mus(4, Cochain<K>(rctx, 2));
        std::vector<Cochain<K>> ders(4, Cochain<K>(rctx, 1));
        mus[0].flat((1 * 2 + 1) * 2 + 0) = K(1);
        TruncatedDeformation<K> def = make_deformation(rctx, mus, ders);
        if (!check_deformation(def).pass)
            v.fail("square-root series fails the equations");
        else if (find_cocycle_defect(infinitesimal(def)))
            v.fail("square-root infinitesimal is not closed");
        else if (trivialize(asmb, def).trivial)
            v.fail("square-root series reported trivializable");
    }

    DegreeHomology<K> h = asmb.homology(ComplexKind::diff_reduced, 2, true);
    if (h.dimension < 1) {
        v.fail("expected a nonzero reduced degree-2 class");
        return v;
    }
    TwoCocycle<K> seed = flat_to_cocycle(rctx, h.representatives[0]);
    TruncatedDeformation<K> def =
        make_deformation(rctx, std::vector<Cochain<K>>{seed.psi},
                         std::vector<Cochain<K>>{seed.chi});
    TrivializeResult<K> res = trivialize(asmb, def);
    if (res.trivial || res.obstruction_order != 1)
        v.fail("non-exact seed not obstructed at order 1");
    else {
        std::vector<K> expected(size_t(h.dimension));
        expected[0] = K(1);
        if (!(res.obstruction_class == expected))
            v.fail("obstruction class of the seed is wrong");
        else if (v.ok)
            v.note = "obstruction class pinned to the first representative";
    }
    return v;
}

} // namespace

int main() {
    struct Row {
        int num;
        const char* what;
        Verdict (*fn)();
    };
    const Row rows[] = {
        {1, "plain, twisted and combined coboundaries square to zero", squares_vanish},
        {2, "delta intertwines the plain and twisted coboundaries", delta_intertwines},
        {3, "subset and substitution routes for delta agree entrywise", delta_routes_agree},
        {4, "long exact sequence is exact at every node through degree 3", sequence_exact},
        {5, "hand-computed dimensions for the field and the swap algebra", desk_values},
        {6, "glued structure validates exactly for closed pairs", glue_iff_closed},
        {7, "extensions and cocycles round trip, sections accounted for", extensions_round_trip},
        {8, "deformations: closed infinitesimals, gauge recovery, obstruction",
         deformations_behave},
    };
    bool all = true;
    for (const Row& r : rows) {
        Verdict v = guarded(r.fn);
        all = all && v.ok;
        std::cout << (v.ok ? "PASS" : "FAIL") << "  " << r.num << "  " << r.what;
        if (!v.note.empty())
            std::cout << "  [" << v.note << "]";
        std::cout << "\n" << std::flush;
    }
    return all ? 0 : 1;
}
