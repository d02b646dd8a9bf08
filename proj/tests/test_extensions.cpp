#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "corpus_builders.hpp"
#include "test_support.hpp"

using namespace diffalg;
using K = Rational;

namespace {

// canonical split maps for a total built as A-coordinates followed by
// V-coordinates
template <class K2>
Matrix<K2> canonical_projection(size_t n, size_t m) {
    Matrix<K2> P(n, n + m);
    for (size_t i = 0; i < n; ++i)
        P(i, i) = K2(1);
    return P;
}

template <class K2>
Matrix<K2> canonical_inclusion(size_t n, size_t m) {
    Matrix<K2> I(n + m, m);
    for (size_t a = 0; a < m; ++a)
        I(n + a, a) = K2(1);
    return I;
}

template <class K2>
TwoCocycle<K2> random_coboundary(const ComplexAssembler<K2>& asmb, std::mt19937& rng) {
    auto ctx = asmb.ctx();
    Cochain<K2> phi = testsupport::random_cochain<K2>(ctx, 1, rng);
    std::vector<K2> z =
        asmb.boundary(ComplexKind::diff_reduced, 1).mul_vec(phi.coeffs());
    return flat_to_cocycle(ctx, z);
}

} // namespace

TEST_CASE("cocycle flattening round trips") {
    std::mt19937 rng(606);
    auto ctx = DiffContext<K>::regular(corpus::k2_shift<K>());
    TwoCocycle<K> c = testsupport::random_pair<K>(ctx, rng);
    TwoCocycle<K> back = flat_to_cocycle(ctx, cocycle_to_flat(c));
    CHECK(back.psi == c.psi);
    CHECK(back.chi == c.chi);
}

TEST_CASE("gluing validates exactly for cocycles") {
    std::mt19937 rng(707);
    for (const auto& inst : corpus::instances<K>()) {
        INFO(inst.name);
        auto ctx = inst.context();
        ComplexAssembler<K> asmb(ctx);
        int agreements = 0;
        for (int t = 0; t < 40; ++t) {
            TwoCocycle<K> c = t % 4 == 0 ? random_coboundary<K>(asmb, rng)
                                         : testsupport::random_pair<K>(ctx, rng);
            const bool is_cocycle = !find_cocycle_defect(c).has_value();
            DiffAlgebra<K> E = extension_structure(c);
            const bool valid = validate_diff_algebra(E).pass;
            CHECK(valid == is_cocycle);
            agreements += valid == is_cocycle;
        }
        CHECK(agreements == 40);
    }
}

TEST_CASE("build then extract along the canonical section is the identity") {
    std::mt19937 rng(808);
    for (const auto& inst : corpus::instances<K>()) {
        INFO(inst.name);
        auto ctx = inst.context();
        ComplexAssembler<K> asmb(ctx);
        const size_t n = ctx->dim_a(), m = ctx->dim_v();
        TwoCocycle<K> c = random_coboundary<K>(asmb, rng);
        DiffAlgebra<K> E = build_extension(c);
        ExtractedCocycle<K> out =
            extract_cocycle(E, inst.algebra, ctx->module, canonical_projection<K>(n, m),
                            canonical_inclusion<K>(n, m));
        CHECK(out.cocycle.psi == c.psi);
        CHECK(out.cocycle.chi == c.chi);
    }
}

TEST_CASE("two sections differ by a coboundary") {
    std::mt19937 rng(909);
    auto ctx = DiffContext<K>::regular(corpus::k3_cyclic<K>());
    ComplexAssembler<K> asmb(ctx);
    const size_t n = 3, m = 3;
    TwoCocycle<K> c = random_coboundary<K>(asmb, rng);
    DiffAlgebra<K> E = build_extension(c);
    Matrix<K> proj = canonical_projection<K>(n, m);
    Matrix<K> incl = canonical_inclusion<K>(n, m);

    // perturb the canonical section by a random map into the kernel
    Matrix<K> pert = testsupport::random_matrix<K>(m, n, rng);
    Matrix<K> s2(n + m, n);
    for (size_t j = 0; j < n; ++j) {
        s2(j, j) = K(1);
        for (size_t a = 0; a < m; ++a)
            s2(n + a, j) = pert(a, j);
    }
    ExtractedCocycle<K> e1 = extract_cocycle(E, ctx->algebra, ctx->module, proj, incl);
    ExtractedCocycle<K> e2 = extract_cocycle(E, ctx->algebra, ctx->module, proj, incl, s2);

    auto phi = cocycles_equivalent(asmb, e1.cocycle, e2.cocycle);
    REQUIRE(phi.has_value());

    // and the difference is exactly the boundary of the section difference
    Cochain<K> diff_phi(ctx, 1);
    for (size_t j = 0; j < n; ++j)
        for (size_t a = 0; a < m; ++a)
            diff_phi.flat(j * m + a) = s2(n + a, j); // s2 - s1 lands in V
    std::vector<K> want =
        asmb.boundary(ComplexKind::diff_reduced, 1).mul_vec(diff_phi.coeffs());
    std::vector<K> got = cocycle_to_flat(e2.cocycle);
    std::vector<K> z1 = cocycle_to_flat(e1.cocycle);
    for (size_t i = 0; i < got.size(); ++i)
        got[i] -= z1[i];
    CHECK(got == want);
}

TEST_CASE("equivalent cocycles give isomorphic extensions") {
    std::mt19937 rng(111);
    auto ctx = DiffContext<K>::regular(corpus::k2_shift<K>());
    ComplexAssembler<K> asmb(ctx);
    TwoCocycle<K> c1 = random_coboundary<K>(asmb, rng);
    TwoCocycle<K> c2 = random_coboundary<K>(asmb, rng);
    auto phi = cocycles_equivalent(asmb, c1, c2);
    REQUIRE(phi.has_value());
    Matrix<K> Z = equivalence_isomorphism(*phi);
    // phi satisfies c1 - c2 = boundary(phi), so (x, v) -> (x, phi(x) + v)
    // carries the first total onto the second
    CHECK(is_diff_algebra_isomorphism(extension_structure(c1), extension_structure(c2), Z));
}

TEST_CASE("inequivalent cocycles are recognized") {
    auto ctx = DiffContext<K>::regular(corpus::dual_numbers_static<K>());
    ComplexAssembler<K> asmb(ctx);
    DegreeHomology<K> h = asmb.homology(ComplexKind::diff_reduced, 2, true);
    REQUIRE(h.dimension == 2);
    TwoCocycle<K> rep0 = flat_to_cocycle(ctx, h.representatives[0]);
    TwoCocycle<K> zero =
        make_two_cocycle(Cochain<K>(ctx, 2), Cochain<K>(ctx, 1));
    CHECK_FALSE(cocycles_equivalent(asmb, rep0, zero).has_value());
    CHECK_FALSE(find_cocycle_defect(rep0).has_value());
}

TEST_CASE("classification enumerates the representative cocycles") {
    auto ctx = DiffContext<K>::regular(corpus::dual_numbers_static<K>());
    ComplexAssembler<K> asmb(ctx);
    ExtensionClassification<K> cls = classify_extensions(asmb);
    CHECK(cls.dimension == 2);
    REQUIRE(cls.representatives.size() == 2);
    for (size_t i = 0; i < cls.representatives.size(); ++i) {
        const auto& rep = cls.representatives[i];
        CHECK_FALSE(find_cocycle_defect(rep).has_value());
        auto coords = cocycle_class_coordinates(asmb, rep);
        for (size_t j = 0; j < coords.size(); ++j)
            CHECK(coords[j] == (i == j ? K(1) : K(0)));
    }
}

TEST_CASE("extraction rejects structures that are not extensions") {
    auto ctx = DiffContext<K>::regular(corpus::k2_shift<K>());
    const size_t n = 2, m = 2;
    ComplexAssembler<K> asmb(ctx);
    std::mt19937 rng(222);
    TwoCocycle<K> c = random_coboundary<K>(asmb, rng);
    DiffAlgebra<K> E = build_extension(c);

    // wrong projection: not multiplicative
    Matrix<K> bad = canonical_projection<K>(n, m);
    bad(0, n) = K(1);
    CHECK_THROWS_AS(extract_cocycle(E, ctx->algebra, ctx->module, bad,
                                    canonical_inclusion<K>(n, m)),
                    invalid_input_error);

    // supplied section that is not a section of the projection
    Matrix<K> nonsec(n + m, n);
    nonsec(0, 0) = K(2);
    nonsec(1, 1) = K(1);
    CHECK_THROWS_AS(extract_cocycle(E, ctx->algebra, ctx->module,
                                    canonical_projection<K>(n, m),
                                    canonical_inclusion<K>(n, m), nonsec),
                    invalid_input_error);

    // mismatched weight
    DiffAlgebra<K> base2 = ctx->algebra;
    base2.weight = K(5);
    CHECK_THROWS_AS(extract_cocycle(E, base2, ctx->module, canonical_projection<K>(n, m),
                                    canonical_inclusion<K>(n, m)),
                    invalid_input_error);

    // non-square-zero kernel: take the semidirect total but corrupt V*V
    DiffAlgebra<K> E2 = E;
    E2.mult[((n + 0) * (n + m) + (n + 0)) * (n + m) + (n + 1)] = K(1);
    CHECK_THROWS_AS(extract_cocycle(E2, ctx->algebra, ctx->module,
                                    canonical_projection<K>(n, m),
                                    canonical_inclusion<K>(n, m)),
                    invalid_input_error);
}

TEST_CASE("gluing a non-cocycle throws with a defect report") {
    auto ctx = DiffContext<K>::regular(corpus::k2_shift<K>());
    std::mt19937 rng(333);
    TwoCocycle<K> c = testsupport::random_pair<K>(ctx, rng);
    REQUIRE(find_cocycle_defect(c).has_value()); // random pairs essentially never close
    CHECK_THROWS_AS(build_extension(c), cocycle_error);
}
