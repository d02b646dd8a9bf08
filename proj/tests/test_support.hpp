#ifndef DIFFALG_TESTS_TEST_SUPPORT_HPP
#define DIFFALG_TESTS_TEST_SUPPORT_HPP

#include <memory>
#include <random>

#include <diffalg/diffalg.hpp>

namespace testsupport {

// Small numerators and denominators keep exact pivots from blowing up while
// still exercising non-integer arithmetic.
template <class K>
K random_scalar(std::mt19937& rng) {
    std::uniform_int_distribution<int> num(-4, 4);
    std::uniform_int_distribution<int> den(1, 3);
    return K(num(rng)) / K(den(rng));
}

template <class K>
diffalg::Cochain<K> random_cochain(std::shared_ptr<const diffalg::DiffContext<K>> ctx,
                                   int degree, std::mt19937& rng) {
    diffalg::Cochain<K> f(std::move(ctx), degree);
    for (size_t i = 0; i < f.size(); ++i)
        f.flat(i) = random_scalar<K>(rng);
    return f;
}

template <class K>
diffalg::TwoCocycle<K> random_pair(std::shared_ptr<const diffalg::DiffContext<K>> ctx,
                                   std::mt19937& rng) {
    diffalg::Cochain<K> psi = random_cochain<K>(ctx, 2, rng);
    diffalg::Cochain<K> chi = random_cochain<K>(std::move(ctx), 1, rng);
    return diffalg::make_two_cocycle(std::move(psi), std::move(chi));
}

template <class K>
diffalg::Matrix<K> random_matrix(size_t rows, size_t cols, std::mt19937& rng) {
    diffalg::Matrix<K> M(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            M(r, c) = random_scalar<K>(rng);
    return M;
}

} // namespace testsupport

#endif
