#ifndef DIFFALG_BUDGET_HPP
#define DIFFALG_BUDGET_HPP

namespace diffalg {

// Guard against runaway enumeration.  Cochain spaces grow like dim(A)^n, and
// the derivation-insertion map additionally walks the subsets of the n slots,
// so operations that enumerate a whole degree refuse to run past this bound
// and raise resource_error instead of truncating.
struct DegreeBudget {
    int max_degree = 4;
};

} // namespace diffalg

#endif
