// Exact and closed-form VC bounds for binary networks, with the confidence
// term they give at lambda = 2^-8, eta = 0.05.
//
//   bound_table [l]

#include <cstdio>
#include <cstdlib>

#include "bnvc/bnvc.hpp"

int main(int argc, char** argv) {
    using namespace bnvc;
    const std::size_t l = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 100000;
    const double lambda = cutoff_lambda(8);

    std::printf("%3s %3s %10s %10s %12s %12s %10s\n", "n", "k", "ordered", "unordered", "cf_ordered",
                "cf_unordered", "phi_unord");
    for (std::size_t n = 2; n <= 10; n += 2) {
        const auto domain = CategoricalDomain::binary(n);
        for (std::size_t k = 0; k < std::min<std::size_t>(n, 4); ++k) {
            const auto ord = vc_bound_ordered(domain, k, OrderedForm::literal).h;
            const auto un = vc_bound_unordered(domain, k).h;
            const auto cf = closed_form_bounds(n, 2, k);
            std::printf("%3zu %3zu %10llu %10llu %12llu %12llu %10.4f\n", n, k, static_cast<unsigned long long>(ord),
                        static_cast<unsigned long long>(un), static_cast<unsigned long long>(cf.ordered),
                        static_cast<unsigned long long>(cf.unordered), confidence_term(lambda, l, un, 0.05));
        }
    }
}
