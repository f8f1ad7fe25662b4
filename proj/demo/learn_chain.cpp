// Samples a five-node binary chain, learns it back by structural risk
// minimization and prints the SRM grid next to the true risk of the pick.
//
//   learn_chain [l] [seed]

#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "bnvc/bnvc.hpp"

int main(int argc, char** argv) {
    using namespace bnvc;
    const std::size_t l = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 200000;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 1;

    const auto domain = CategoricalDomain::binary(5);
    const Dag chain(ParentLists{{}, {0}, {1}, {2}, {3}});
    const std::vector<std::vector<std::vector<double>>> rows{
        {{0.65, 0.35}},
        {{0.8, 0.2}, {0.25, 0.75}},
        {{0.7, 0.3}, {0.2, 0.8}},
        {{0.3, 0.7}, {0.75, 0.25}},
        {{0.6, 0.4}, {0.35, 0.65}}};
    std::vector<Cpt> cpts;
    for (std::size_t j = 0; j < 5; ++j) {
        std::vector<double> flat;
        for (const auto& r : rows[j]) {
            flat.insert(flat.end(), r.begin(), r.end());
        }
        cpts.push_back(Cpt::from_probabilities(j, 2, rows[j].size(), flat));
    }
    const BayesNet truth(domain, chain, std::move(cpts));

    const Dataset data = forward_sample(truth, l, seed);
    SrmConfig config;
    config.order = std::vector<std::size_t>(5);
    std::iota(config.order->begin(), config.order->end(), std::size_t{0});
    const SearchResult r = srm_select(data, config);

    std::printf("%3s %3s %10s %10s %10s %10s\n", "k", "m", "lambda", "R_emp", "phi", "bound");
    for (const auto& c : r.grid) {
        if (c.feasible) {
            std::printf("%3zu %3zu %10.6f %10.6f %10.6f %10.6f\n", c.k, c.m, c.lambda, c.r_emp, c.phi, c.bound);
        } else {
            std::printf("%3zu %3zu %10.6f %10s\n", c.k, c.m, c.lambda, "infeasible");
        }
    }
    const auto& rb = *r.risk_bound;
    std::printf("\nselected k=%zu m=%zu, %zu edges\n", *rb.k, *rb.m, r.dag().edge_count());
    std::printf("R_emp=%.6f  bound=%.6f  true risk=%.6f  entropy=%.6f  KL=%.6f\n", rb.r_emp, rb.bound,
                true_risk(r.net, truth), entropy(truth), kl_divergence(truth, r.net));
}
