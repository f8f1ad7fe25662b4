#ifndef bnvc_tests_fixtures_hpp
#define bnvc_tests_fixtures_hpp

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "bnvc/dataset.hpp"
#include "bnvc/model.hpp"

namespace bnvc::fixtures {

// Network from probability rows given per node, rows in Cpt order.
inline BayesNet make_net(const CategoricalDomain& domain, const Dag& dag,
                         const std::vector<std::vector<std::vector<double>>>& rows) {
    std::vector<Cpt> cpts;
    for (std::size_t j = 0; j < dag.n(); ++j) {
        std::vector<double> flat;
        for (const auto& r : rows[j]) {
            flat.insert(flat.end(), r.begin(), r.end());
        }
        cpts.push_back(Cpt::from_probabilities(j, domain.size(j), rows[j].size(), flat));
    }
    return BayesNet(domain, dag, std::move(cpts));
}

inline BayesNet fair_coin() {
    return make_net(CategoricalDomain::binary(1), Dag(1), {{{0.5, 0.5}}});
}

inline BayesNet biased_coin(double p0) {
    return make_net(CategoricalDomain::binary(1), Dag(1), {{{p0, 1.0 - p0}}});
}

// X1 fair, X2 copies X1 with probability `keep`
inline BayesNet copy_net(double keep) {
    return make_net(CategoricalDomain::binary(2), Dag(ParentLists{{}, {0}}),
                    {{{0.5, 0.5}}, {{keep, 1.0 - keep}, {1.0 - keep, keep}}});
}

inline BayesNet uniform_net(std::size_t n) {
    std::vector<std::vector<std::vector<double>>> rows(n, {{0.5, 0.5}});
    return make_net(CategoricalDomain::binary(n), Dag(n), rows);
}

// Binary chain 0 -> 1 -> 2 -> 3 -> 4 with every CPT entry in [0.2, 0.8].
inline BayesNet chain5_truth() {
    return make_net(CategoricalDomain::binary(5), Dag(ParentLists{{}, {0}, {1}, {2}, {3}}),
                    {{{0.65, 0.35}},
                     {{0.8, 0.2}, {0.25, 0.75}},
                     {{0.7, 0.3}, {0.2, 0.8}},
                     {{0.3, 0.7}, {0.75, 0.25}},
                     {{0.6, 0.4}, {0.35, 0.65}}});
}

// Four rows of the copy relation: (0,0),(0,0),(1,1),(1,1).
inline Dataset copy_rows() {
    return Dataset(CategoricalDomain::binary(2), std::vector<std::vector<Code>>{{0, 0}, {0, 0}, {1, 1}, {1, 1}});
}

// Random DAG whose edges point from lower to higher index, in-degree <= delta.
inline Dag random_forward_dag(std::size_t n, std::size_t delta, std::mt19937_64& rng) {
    ParentLists parents(n);
    for (std::size_t j = 1; j < n; ++j) {
        std::vector<std::size_t> pool(j);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        std::shuffle(pool.begin(), pool.end(), rng);
        const std::size_t d = std::uniform_int_distribution<std::size_t>(0, std::min(delta, j))(rng);
        parents[j].assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(d));
    }
    return Dag(std::move(parents));
}

// Random DAG in a random topological order.
inline Dag random_dag(std::size_t n, std::size_t delta, std::mt19937_64& rng) {
    const Dag forward = random_forward_dag(n, delta, rng);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    ParentLists parents(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (auto p : forward.parents(j)) {
            parents[perm[j]].push_back(perm[p]);
        }
    }
    return Dag(std::move(parents));
}

inline CategoricalDomain random_domain(std::size_t n, std::size_t max_size, std::mt19937_64& rng) {
    std::vector<std::size_t> sizes(n);
    for (auto& s : sizes) {
        s = std::uniform_int_distribution<std::size_t>(2, max_size)(rng);
    }
    return CategoricalDomain::with_sizes(sizes);
}

// Random CPT rows drawn from normalized uniforms; optionally with zeros.
inline BayesNet random_net(const CategoricalDomain& domain, const Dag& dag, std::mt19937_64& rng,
                           double zero_chance = 0.0) {
    std::uniform_real_distribution<double> u(0.05, 1.0);
    std::bernoulli_distribution zero(zero_chance);
    std::vector<Cpt> cpts;
    for (std::size_t j = 0; j < dag.n(); ++j) {
        const std::size_t rows = parent_config_count(domain, dag, j);
        const std::size_t m = domain.size(j);
        std::vector<double> flat;
        for (std::size_t w = 0; w < rows; ++w) {
            std::vector<double> r(m);
            double s = 0.0;
            for (std::size_t v = 0; v < m; ++v) {
                r[v] = (v > 0 && zero(rng)) ? 0.0 : u(rng);
                s += r[v];
            }
            for (auto& x : r) {
                flat.push_back(x / s);
            }
        }
        cpts.push_back(Cpt::from_probabilities(j, m, rows, flat));
    }
    return BayesNet(domain, dag, std::move(cpts));
}

inline Dataset random_dataset(const CategoricalDomain& domain, std::size_t l, std::mt19937_64& rng) {
    std::vector<Code> flat;
    for (std::size_t i = 0; i < l; ++i) {
        for (std::size_t j = 0; j < domain.n(); ++j) {
            flat.push_back(static_cast<Code>(std::uniform_int_distribution<std::size_t>(0, domain.size(j) - 1)(rng)));
        }
    }
    return Dataset(domain, std::move(flat));
}

} // namespace bnvc::fixtures

#endif // bnvc_tests_fixtures_hpp
