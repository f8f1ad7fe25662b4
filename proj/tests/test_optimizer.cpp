#include <algorithm>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bnvc/optimizer.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace bnvc;

namespace {

void expect_vec_near(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        EXPECT_NEAR(got[i], want[i], tol) << "coordinate " << i;
    }
}

std::vector<std::int64_t> random_counts(std::mt19937_64& rng, std::size_t m, std::int64_t max_count) {
    std::vector<std::int64_t> c(m);
    for (auto& x : c) {
        x = std::uniform_int_distribution<std::int64_t>(0, max_count)(rng);
    }
    return c;
}

} // namespace

TEST(SolveContext, FloorInactive) { expect_vec_near(solve_context({3, 1}, 0.1), {0.75, 0.25}, 1e-15); }

TEST(SolveContext, ZeroCountClampsToFloor) {
    auto p = solve_context({4, 0}, 0.1);
    EXPECT_EQ(p[1], 0.1);
    EXPECT_NEAR(p[0], 0.9, 1e-15);
}

TEST(SolveContext, AllZeroIsUniform) { expect_vec_near(solve_context({0, 0, 0}, 0.0), {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0); }

TEST(SolveContext, TwoClampedCoordinates) {
    auto p = solve_context({10, 1, 1}, 0.2);
    EXPECT_EQ(p[1], 0.2);
    EXPECT_EQ(p[2], 0.2);
    EXPECT_NEAR(p[0], 0.6, 1e-15);
}

TEST(SolveContext, UnconstrainedZeroGetsZero) {
    auto p = solve_context({5, 0, 5}, 0.0);
    EXPECT_EQ(p[1], 0.0);
    EXPECT_NEAR(p[0], 0.5, 1e-15);
}

TEST(SolveContext, Errors) {
    EXPECT_THROW(solve_context({1, 1, 1}, 0.4), infeasible_error);
    EXPECT_THROW(solve_context({1, -1}, 0.1), parameter_error);
    EXPECT_THROW(solve_context({1}, 0.0), parameter_error);
    // epsilon * m == 1 is feasible and forces the uniform vector
    expect_vec_near(solve_context({9, 1}, 0.5), {0.5, 0.5}, 0);
}

TEST(BruteForceContext, Examples) {
    const std::vector<std::int64_t> a{3, 1}, b{4, 0}, c{1, 1};
    expect_vec_near(oracle::brute_force_context(a, 0.0, 1e-4), {0.75, 0.25}, 1e-4);
    expect_vec_near(oracle::brute_force_context(b, 0.1, 1e-4), {0.9, 0.1}, 1e-4);
    expect_vec_near(oracle::brute_force_context(c, 0.3, 1e-4), {0.5, 0.5}, 1e-4);
    const std::vector<std::int64_t> big{1, 1, 1, 1, 1};
    EXPECT_THROW(oracle::brute_force_context(big, 0.0, 1e-4), size_limit_error);
}

// the marginal-gain lattice search must agree with visiting every lattice point
TEST(BruteForceContext, MatchesExhaustiveGrid) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t m = 2 + trial % 2;
        const auto counts = random_counts(rng, m, 20);
        const double eps = std::vector<double>{0.0, 0.05, 0.1}[trial % 3];
        const auto fast = oracle::brute_force_context(counts, eps, 1e-3);
        const auto full = oracle::exhaustive_grid_context(counts, eps, 1e-3);
        EXPECT_NEAR(oracle::log_likelihood(counts, fast), oracle::log_likelihood(counts, full), 1e-9);
    }
}

TEST(SolveContextProperties, AgreesWithGridOracle) {
    std::mt19937_64 rng(32);
    const double eps_values[] = {0.0, 0.05, 0.1};
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 3);
        const auto counts = random_counts(rng, m, 20);
        const double eps = eps_values[(trial / 3) % 3];
        const auto kkt = solve_context(counts, eps);
        const auto grid = oracle::brute_force_context(counts, eps, 1e-4);
        for (std::size_t i = 0; i < m; ++i) {
            ASSERT_LE(std::abs(kkt[i] - grid[i]), 2e-4) << "trial " << trial;
        }
    }
}

TEST(SolveContextProperties, BeatsRandomFeasiblePerturbations) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 4);
        auto counts = random_counts(rng, m, 15);
        counts[0] += 1; // avoid the all-zero tie
        const double eps = std::uniform_real_distribution<double>(0.0, 1.0 / static_cast<double>(m))(rng);
        const auto p = solve_context(counts, eps);
        const double best = oracle::log_likelihood(counts, p);
        std::uniform_real_distribution<double> step(-0.05, 0.05);
        for (int k = 0; k < 1000; ++k) {
            // move mass between two coordinates, staying above the floor
            auto q = p;
            const std::size_t a = std::uniform_int_distribution<std::size_t>(0, m - 1)(rng);
            const std::size_t b = (a + 1 + std::uniform_int_distribution<std::size_t>(0, m - 2)(rng)) % m;
            double d = step(rng);
            d = std::clamp(d, eps - q[a], q[b] - eps);
            q[a] += d;
            q[b] -= d;
            ASSERT_GE(best, oracle::log_likelihood(counts, q) - 1e-12);
        }
    }
}

TEST(SolveContextProperties, FloorRespectedExactly) {
    std::mt19937_64 rng(34);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 5);
        const auto counts = random_counts(rng, m, 10);
        const double eps = std::uniform_real_distribution<double>(0.0, 1.0 / static_cast<double>(m))(rng);
        const auto p = solve_context(counts, eps);
        double sum = 0;
        for (double v : p) {
            ASSERT_GE(v, eps);
            sum += v;
        }
        EXPECT_NEAR(sum, 1.0, 1e-12);
    }
}

TEST(SolveContextProperties, LikelihoodNonIncreasingInFloor) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 2 + static_cast<std::size_t>(trial % 4);
        const auto counts = random_counts(rng, m, 20);
        double prev = 0.0;
        bool first = true;
        for (double eps = 0.0; eps * static_cast<double>(m) <= 1.0; eps += 0.01) {
            const double ll = oracle::log_likelihood(counts, solve_context(counts, eps));
            if (!first) {
                ASSERT_LE(ll, prev + 1e-12);
            }
            prev = ll;
            first = false;
        }
    }
}

TEST(CutoffPolicy, FloorFromLambda) {
    auto p = CutoffPolicy::from_lambda(0.01, 2);
    EXPECT_NEAR(p.epsilon(), 0.1, 1e-15);
    EXPECT_TRUE(p.feasible_for(10));
    EXPECT_FALSE(p.feasible_for(11));
    // lambda = 2^-5 over 5 binary variables lands on epsilon = 1/2
    EXPECT_TRUE(CutoffPolicy::from_lambda(std::ldexp(1.0, -5), 5).feasible_for(2));
    EXPECT_FALSE(CutoffPolicy::from_lambda(std::ldexp(1.0, -4), 5).feasible_for(2));
    EXPECT_THROW(CutoffPolicy::from_lambda(0.0, 3), parameter_error);
    EXPECT_THROW(CutoffPolicy::from_lambda(1.5, 3), parameter_error);
}

TEST(FitCpt, UnconstrainedRowsAreRelativeFrequencies) {
    Dataset data(CategoricalDomain::binary(2),
                 std::vector<std::vector<Code>>{{0, 0}, {0, 1}, {0, 1}, {1, 1}, {1, 0}, {1, 0}, {1, 0}});
    auto counts = empirical_counts(data, Dag(ParentLists{{}, {0}}));
    auto cpt = fit_cpt(counts[1], CutoffPolicy::unconstrained());
    expect_vec_near(cpt.prob_row(0), {1.0 / 3, 2.0 / 3}, 1e-15);
    expect_vec_near(cpt.prob_row(1), {0.75, 0.25}, 1e-15);
}

TEST(FitCpt, UnobservedContextIsUniform) {
    Dataset data(CategoricalDomain({"A", "B"}, {{"0", "1", "2"}, {"0", "1"}}),
                 std::vector<std::vector<Code>>{{0, 0}, {1, 1}});
    auto counts = empirical_counts(data, Dag(ParentLists{{}, {0}}));
    for (double eps : {0.0, 0.1}) {
        auto cpt = fit_cpt(counts[1], CutoffPolicy::from_epsilon(eps));
        expect_vec_near(cpt.prob_row(2), {0.5, 0.5}, 0);
    }
}

TEST(FitCpt, ClampedRowFromCounts) {
    Dataset data(CategoricalDomain::binary(2), std::vector<std::vector<Code>>{{0, 0}, {0, 1}, {1, 1}, {1, 1}});
    auto counts = empirical_counts(data, Dag(ParentLists{{}, {0}}));
    auto cpt = fit_cpt(counts[1], CutoffPolicy::from_epsilon(0.1));
    expect_vec_near(cpt.prob_row(1), {0.1, 0.9}, 1e-15);
    for (double f : cpt.log_table()) {
        EXPECT_GE(f, std::log(0.1) - 1e-15);
    }
}

TEST(FitGraph, CopyRelationChain) {
    const auto data = fixtures::copy_rows();
    auto fit = fit_graph(data, Dag(ParentLists{{}, {0}}), CutoffPolicy::unconstrained());
    EXPECT_NEAR(fit.r_emp, oracle::conditional_entropy(data, 0, {}), 1e-12);
    EXPECT_NEAR(fit.r_emp, std::log(2.0), 1e-12);
    auto empty = fit_graph(data, Dag(2), CutoffPolicy::unconstrained());
    EXPECT_NEAR(empty.r_emp, 2.0 * std::log(2.0), 1e-12);
    EXPECT_GE(empty.r_emp, fit.r_emp);
}

TEST(FitGraph, EntropyIdentityOnRandomData) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 30; ++trial) {
        const auto domain = fixtures::random_domain(4, 3, rng);
        const auto data = fixtures::random_dataset(domain, 40, rng);
        const auto dag = fixtures::random_dag(4, 2, rng);
        const auto fit = fit_graph(data, dag, CutoffPolicy::unconstrained());
        double h = 0.0;
        for (std::size_t j = 0; j < 4; ++j) {
            h += oracle::conditional_entropy(data, j, dag.parents(j));
        }
        EXPECT_NEAR(fit.r_emp, h, 1e-9);
    }
}

TEST(FitGraph, SeparableRegardlessOfOrder) {
    std::mt19937_64 rng(37);
    const auto domain = fixtures::random_domain(5, 3, rng);
    const auto data = fixtures::random_dataset(domain, 60, rng);
    const auto dag = fixtures::random_dag(5, 2, rng);
    const auto policy = CutoffPolicy::from_epsilon(0.05);
    const auto fit = fit_graph(data, dag, policy);
    auto counts = empirical_counts(data, dag);
    for (std::size_t j = 5; j-- > 0;) {
        const auto& c = counts[j];
        for (std::size_t w = c.parent_config_count; w-- > 0;) {
            const auto p = solve_context(c.row(w), policy.epsilon());
            for (std::size_t v = 0; v < p.size(); ++v) {
                EXPECT_EQ(fit.net.cpt(j).log_prob(w, static_cast<Code>(v)), std::log(p[v]));
            }
        }
    }
}

TEST(FitGraph, InfeasiblePolicy) {
    EXPECT_THROW(fit_graph(fixtures::copy_rows(), Dag(2), CutoffPolicy::from_epsilon(0.6)), infeasible_error);
}
