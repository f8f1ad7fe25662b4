#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bnvc/bounds.hpp"
#include "support/fixtures.hpp"

using namespace bnvc;

namespace {

Dag complete_dag(std::size_t n) {
    ParentLists parents(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < j; ++i) {
            parents[j].push_back(i);
        }
    }
    return Dag(std::move(parents));
}

std::uint64_t choose(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        r = r * (n - k + i) / i;
    }
    return r;
}

} // namespace

TEST(VcBoundGraph, HandValues) {
    const auto binary3 = CategoricalDomain::binary(3);
    EXPECT_EQ(vc_bound_graph(binary3, Dag(ParentLists{{}, {0}, {1}})).h, 10u);
    EXPECT_EQ(vc_bound_graph(binary3, complete_dag(3)).h, 14u);
    for (std::size_t n = 1; n <= 8; ++n) {
        EXPECT_EQ(vc_bound_graph(CategoricalDomain::binary(n), Dag(n)).h, 2 * n);
    }
}

TEST(VcBoundOrdered, HandValues) {
    const auto binary3 = CategoricalDomain::binary(3);
    EXPECT_EQ(vc_bound_ordered(binary3, 1).h, 14u);
    EXPECT_EQ(vc_bound_ordered(binary3, 1, OrderedForm::literal).h, 12u);
    const auto d = CategoricalDomain::with_sizes(std::vector<std::size_t>{2, 3, 4, 5});
    EXPECT_EQ(vc_bound_ordered(d, 0).h, 14u);
    // delta = n-1 widened is the complete DAG in index order
    for (std::size_t n = 1; n <= 6; ++n) {
        const auto dn = CategoricalDomain::binary(n);
        EXPECT_GE(vc_bound_ordered(dn, n - 1).h, vc_bound_graph(dn, complete_dag(n)).h);
    }
}

TEST(VcBoundOrdered, FollowsGivenOrder) {
    const auto d = CategoricalDomain::with_sizes(std::vector<std::size_t>{4, 2, 3});
    const std::vector<std::size_t> order{1, 2, 0};
    // sizes in order (2, 3, 4), widened, delta = 1: 2 + 3*2 + 4*(2+3)
    EXPECT_EQ(vc_bound_ordered(d, order, 1).h, 28u);
}

TEST(VcBoundUnordered, HandValues) {
    EXPECT_EQ(vc_bound_unordered(CategoricalDomain::binary(3), 1).h, 12u);
    for (std::size_t n = 1; n <= 8; ++n) {
        EXPECT_EQ(vc_bound_unordered(CategoricalDomain::binary(n), 0).h, 2 * n);
    }
    for (std::size_t lmax = 2; lmax <= 5; ++lmax) {
        const std::vector<std::size_t> sizes(7, lmax);
        const auto d = CategoricalDomain::with_sizes(sizes);
        for (std::size_t delta = 0; delta < 7; ++delta) {
            EXPECT_EQ(vc_bound_unordered(d, delta).h,
                      choose(7, delta + 1) * static_cast<std::uint64_t>(std::pow(lmax, delta + 1)));
        }
    }
    EXPECT_THROW(vc_bound_unordered(CategoricalDomain::binary(3), 3), parameter_error);
}

TEST(ClosedFormBounds, HandValues) {
    auto a = closed_form_bounds(3, 2, 1);
    EXPECT_EQ(a.given_graph, 12u);
    EXPECT_EQ(a.ordered, 12u);
    EXPECT_EQ(a.unordered, 12u);
    auto b = closed_form_bounds(10, 2, 2);
    EXPECT_EQ(b.given_graph, 80u);
    EXPECT_EQ(b.ordered, 960u);
    EXPECT_EQ(b.unordered, 960u);
    EXPECT_EQ(closed_form_bounds(7, 2, 0).given_graph, 14u);
}

TEST(Bounds, OverflowIsAnError) {
    const std::vector<std::size_t> sizes(40, 1000);
    const auto d = CategoricalDomain::with_sizes(sizes);
    EXPECT_THROW(vc_bound_unordered(d, 10), overflow_error);
    EXPECT_THROW(closed_form_bounds(40, 1000, 10), overflow_error);
    EXPECT_THROW(vc_bound_ordered(d, 10), overflow_error);
}

TEST(BoundProperties, Nesting) {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 7);
        const std::size_t lmax = 2 + static_cast<std::size_t>(trial % 3);
        const auto domain = CategoricalDomain::with_sizes(std::vector<std::size_t>(n, lmax));
        const auto dag = fixtures::random_forward_dag(n, n - 1, rng);
        const std::size_t delta = dag.max_in_degree();
        const auto graph = vc_bound_graph(domain, dag).h;
        const auto ordered = vc_bound_ordered(domain, delta).h;
        const auto literal = vc_bound_ordered(domain, delta, OrderedForm::literal).h;
        const auto unordered = vc_bound_unordered(domain, delta).h;
        const auto cf = closed_form_bounds(n, lmax, delta);
        EXPECT_LE(graph, ordered);
        EXPECT_LE(graph, cf.given_graph);
        EXPECT_LE(literal, unordered);
        EXPECT_LE(unordered, cf.unordered);
        EXPECT_LE(literal, cf.ordered);
        // widening adds exactly the parameter spaces of the first delta nodes
        std::uint64_t head = 0;
        for (std::size_t j = 1; j <= delta; ++j) {
            head += static_cast<std::uint64_t>(std::pow(lmax, j));
        }
        EXPECT_EQ(ordered, literal + head);
    }
}

TEST(BoundProperties, ExactBelowClosedFormOnMixedAlphabets) {
    std::mt19937_64 rng(52);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
        const auto domain = fixtures::random_domain(n, 5, rng);
        const auto dag = fixtures::random_dag(n, std::min<std::size_t>(3, n - 1), rng);
        const std::size_t delta = dag.max_in_degree();
        const auto cf = closed_form_bounds(n, domain.max_size(), delta);
        EXPECT_LE(vc_bound_graph(domain, dag).h, cf.given_graph);
        EXPECT_LE(vc_bound_unordered(domain, delta).h, cf.unordered);
        EXPECT_LE(vc_bound_ordered(domain, delta, OrderedForm::literal).h, cf.ordered);
    }
}

TEST(ConfidenceTerm, DeskValue) {
    // (-ln 0.01) * sqrt((10 (ln 200 + 1) - ln(0.0125) + 1) / 1000)
    EXPECT_NEAR(confidence_term(0.01, 1000, 10, 0.05), 1.2041, 1e-3);
    EXPECT_NEAR(confidence_term(0.01, 1000, 10, 0.05), 1.2041018666107361, 1e-12);
}

TEST(ConfidenceTerm, LambdaOneIsZero) {
    EXPECT_EQ(confidence_term(1.0, 1000, 10, 0.05), 0.0);
    EXPECT_EQ(confidence_term(1.0, 7, 3, 0.5), 0.0);
}

TEST(ConfidenceTerm, DecreasesWithSampleSize) {
    EXPECT_LT(confidence_term(0.01, 100000, 10, 0.05), confidence_term(0.01, 1000, 10, 0.05));
}

TEST(ConfidenceTerm, GeneralForm) {
    EXPECT_DOUBLE_EQ(confidence_term_ab(1.0, 1.0 - std::log(0.01), 1000, 10, 0.05),
                     confidence_term(0.01, 1000, 10, 0.05));
}

TEST(ConfidenceTerm, Errors) {
    EXPECT_THROW(confidence_term(0.0, 10, 1, 0.05), parameter_error);
    EXPECT_THROW(confidence_term(0.5, 0, 1, 0.05), parameter_error);
    EXPECT_THROW(confidence_term(0.5, 10, 0, 0.05), parameter_error);
    EXPECT_THROW(confidence_term(0.5, 10, 1, 1.0), parameter_error);
    EXPECT_THROW(confidence_term(0.5, 10, 1, 0.0), parameter_error);
    EXPECT_TRUE(std::isinf(confidence_term(0.5, 10, 21, 0.05)));
    EXPECT_TRUE(std::isfinite(confidence_term(0.5, 10, 20, 0.05)));
}

TEST(ConfidenceProperties, Monotonicity) {
    for (std::size_t l : {50u, 1000u, 20000u}) {
        for (double eta : {0.01, 0.05, 0.2}) {
            double prev = -1.0;
            for (std::uint64_t h = 1; h < 2 * l; h += 1 + h / 7) {
                const double phi = confidence_term(0.1, l, h, eta);
                ASSERT_GT(phi, prev) << "l=" << l << " h=" << h;
                prev = phi;
            }
        }
        for (std::uint64_t h : {1u, 5u, 25u}) {
            double prev = std::numeric_limits<double>::infinity();
            for (double eta = 0.01; eta < 1.0; eta += 0.07) {
                const double phi = confidence_term(0.1, l, h, eta);
                ASSERT_LT(phi, prev);
                prev = phi;
            }
        }
    }
    for (double lambda : {0.5, 0.1, 0.01, 1e-5}) {
        EXPECT_NEAR(confidence_term(lambda * lambda, 500, 12, 0.05), 2.0 * confidence_term(lambda, 500, 12, 0.05),
                    1e-12);
    }
}

TEST(SrmConfidence, MatchesConfidenceTerm) {
    for (std::size_t l : {100u, 5000u}) {
        EXPECT_DOUBLE_EQ(srm_confidence(1, 0, l, 8, 0.05, 0.5), confidence_term(0.5, l, 8, 0.025));
    }
    EXPECT_THROW(srm_confidence(0, 0, 100, 8, 0.05, 0.5), parameter_error);
    EXPECT_THROW(srm_confidence(1, 0, 100, 8, 0.05, 0.0), parameter_error);
}

// second evaluation route: the expanded binary-variable form
//   m ln2 sqrt((h (ln(2l/h) + 1) - ln(eta/4) + (k+m) ln2 + 1) / l)
TEST(SrmConfidence, ExpandedFormCrossCheck) {
    const double ln2 = std::log(2.0);
    auto expanded = [&](std::size_t n, std::size_t k, std::size_t m, double l, double eta) {
        const double h = static_cast<double>(n) * std::pow(2.0, static_cast<double>(k + 1));
        return static_cast<double>(m) * ln2 *
               std::sqrt((h * (std::log(2.0 * l / h) + 1.0) - std::log(eta / 4.0) +
                          static_cast<double>(k + m) * ln2 + 1.0) /
                         l);
    };
    const std::uint64_t h = 5 * 8;
    EXPECT_NEAR(srm_confidence(3, 2, 10000, h, 0.05, default_prior(2, 3)), expanded(5, 2, 3, 10000, 0.05), 1e-12);
    EXPECT_NEAR(expanded(5, 2, 3, 10000, 0.05), 0.3586250523099681, 1e-12);
    for (std::size_t k = 0; k <= 5; ++k) {
        for (std::size_t m = 1; m <= 6; ++m) {
            const std::uint64_t hk = 6 * (std::uint64_t{1} << (k + 1));
            EXPECT_NEAR(srm_confidence(m, k, 50000, hk, 0.05, default_prior(k, m)), expanded(6, k, m, 50000, 0.05),
                        1e-12);
        }
    }
}

TEST(SrmConfidence, GrowsInClassAndCutoff) {
    const std::size_t n = 5, l = 100000;
    for (std::size_t k = 1; k <= 6; ++k) {
        for (std::size_t m = 1; m <= 6; ++m) {
            auto phi = [&](std::size_t kk, std::size_t mm) {
                return srm_confidence(mm, kk, l, n * (std::uint64_t{1} << (kk + 1)), 0.05, default_prior(kk, mm));
            };
            if (k < 6) {
                EXPECT_LT(phi(k, m), phi(k + 1, m));
            }
            if (m < 6) {
                EXPECT_LT(phi(k, m), phi(k, m + 1));
            }
        }
    }
}
