#ifndef bnvc_optimizer_hpp
#define bnvc_optimizer_hpp

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bnvc/dataset.hpp"
#include "bnvc/error.hpp"
#include "bnvc/model.hpp"

namespace bnvc {

// Slack allowed when checking epsilon * m <= 1, so that floors derived as
// lambda^(1/n) with lambda = m^-n are not rejected over one ulp.
inline constexpr double floor_feasibility_slack = 1e-12;

// Lower bound on every transition probability. Built from a joint floor
// lambda over n variables as epsilon = lambda^(1/n), which guarantees every
// joint probability of the fitted network is at least lambda.
class CutoffPolicy {
public:
    static CutoffPolicy from_lambda(double lambda, std::size_t n) {
        if (!(lambda > 0.0 && lambda <= 1.0)) {
            throw parameter_error("CutoffPolicy: lambda must lie in (0, 1]");
        }
        if (n == 0) {
            throw parameter_error("CutoffPolicy: n must be positive");
        }
        return CutoffPolicy(lambda, n, std::exp(std::log(lambda) / static_cast<double>(n)));
    }

    // direct per-transition floor; epsilon = 0 means unconstrained MLE
    static CutoffPolicy from_epsilon(double epsilon, std::size_t n = 1) {
        if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
            throw parameter_error("CutoffPolicy: epsilon must lie in [0, 1]");
        }
        return CutoffPolicy(std::pow(epsilon, static_cast<double>(n)), n, epsilon);
    }

    static CutoffPolicy unconstrained() { return from_epsilon(0.0); }

    double lambda() const noexcept { return lambda_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t n() const noexcept { return n_; }

    bool feasible_for(std::size_t alphabet_size) const noexcept {
        return epsilon_ * static_cast<double>(alphabet_size) <= 1.0 + floor_feasibility_slack;
    }

    bool feasible_for(const CategoricalDomain& domain) const noexcept { return feasible_for(domain.max_size()); }

    void require_feasible(const CategoricalDomain& domain) const {
        if (!feasible_for(domain)) {
            throw infeasible_error("floor epsilon = " + std::to_string(epsilon_) +
                                   " is infeasible for an alphabet of size " + std::to_string(domain.max_size()));
        }
    }

private:
    CutoffPolicy(double lambda, std::size_t n, double epsilon) : lambda_(lambda), epsilon_(epsilon), n_(n) {}

    double lambda_;
    double epsilon_;
    std::size_t n_;
};

// Maximizes sum_i c_i ln p_i over the simplex with p_i >= epsilon.
//
// The KKT conditions give p_i = max(epsilon, c_i / nu). Sorting counts
// ascending, the clamped coordinates are a prefix; for a prefix of length t
// the multiplier is nu_t = (sum of the other counts) / (1 - t epsilon), and
// the solution is the first t whose split is self-consistent. Clamped
// coordinates are set to epsilon exactly. All-zero counts give the uniform
// vector.
inline std::vector<double> solve_context(std::span<const std::int64_t> counts, double epsilon) {
    const std::size_t m = counts.size();
    if (m < 2) {
        throw parameter_error("solve_context: need at least two categories");
    }
    if (!(epsilon >= 0.0)) {
        throw parameter_error("solve_context: epsilon must be non-negative");
    }
    for (auto c : counts) {
        if (c < 0) {
            throw parameter_error("solve_context: negative count");
        }
    }
    const double md = static_cast<double>(m);
    if (epsilon * md > 1.0 + floor_feasibility_slack) {
        throw infeasible_error("solve_context: epsilon * m = " + std::to_string(epsilon * md) + " exceeds 1");
    }

    const std::int64_t total = std::accumulate(counts.begin(), counts.end(), std::int64_t{0});
    if (total == 0 || epsilon * md >= 1.0) {
        return std::vector<double>(m, 1.0 / md);
    }

    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return counts[a] < counts[b]; });

    std::vector<double> p(m);
    double rest = static_cast<double>(total); // sum of counts not clamped
    for (std::size_t t = 0; t < m; ++t) {
        const double free_mass = 1.0 - static_cast<double>(t) * epsilon;
        const double nu = rest / free_mass;
        const double lowest_free = static_cast<double>(counts[idx[t]]);
        // unclamped must satisfy c / nu >= epsilon
        if (lowest_free >= epsilon * nu) {
            for (std::size_t s = 0; s < t; ++s) {
                p[idx[s]] = epsilon;
            }
            for (std::size_t s = t; s < m; ++s) {
                p[idx[s]] = static_cast<double>(counts[idx[s]]) / nu;
            }
            return p;
        }
        rest -= lowest_free;
    }
    // unreachable: the largest count is positive and t = m - 1 always qualifies
    return std::vector<double>(m, 1.0 / md);
}

inline std::vector<double> solve_context(std::initializer_list<std::int64_t> counts, double epsilon) {
    return solve_context(std::span<const std::int64_t>(counts.begin(), counts.size()), epsilon);
}

inline Cpt fit_cpt(const CountTable& counts, const CutoffPolicy& policy) {
    if (!policy.feasible_for(counts.child_size)) {
        throw infeasible_error("fit_cpt: floor " + std::to_string(policy.epsilon()) +
                               " infeasible for node " + std::to_string(counts.node) + " with " +
                               std::to_string(counts.child_size) + " values");
    }
    std::vector<double> logs;
    logs.reserve(counts.counts.size());
    for (std::size_t w = 0; w < counts.parent_config_count; ++w) {
        for (double p : solve_context(counts.row(w), policy.epsilon())) {
            logs.push_back(std::log(p));
        }
    }
    return Cpt(counts.node, counts.child_size, counts.parent_config_count, std::move(logs));
}

// -(1/l) sum over rows of ln f_j(x_j, w) for one node, from its counts.
// Zero counts contribute nothing even where f is -inf.
inline double conditional_log_loss(const CountTable& counts, const Cpt& cpt, std::size_t l) {
    double acc = 0.0;
    for (std::size_t k = 0; k < counts.counts.size(); ++k) {
        if (counts.counts[k] > 0) {
            acc += static_cast<double>(counts.counts[k]) * cpt.log_table()[k];
        }
    }
    return -acc / static_cast<double>(l);
}

struct GraphFit {
    BayesNet net;
    double r_emp;                       // nats
    std::vector<double> node_log_loss;  // per-node share of r_emp
};

// Constrained maximum likelihood over networks Markov to `dag`. The program
// separates over (node, parent configuration), so solving each context on
// its own is globally optimal.
inline GraphFit fit_graph(const Dataset& data, const Dag& dag, const CutoffPolicy& policy) {
    if (dag.n() != data.n()) {
        throw dimension_error("fit_graph: dag and data disagree on variable count");
    }
    policy.require_feasible(data.domain());
    std::vector<Cpt> cpts;
    std::vector<double> losses;
    double r_emp = 0.0;
    for (const auto& counts : empirical_counts(data, dag)) {
        cpts.push_back(fit_cpt(counts, policy));
        losses.push_back(conditional_log_loss(counts, cpts.back(), data.size()));
        r_emp += losses.back();
    }
    return {BayesNet(data.domain(), dag, std::move(cpts)), r_emp, std::move(losses)};
}

} // namespace bnvc

#endif // bnvc_optimizer_hpp
