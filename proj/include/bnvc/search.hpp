#ifndef bnvc_search_hpp
#define bnvc_search_hpp

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnvc/bounds.hpp"
#include "bnvc/dataset.hpp"
#include "bnvc/error.hpp"
#include "bnvc/model.hpp"
#include "bnvc/optimizer.hpp"
#include "bnvc/random.hpp"
#include "bnvc/risk.hpp"

namespace bnvc {

// Subsets of `pool` with at most max_size elements: smaller subsets first,
// then lexicographic by the pool's order.
inline std::vector<std::vector<std::size_t>> bounded_subsets(std::span<const std::size_t> pool,
                                                             std::size_t max_size) {
    std::vector<std::vector<std::size_t>> out;
    const std::size_t top = std::min(max_size, pool.size());
    for (std::size_t s = 0; s <= top; ++s) {
        std::vector<std::size_t> pick(s);
        for (std::size_t i = 0; i < s; ++i) {
            pick[i] = i;
        }
        while (true) {
            std::vector<std::size_t> subset;
            subset.reserve(s);
            for (auto i : pick) {
                subset.push_back(pool[i]);
            }
            out.push_back(std::move(subset));
            // advance to the next s-combination of positions
            std::size_t i = s;
            while (i > 0 && pick[i - 1] == pool.size() - s + (i - 1)) {
                --i;
            }
            if (i == 0) {
                break;
            }
            ++pick[i - 1];
            for (std::size_t t = i; t < s; ++t) {
                pick[t] = pick[t - 1] + 1;
            }
        }
    }
    return out;
}

// Memoized count tables and constrained fits for (node, parent set) families
// of one dataset. Not thread-safe; use one per worker.
class FamilyScorer {
public:
    explicit FamilyScorer(const Dataset& data) : data_(&data) {}

    const Dataset& data() const noexcept { return *data_; }

    const CountTable& counts(std::size_t node, const std::vector<std::size_t>& parents) {
        auto key = std::make_pair(node, parents);
        auto it = counts_.find(key);
        if (it == counts_.end()) {
            it = counts_.emplace(std::move(key), node_counts(*data_, node, parents)).first;
        }
        return it->second;
    }

    // conditional log-loss of the node's constrained MLE, with its Cpt
    std::pair<double, Cpt> fit(std::size_t node, const std::vector<std::size_t>& parents,
                               const CutoffPolicy& policy) {
        const auto& c = counts(node, parents);
        Cpt cpt = fit_cpt(c, policy);
        const double loss = conditional_log_loss(c, cpt, data_->size());
        return {loss, std::move(cpt)};
    }

private:
    const Dataset* data_;
    std::map<std::pair<std::size_t, std::vector<std::size_t>>, CountTable> counts_;
};

struct NodeScore {
    std::size_t node;
    std::vector<std::size_t> parents;
    double log_loss; // nats, this node's share of R_emp
};

// One (k, m) cell of the SRM grid.
struct GridCell {
    std::size_t k;
    std::size_t m;
    double lambda;
    double epsilon;
    bool feasible;
    double r_emp = std::numeric_limits<double>::quiet_NaN();
    double phi = std::numeric_limits<double>::quiet_NaN();
    double bound = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t h = 0;
    double q = 0.0;
};

struct SearchResult {
    BayesNet net;
    double r_emp = 0.0;
    std::vector<NodeScore> per_node_scores;
    std::optional<RiskBound> risk_bound; // set by srm_select
    std::vector<GridCell> grid;          // every evaluated cell, k outer, m inner
    std::vector<std::string> warnings;

    const Dag& dag() const noexcept { return net.dag(); }
};

namespace detail {

inline void require_permutation(std::span<const std::size_t> order, std::size_t n) {
    if (order.size() != n) {
        throw parameter_error("order must list every variable exactly once");
    }
    std::vector<bool> seen(n, false);
    for (auto j : order) {
        if (j >= n || seen[j]) {
            throw parameter_error("order must list every variable exactly once");
        }
        seen[j] = true;
    }
}

inline SearchResult assemble(const Dataset& data, std::vector<NodeScore> scores, std::vector<Cpt> cpts) {
    ParentLists parents(data.n());
    double r_emp = 0.0;
    for (const auto& s : scores) {
        parents[s.node] = s.parents;
    }
    // sum in node-index order so the value does not depend on the search path
    std::vector<double> by_node(data.n(), 0.0);
    for (const auto& s : scores) {
        by_node[s.node] = s.log_loss;
    }
    for (double v : by_node) {
        r_emp += v;
    }
    SearchResult result;
    result.net = BayesNet(data.domain(), Dag(std::move(parents)), std::move(cpts));
    result.r_emp = r_emp;
    std::sort(scores.begin(), scores.end(), [](const auto& a, const auto& b) { return a.node < b.node; });
    result.per_node_scores = std::move(scores);
    return result;
}

inline SearchResult best_parents_per_node(FamilyScorer& scorer, std::span<const std::size_t> order,
                                          std::size_t delta, const CutoffPolicy& policy) {
    const Dataset& data = scorer.data();
    require_permutation(order, data.n());
    policy.require_feasible(data.domain());

    std::vector<NodeScore> scores;
    std::vector<Cpt> cpts(data.n());
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const std::size_t node = order[pos];
        std::vector<std::size_t> pool(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
        std::sort(pool.begin(), pool.end());

        std::optional<NodeScore> best;
        for (auto& parents : bounded_subsets(pool, delta)) {
            auto [loss, cpt] = scorer.fit(node, parents, policy);
            if (!best || loss < best->log_loss) {
                best = NodeScore{node, std::move(parents), loss};
                cpts[node] = std::move(cpt);
            }
        }
        scores.push_back(std::move(*best));
    }
    return assemble(data, std::move(scores), std::move(cpts));
}

inline bool acyclic(const std::vector<const std::vector<std::size_t>*>& parents) {
    const std::size_t n = parents.size();
    std::vector<std::size_t> pending(n);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t j = 0; j < n; ++j) {
        pending[j] = parents[j]->size();
        for (auto p : *parents[j]) {
            children[p].push_back(j);
        }
    }
    std::vector<std::size_t> stack;
    for (std::size_t j = 0; j < n; ++j) {
        if (pending[j] == 0) {
            stack.push_back(j);
        }
    }
    std::size_t seen = 0;
    while (!stack.empty()) {
        auto j = stack.back();
        stack.pop_back();
        ++seen;
        for (auto c : children[j]) {
            if (--pending[c] == 0) {
                stack.push_back(c);
            }
        }
    }
    return seen == n;
}

// candidate parent sets of each node: all subsets of the other nodes of size <= delta
inline std::vector<std::vector<std::vector<std::size_t>>> all_candidates(std::size_t n, std::size_t delta) {
    std::vector<std::vector<std::vector<std::size_t>>> cands(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::vector<std::size_t> pool;
        for (std::size_t i = 0; i < n; ++i) {
            if (i != j) {
                pool.push_back(i);
            }
        }
        cands[j] = bounded_subsets(pool, delta);
    }
    return cands;
}

inline constexpr std::size_t exhaustive_max_n = 6;
inline constexpr std::size_t exhaustive_max_delta = 2;

inline void require_exhaustive_guard(std::size_t n, std::size_t delta) {
    if (n <= exhaustive_max_n && delta <= exhaustive_max_delta) {
        return;
    }
    // number of parent-set assignments before the acyclicity filter
    double estimate = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        double per_node = 0.0;
        for (std::size_t d = 0; d <= std::min(delta, n - 1); ++d) {
            per_node += static_cast<double>(detail::binomial(n - 1, d));
        }
        estimate *= per_node;
    }
    throw size_limit_error("exhaustive DAG enumeration limited to n <= 6, delta <= 2; n = " + std::to_string(n) +
                           ", delta = " + std::to_string(delta) + " would visit about " +
                           std::to_string(estimate) + " parent-set assignments");
}

} // namespace detail

// Order-based search: each node independently takes the parent subset of
// its order-predecessors (size <= delta) with the smallest constrained-MLE
// log-loss. Because R_emp is a sum of per-node terms this minimizes R_emp
// over all order-consistent DAGs of in-degree <= delta. Ties go to the
// smaller subset, then the lexicographically smaller one.
inline SearchResult best_parents_per_node(const Dataset& data, std::span<const std::size_t> order,
                                          std::size_t delta, const CutoffPolicy& policy) {
    FamilyScorer scorer(data);
    return detail::best_parents_per_node(scorer, order, delta, policy);
}

// Visits every DAG on n nodes with in-degree <= delta exactly once. Order:
// odometer over per-node parent sets (node 0 slowest; each node's sets by
// size, then lexicographic), skipping cyclic assignments.
template <class Visit>
void for_each_dag(std::size_t n, std::size_t delta, Visit&& visit) {
    detail::require_exhaustive_guard(n, delta);
    if (n == 0) {
        return;
    }
    const auto cands = detail::all_candidates(n, delta);
    std::vector<std::size_t> choice(n, 0);
    std::vector<const std::vector<std::size_t>*> parents(n);
    while (true) {
        for (std::size_t j = 0; j < n; ++j) {
            parents[j] = &cands[j][choice[j]];
        }
        if (detail::acyclic(parents)) {
            ParentLists lists;
            for (auto* p : parents) {
                lists.push_back(*p);
            }
            visit(Dag(std::move(lists)));
        }
        std::size_t d = n;
        while (d > 0) {
            --d;
            if (++choice[d] < cands[d].size()) {
                break;
            }
            choice[d] = 0;
            if (d == 0) {
                return;
            }
        }
    }
}

inline std::vector<Dag> enumerate_dags(std::size_t n, std::size_t delta) {
    std::vector<Dag> out;
    for_each_dag(n, delta, [&](Dag dag) { out.push_back(std::move(dag)); });
    return out;
}

namespace detail {

// Exhaustive minimization of R_emp over every DAG of in-degree <= delta.
// Depth-first over nodes with a branch-and-bound cut on the best remaining
// per-node losses; the first minimal assignment in enumeration order wins.
inline SearchResult best_dag_exhaustive(FamilyScorer& scorer, std::size_t delta, const CutoffPolicy& policy) {
    const Dataset& data = scorer.data();
    const std::size_t n = data.n();
    require_exhaustive_guard(n, delta);
    policy.require_feasible(data.domain());

    const auto cands = all_candidates(n, delta);
    std::vector<std::vector<double>> loss(n);
    std::vector<double> min_loss(n, std::numeric_limits<double>::infinity());
    for (std::size_t j = 0; j < n; ++j) {
        for (const auto& parents : cands[j]) {
            loss[j].push_back(scorer.fit(j, parents, policy).first);
            min_loss[j] = std::min(min_loss[j], loss[j].back());
        }
    }
    // suffix[j] = sum of min_loss over nodes j..n-1
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t j = n; j-- > 0;) {
        suffix[j] = suffix[j + 1] + min_loss[j];
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> best_choice;
    std::vector<std::size_t> choice(n, 0);
    std::vector<const std::vector<std::size_t>*> parents(n);

    std::function<void(std::size_t, double)> descend = [&](std::size_t j, double partial) {
        if (j == n) {
            if (partial < best && acyclic(parents)) {
                best = partial;
                best_choice = choice;
            }
            return;
        }
        for (std::size_t c = 0; c < cands[j].size(); ++c) {
            const double next = partial + loss[j][c];
            if (!(next + suffix[j + 1] < best)) {
                continue;
            }
            choice[j] = c;
            parents[j] = &cands[j][c];
            descend(j + 1, next);
        }
    };
    descend(0, 0.0);

    std::vector<NodeScore> scores;
    std::vector<Cpt> cpts;
    for (std::size_t j = 0; j < n; ++j) {
        const auto& ps = cands[j][best_choice[j]];
        auto [l, cpt] = scorer.fit(j, ps, policy);
        scores.push_back({j, ps, l});
        cpts.push_back(std::move(cpt));
    }
    return assemble(data, std::move(scores), std::move(cpts));
}

} // namespace detail

inline SearchResult best_dag_exhaustive(const Dataset& data, std::size_t delta, const CutoffPolicy& policy) {
    FamilyScorer scorer(data);
    return detail::best_dag_exhaustive(scorer, delta, policy);
}

struct SrmConfig {
    std::size_t delta_max = 2;
    std::size_t m_max = 8;
    double eta = 0.05;
    // Prior weight of cell (k, m) before renormalization over the grid.
    std::function<double(std::size_t, std::size_t)> prior = default_prior;
    // Variable order for order-based search; absent means exhaustive search
    // over all DAGs (guarded to tiny n).
    std::optional<std::vector<std::size_t>> order;
    // Defaults to ordered with an order, unordered without one.
    std::optional<BoundKind> bound_kind;
    // Replaces the whole ladder lambda_m = 2^-m, m = 1..m_max.
    std::optional<std::vector<double>> lambda_ladder;
};

namespace detail {

inline BoundKind effective_bound_kind(const SrmConfig& config) {
    const BoundKind kind = config.bound_kind.value_or(config.order ? BoundKind::ordered : BoundKind::unordered);
    if (kind == BoundKind::given_graph) {
        throw parameter_error("srm: the given-graph bound does not cover a search over graphs");
    }
    if (kind == BoundKind::ordered && !config.order) {
        throw parameter_error("srm: the ordered bound needs a variable order");
    }
    return kind;
}

inline std::uint64_t class_vc_bound(const CategoricalDomain& domain, const SrmConfig& config, BoundKind kind,
                                    std::size_t k) {
    switch (kind) {
    case BoundKind::ordered: return vc_bound_ordered(domain, *config.order, k).h;
    case BoundKind::unordered: return vc_bound_unordered(domain, k).h;
    case BoundKind::closed_form: {
        const auto cf = closed_form_bounds(domain.n(), domain.max_size(), k);
        return config.order ? cf.ordered : cf.unordered;
    }
    case BoundKind::given_graph: break;
    }
    throw parameter_error("srm: unsupported bound kind");
}

} // namespace detail

// Structural risk minimization over in-degree classes k = 0..delta_max and
// cutoffs lambda_m. Each cell fits the R_emp-minimal network of class k
// with per-transition floor lambda_m^(1/n), attaches
// phi = confidence(lambda_m, l, h_k, q_km * eta), and the cell with the
// smallest R_emp + phi is returned (ties: smaller k, then smaller m).
// Cells whose floor is infeasible for the domain are skipped with a warning.
inline SearchResult srm_select(const Dataset& data, const SrmConfig& config) {
    if (!(config.eta > 0.0 && config.eta < 1.0)) {
        throw parameter_error("srm: eta must lie in (0, 1)");
    }
    const std::size_t n = data.n();
    const BoundKind kind = detail::effective_bound_kind(config);
    if (config.order) {
        detail::require_permutation(*config.order, n);
    }

    std::vector<std::string> warnings;
    std::size_t delta_max = config.delta_max;
    if (delta_max >= n) {
        delta_max = n - 1;
        warnings.push_back("delta_max lowered to n - 1 = " + std::to_string(delta_max));
    }

    std::vector<double> ladder;
    if (config.lambda_ladder) {
        ladder = *config.lambda_ladder;
    } else {
        for (std::size_t m = 1; m <= config.m_max; ++m) {
            ladder.push_back(cutoff_lambda(m));
        }
    }
    if (ladder.empty()) {
        throw parameter_error("srm: empty cutoff ladder");
    }

    double prior_mass = 0.0;
    for (std::size_t k = 0; k <= delta_max; ++k) {
        for (std::size_t m = 1; m <= ladder.size(); ++m) {
            const double w = config.prior(k, m);
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw parameter_error("srm: prior weights must be positive and finite");
            }
            prior_mass += w;
        }
    }

    FamilyScorer scorer(data);
    std::vector<std::uint64_t> h(delta_max + 1);
    for (std::size_t k = 0; k <= delta_max; ++k) {
        h[k] = detail::class_vc_bound(data.domain(), config, kind, k);
    }

    std::vector<GridCell> grid;
    std::optional<SearchResult> best;
    std::optional<RiskBound> best_bound;
    for (std::size_t k = 0; k <= delta_max; ++k) {
        for (std::size_t m = 1; m <= ladder.size(); ++m) {
            const double lambda = ladder[m - 1];
            const auto policy = CutoffPolicy::from_lambda(lambda, n);
            GridCell cell{k, m, lambda, policy.epsilon(), policy.feasible_for(data.domain())};
            if (!cell.feasible) {
                if (k == 0) {
                    warnings.push_back("cutoff m = " + std::to_string(m) + " (lambda = " + std::to_string(lambda) +
                                       ") skipped: floor " + std::to_string(policy.epsilon()) +
                                       " infeasible for alphabet size " +
                                       std::to_string(data.domain().max_size()));
                }
                grid.push_back(cell);
                continue;
            }
            auto fit = config.order ? detail::best_parents_per_node(scorer, *config.order, k, policy)
                                    : detail::best_dag_exhaustive(scorer, k, policy);
            cell.h = h[k];
            cell.q = config.prior(k, m) / prior_mass;
            cell.r_emp = fit.r_emp;
            cell.phi = confidence_term(lambda, data.size(), cell.h, cell.q * config.eta);
            cell.bound = cell.r_emp + cell.phi;
            grid.push_back(cell);

            if (!best_bound || cell.bound < best_bound->bound) {
                best_bound = RiskBound{cell.r_emp, cell.phi, cell.bound, config.eta, lambda, cell.h, k, m, cell.q};
                best = std::move(fit);
            }
        }
    }
    if (!best) {
        throw infeasible_error("srm: no cutoff in the ladder is feasible for this domain");
    }
    best->risk_bound = best_bound;
    best->grid = std::move(grid);
    best->warnings = std::move(warnings);
    return std::move(*best);
}

struct TrialRecord {
    std::uint64_t seed;
    double r_emp;
    double bound;
    double true_risk;
    std::size_t k;
    std::size_t m;
    bool violated;
};

struct BoundExperimentReport {
    std::size_t trials = 0;
    std::size_t violations = 0;
    double violation_rate = 0.0;
    double mean_slack = 0.0; // mean of bound - true risk
    double min_slack = std::numeric_limits<double>::infinity();
    std::vector<TrialRecord> records;
};

// Repeats: sample l rows from `truth`, run srm_select, and check the true
// risk of the selected network against the certified bound.
inline BoundExperimentReport validate_bound_experiment(const BayesNet& truth, const SrmConfig& config,
                                                       std::size_t l, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) {
        throw parameter_error("validate_bound_experiment: need at least one trial");
    }
    detail::require_enumerable(truth.domain());
    const CounterRng seeds(seed);
    BoundExperimentReport report;
    report.trials = trials;
    double slack_sum = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        const std::uint64_t trial_seed = seeds.bits(t);
        const Dataset data = forward_sample(truth, l, trial_seed);
        const SearchResult selected = srm_select(data, config);
        const RiskBound& rb = *selected.risk_bound;
        const double risk = true_risk(selected.net, truth);
        const bool violated = risk > rb.bound;
        report.violations += violated ? 1 : 0;
        slack_sum += rb.bound - risk;
        report.min_slack = std::min(report.min_slack, rb.bound - risk);
        report.records.push_back({trial_seed, rb.r_emp, rb.bound, risk, *rb.k, *rb.m, violated});
    }
    report.violation_rate = static_cast<double>(report.violations) / static_cast<double>(trials);
    report.mean_slack = slack_sum / static_cast<double>(trials);
    return report;
}

} // namespace bnvc

#endif // bnvc_search_hpp
