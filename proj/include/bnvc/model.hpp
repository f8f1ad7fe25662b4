#ifndef bnvc_model_hpp
#define bnvc_model_hpp

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "bnvc/config_index.hpp"
#include "bnvc/error.hpp"

namespace bnvc {

// Names and finite value alphabets of n categorical variables.
class CategoricalDomain {
public:
    CategoricalDomain() = default;

    CategoricalDomain(std::vector<std::string> names, std::vector<std::vector<std::string>> alphabets)
        : names_(std::move(names)), alphabets_(std::move(alphabets)) {
        if (names_.empty()) {
            throw parameter_error("CategoricalDomain: need at least one variable");
        }
        if (names_.size() != alphabets_.size()) {
            throw dimension_error("CategoricalDomain: names and alphabets differ in length");
        }
        std::unordered_set<std::string> seen_names;
        for (std::size_t j = 0; j < names_.size(); ++j) {
            if (!seen_names.insert(names_[j]).second) {
                throw parameter_error("CategoricalDomain: duplicate variable name '" + names_[j] + "'");
            }
            if (alphabets_[j].size() < 2) {
                throw degenerate_alphabet_error("CategoricalDomain: variable '" + names_[j] +
                                                "' has fewer than 2 values");
            }
            std::unordered_set<std::string> seen(alphabets_[j].begin(), alphabets_[j].end());
            if (seen.size() != alphabets_[j].size()) {
                throw parameter_error("CategoricalDomain: variable '" + names_[j] + "' has repeated values");
            }
        }
    }

    // Variables named x0..x{n-1} with values "0".."m_j-1".
    static CategoricalDomain with_sizes(std::span<const std::size_t> sizes) {
        std::vector<std::string> names;
        std::vector<std::vector<std::string>> alphabets;
        for (std::size_t j = 0; j < sizes.size(); ++j) {
            names.push_back("x" + std::to_string(j));
            std::vector<std::string> values;
            for (std::size_t v = 0; v < sizes[j]; ++v) {
                values.push_back(std::to_string(v));
            }
            alphabets.push_back(std::move(values));
        }
        return CategoricalDomain(std::move(names), std::move(alphabets));
    }

    static CategoricalDomain binary(std::size_t n) {
        std::vector<std::size_t> sizes(n, 2);
        return with_sizes(sizes);
    }

    std::size_t n() const noexcept { return names_.size(); }
    std::size_t size(std::size_t j) const { return alphabets_.at(j).size(); }
    const std::string& name(std::size_t j) const { return names_.at(j); }
    const std::vector<std::string>& names() const noexcept { return names_; }
    const std::vector<std::string>& alphabet(std::size_t j) const { return alphabets_.at(j); }
    const std::vector<std::vector<std::string>>& alphabets() const noexcept { return alphabets_; }

    std::vector<std::size_t> sizes() const {
        std::vector<std::size_t> s;
        s.reserve(n());
        for (const auto& a : alphabets_) {
            s.push_back(a.size());
        }
        return s;
    }

    std::size_t max_size() const {
        std::size_t m = 0;
        for (const auto& a : alphabets_) {
            m = std::max(m, a.size());
        }
        return m;
    }

    std::optional<std::size_t> index_of(const std::string& name) const {
        auto it = std::find(names_.begin(), names_.end(), name);
        if (it == names_.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - names_.begin());
    }

    std::optional<Code> code_of(std::size_t j, const std::string& token) const {
        const auto& a = alphabets_.at(j);
        auto it = std::find(a.begin(), a.end(), token);
        if (it == a.end()) {
            return std::nullopt;
        }
        return static_cast<Code>(it - a.begin());
    }

    // total number of joint states, with overflow check
    std::uint64_t state_count() const {
        std::uint64_t total = 1;
        for (const auto& a : alphabets_) {
            total = detail::checked_mul(total, a.size(), "state count");
        }
        return total;
    }

    friend bool operator==(const CategoricalDomain&, const CategoricalDomain&) = default;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<std::string>> alphabets_;
};

using ParentLists = std::vector<std::vector<std::size_t>>;

namespace detail {

// Kahn's algorithm, smallest available index first. On failure walks back
// along parents among the unprocessed nodes until a node repeats.
inline std::vector<std::size_t> kahn_order(const ParentLists& parents) {
    const std::size_t n = parents.size();
    std::vector<std::vector<std::size_t>> children(n);
    std::vector<std::size_t> in_degree(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        for (auto p : parents[j]) {
            children[p].push_back(j);
            ++in_degree[j];
        }
    }

    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t j = 0; j < n; ++j) {
        if (in_degree[j] == 0) {
            ready.push(j);
        }
    }

    std::vector<std::size_t> order;
    order.reserve(n);
    while (!ready.empty()) {
        auto j = ready.top();
        ready.pop();
        order.push_back(j);
        for (auto c : children[j]) {
            if (--in_degree[c] == 0) {
                ready.push(c);
            }
        }
    }
    if (order.size() == n) {
        return order;
    }

    // every leftover node has a leftover parent, so this walk must revisit a node
    std::size_t start = 0;
    while (in_degree[start] == 0) {
        ++start;
    }
    std::vector<std::size_t> position(n, n);
    std::vector<std::size_t> walk;
    std::size_t node = start;
    while (position[node] == n) {
        position[node] = walk.size();
        walk.push_back(node);
        for (auto p : parents[node]) {
            if (in_degree[p] > 0) {
                node = p;
                break;
            }
        }
    }
    // walk goes child -> parent; reverse so each entry is a parent of the next
    std::vector<std::size_t> cycle(walk.begin() + static_cast<std::ptrdiff_t>(position[node]), walk.end());
    std::reverse(cycle.begin(), cycle.end());

    std::ostringstream msg;
    msg << "graph has a cycle:";
    for (auto c : cycle) {
        msg << ' ' << c;
    }
    throw cycle_error(msg.str(), std::move(cycle));
}

} // namespace detail

// Deterministic topological order of a raw parent relation (parents before
// children, smallest index first among ready nodes). Throws cycle_error.
inline std::vector<std::size_t> topological_order(const ParentLists& parents) {
    const std::size_t n = parents.size();
    for (std::size_t j = 0; j < n; ++j) {
        for (auto p : parents[j]) {
            if (p >= n) {
                throw parameter_error("parent index out of range");
            }
        }
    }
    return detail::kahn_order(parents);
}

// Directed acyclic graph stored as per-node sorted parent lists.
class Dag {
public:
    Dag() = default;

    explicit Dag(std::size_t n) : parents_(n) { order_ = detail::kahn_order(parents_); }

    explicit Dag(ParentLists parents) : parents_(std::move(parents)) {
        const std::size_t n = parents_.size();
        for (std::size_t j = 0; j < n; ++j) {
            auto& r = parents_[j];
            std::sort(r.begin(), r.end());
            if (std::adjacent_find(r.begin(), r.end()) != r.end()) {
                throw parameter_error("Dag: duplicate parent of node " + std::to_string(j));
            }
            for (auto p : r) {
                if (p >= n) {
                    throw parameter_error("Dag: parent index out of range at node " + std::to_string(j));
                }
                if (p == j) {
                    throw cycle_error("Dag: self-loop at node " + std::to_string(j), {j});
                }
            }
        }
        order_ = detail::kahn_order(parents_);
    }

    std::size_t n() const noexcept { return parents_.size(); }
    const std::vector<std::size_t>& parents(std::size_t j) const { return parents_.at(j); }
    const ParentLists& parent_lists() const noexcept { return parents_; }
    std::size_t in_degree(std::size_t j) const { return parents_.at(j).size(); }

    std::size_t max_in_degree() const noexcept {
        std::size_t d = 0;
        for (const auto& r : parents_) {
            d = std::max(d, r.size());
        }
        return d;
    }

    std::size_t edge_count() const noexcept {
        std::size_t e = 0;
        for (const auto& r : parents_) {
            e += r.size();
        }
        return e;
    }

    bool has_edge(std::size_t from, std::size_t to) const {
        const auto& r = parents_.at(to);
        return std::binary_search(r.begin(), r.end(), from);
    }

    // true if every edge points forward in `order` (a permutation of nodes)
    bool consistent_with(std::span<const std::size_t> order) const {
        std::vector<std::size_t> rank(n());
        for (std::size_t i = 0; i < order.size(); ++i) {
            rank[order[i]] = i;
        }
        for (std::size_t j = 0; j < n(); ++j) {
            for (auto p : parents_[j]) {
                if (rank[p] >= rank[j]) {
                    return false;
                }
            }
        }
        return true;
    }

    const std::vector<std::size_t>& topological_order() const noexcept { return order_; }

    friend bool operator==(const Dag& a, const Dag& b) { return a.parents_ == b.parents_; }

private:
    ParentLists parents_;
    std::vector<std::size_t> order_;
};

inline const std::vector<std::size_t>& topological_order(const Dag& dag) { return dag.topological_order(); }

// Conditional log-probability table f_j(x_j, w) of one node, in nats.
// Layout: row = parent configuration (mixed radix over ascending parents),
// child value fastest.
class Cpt {
public:
    Cpt() = default;

    Cpt(std::size_t node, std::size_t child_size, std::size_t parent_config_count, std::vector<double> log_table)
        : node_(node), child_size_(child_size), parent_config_count_(parent_config_count),
          table_(std::move(log_table)) {}

    static Cpt from_probabilities(std::size_t node, std::size_t child_size, std::size_t parent_config_count,
                                  std::span<const double> probs) {
        std::vector<double> logs(probs.size());
        std::transform(probs.begin(), probs.end(), logs.begin(), [](double p) { return std::log(p); });
        return Cpt(node, child_size, parent_config_count, std::move(logs));
    }

    std::size_t node() const noexcept { return node_; }
    std::size_t child_size() const noexcept { return child_size_; }
    std::size_t parent_config_count() const noexcept { return parent_config_count_; }
    const std::vector<double>& log_table() const noexcept { return table_; }

    double log_prob(std::size_t parent_config, Code x) const {
        return table_[parent_config * child_size_ + x];
    }

    std::span<const double> log_row(std::size_t parent_config) const {
        return std::span<const double>(table_).subspan(parent_config * child_size_, child_size_);
    }

    std::vector<double> prob_row(std::size_t parent_config) const {
        auto row = log_row(parent_config);
        std::vector<double> p(row.size());
        std::transform(row.begin(), row.end(), p.begin(), [](double f) { return std::exp(f); });
        return p;
    }

    friend bool operator==(const Cpt&, const Cpt&) = default;

private:
    std::size_t node_ = 0;
    std::size_t child_size_ = 0;
    std::size_t parent_config_count_ = 1;
    std::vector<double> table_;
};

// Number of parent configurations of node j: product of parent alphabet sizes.
inline std::size_t parent_config_count(const CategoricalDomain& domain, const Dag& dag, std::size_t j) {
    std::uint64_t count = 1;
    for (auto p : dag.parents(j)) {
        count = detail::checked_mul(count, domain.size(p), "parent configuration count");
    }
    return static_cast<std::size_t>(count);
}

inline ConfigIndex parent_index(const CategoricalDomain& domain, const Dag& dag, std::size_t j) {
    std::vector<std::size_t> radices;
    for (auto p : dag.parents(j)) {
        radices.push_back(domain.size(p));
    }
    return ConfigIndex(std::move(radices));
}

// Flat index of the parent configuration of node j inside a full assignment.
inline std::size_t parent_config_of(const CategoricalDomain& domain, const std::vector<std::size_t>& parents,
                                    std::span<const Code> x) {
    std::size_t index = 0;
    for (auto p : parents) {
        index = index * domain.size(p) + x[p];
    }
    return index;
}

struct Violation {
    enum class Kind { node_mismatch, dimension, normalization, non_finite };

    Kind kind;
    std::size_t node;
    std::optional<std::size_t> context; // parent configuration, when the defect is per row
    double magnitude;                   // |row sum - 1| or size difference
    std::string message;
};

inline constexpr double normalization_tolerance = 1e-9;

// Domain + DAG + one Cpt per node. Construction only checks that the three
// parts agree on n; everything else is reported by validate().
class BayesNet {
public:
    BayesNet() = default;

    BayesNet(CategoricalDomain domain, Dag dag, std::vector<Cpt> cpts)
        : domain_(std::move(domain)), dag_(std::move(dag)), cpts_(std::move(cpts)) {
        if (domain_.n() != dag_.n() || cpts_.size() != dag_.n()) {
            throw dimension_error("BayesNet: domain, dag and cpts disagree on variable count");
        }
    }

    const CategoricalDomain& domain() const noexcept { return domain_; }
    const Dag& dag() const noexcept { return dag_; }
    const std::vector<Cpt>& cpts() const noexcept { return cpts_; }
    const Cpt& cpt(std::size_t j) const { return cpts_.at(j); }
    std::size_t n() const noexcept { return dag_.n(); }

private:
    CategoricalDomain domain_;
    Dag dag_;
    std::vector<Cpt> cpts_;
};

inline std::vector<Violation> validate(const BayesNet& net) {
    std::vector<Violation> out;
    const auto& domain = net.domain();
    const auto& dag = net.dag();
    for (std::size_t j = 0; j < net.n(); ++j) {
        const Cpt& cpt = net.cpt(j);
        if (cpt.node() != j) {
            out.push_back({Violation::Kind::node_mismatch, j, std::nullopt,
                           std::abs(static_cast<double>(cpt.node()) - static_cast<double>(j)),
                           "cpt " + std::to_string(j) + " is labelled node " + std::to_string(cpt.node())});
            continue;
        }
        const std::size_t rows = parent_config_count(domain, dag, j);
        const std::size_t expected = rows * domain.size(j);
        if (cpt.child_size() != domain.size(j) || cpt.parent_config_count() != rows ||
            cpt.log_table().size() != expected) {
            out.push_back({Violation::Kind::dimension, j, std::nullopt,
                           std::abs(static_cast<double>(cpt.log_table().size()) - static_cast<double>(expected)),
                           "node " + std::to_string(j) + ": table has " + std::to_string(cpt.log_table().size()) +
                               " entries, expected " + std::to_string(expected)});
            continue;
        }
        for (std::size_t w = 0; w < rows; ++w) {
            double sum = 0.0;
            bool finite = true;
            for (double f : cpt.log_row(w)) {
                if (std::isnan(f) || f == std::numeric_limits<double>::infinity()) {
                    finite = false;
                }
                sum += std::exp(f);
            }
            if (!finite) {
                out.push_back({Violation::Kind::non_finite, j, w, std::numeric_limits<double>::infinity(),
                               "node " + std::to_string(j) + ", context " + std::to_string(w) +
                                   ": NaN or +inf log-probability"});
            } else if (std::abs(sum - 1.0) > normalization_tolerance) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "node " << j << ", context " << w << ": row sums to " << sum;
                out.push_back({Violation::Kind::normalization, j, w, std::abs(sum - 1.0), msg.str()});
            }
        }
    }
    return out;
}

inline void require_valid(const BayesNet& net) {
    auto violations = validate(net);
    if (!violations.empty()) {
        std::string msg = "invalid network: " + violations.front().message;
        if (violations.size() > 1) {
            msg += " (+" + std::to_string(violations.size() - 1) + " more)";
        }
        throw validation_error(msg);
    }
}

// ln P(x) = sum_j f_j(x_j, x|parents). May be -inf when a factor is zero.
inline double log_joint(const BayesNet& net, std::span<const Code> x) {
    const auto& domain = net.domain();
    if (x.size() != domain.n()) {
        throw invalid_assignment_error("log_joint: assignment has wrong length");
    }
    for (std::size_t j = 0; j < x.size(); ++j) {
        if (x[j] >= domain.size(j)) {
            throw invalid_assignment_error("log_joint: value " + std::to_string(x[j]) + " out of range for '" +
                                           domain.name(j) + "'");
        }
    }
    double total = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        total += net.cpt(j).log_prob(parent_config_of(domain, net.dag().parents(j), x), x[j]);
    }
    return total;
}

} // namespace bnvc

#endif // bnvc_model_hpp
