#ifndef bnvc_bounds_hpp
#define bnvc_bounds_hpp

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bnvc/config_index.hpp"
#include "bnvc/error.hpp"
#include "bnvc/model.hpp"

namespace bnvc {

// VC-dimension upper bounds for families of networks over categorical
// variables. All integer arithmetic is overflow-checked.

enum class BoundKind { given_graph, ordered, unordered, closed_form };

inline const char* to_string(BoundKind kind) {
    switch (kind) {
    case BoundKind::given_graph: return "given-graph";
    case BoundKind::ordered: return "ordered";
    case BoundKind::unordered: return "unordered";
    case BoundKind::closed_form: return "closed-form";
    }
    return "unknown";
}

// Subset size per node in the order-consistent bound. `widened` lets node j
// use min(delta, j - 1) predecessors, so the first delta nodes still get a
// parameter space; `literal` keeps exactly delta-subsets, giving those
// nodes dimension 0.
enum class OrderedForm { widened, literal };

struct VcBoundReport {
    std::uint64_t h = 0;
    BoundKind kind = BoundKind::given_graph;
    std::size_t n = 0;
    std::optional<std::size_t> delta;
    std::optional<ParentLists> parents; // given-graph only
    std::vector<std::size_t> sizes;     // m_j, in the order the bound was evaluated
    OrderedForm form = OrderedForm::widened;
};

namespace detail {

// e_s(values) = sum over s-subsets of the product of their entries
inline std::uint64_t elementary_symmetric(std::span<const std::size_t> values, std::size_t s) {
    std::vector<std::uint64_t> e(s + 1, 0);
    e[0] = 1;
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t t = std::min(s, i + 1); t >= 1; --t) {
            e[t] = checked_add(e[t], checked_mul(e[t - 1], values[i], "vc bound"), "vc bound");
        }
    }
    return e[s];
}

inline std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) {
        return 0;
    }
    k = std::min(k, n - k);
    std::uint64_t r = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // r * (n - k + i) is divisible by i; divide by the gcd first to stay small
        const std::uint64_t num = n - k + i;
        const std::uint64_t g = std::gcd(r, i);
        r = checked_mul(r / g, num / (i / g), "binomial");
    }
    return r;
}

inline std::uint64_t checked_pow(std::uint64_t base, std::size_t exp) {
    std::uint64_t r = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        r = checked_mul(r, base, "power");
    }
    return r;
}

inline void require_delta(std::size_t n, std::size_t delta) {
    if (delta >= n) {
        throw parameter_error("in-degree bound delta = " + std::to_string(delta) + " must be below n = " +
                              std::to_string(n));
    }
}

} // namespace detail

// sum_j prod_{i in parents(j) + {j}} m_i
inline VcBoundReport vc_bound_graph(const CategoricalDomain& domain, const Dag& dag) {
    if (dag.n() != domain.n()) {
        throw dimension_error("vc_bound_graph: dag and domain disagree on variable count");
    }
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < dag.n(); ++j) {
        std::uint64_t term = domain.size(j);
        for (auto p : dag.parents(j)) {
            term = detail::checked_mul(term, domain.size(p), "vc_bound_graph");
        }
        total = detail::checked_add(total, term, "vc_bound_graph");
    }
    VcBoundReport r;
    r.h = total;
    r.kind = BoundKind::given_graph;
    r.n = domain.n();
    r.delta = dag.max_in_degree();
    r.parents = dag.parent_lists();
    r.sizes = domain.sizes();
    return r;
}

// All graphs of in-degree <= delta consistent with a variable order:
// sum_j m_j * e_s(m of the j-1 predecessors), s = delta (literal) or
// min(delta, j-1) (widened). `sizes` are the alphabet sizes listed in order.
inline VcBoundReport vc_bound_ordered(std::span<const std::size_t> sizes, std::size_t delta,
                                      OrderedForm form = OrderedForm::widened) {
    detail::require_delta(sizes.size(), delta);
    std::uint64_t total = 0;
    for (std::size_t j = 0; j < sizes.size(); ++j) {
        const std::size_t s = form == OrderedForm::widened ? std::min(delta, j) : delta;
        const auto inner = detail::elementary_symmetric(sizes.first(j), s);
        total = detail::checked_add(total, detail::checked_mul(sizes[j], inner, "vc_bound_ordered"),
                                    "vc_bound_ordered");
    }
    VcBoundReport r;
    r.h = total;
    r.kind = BoundKind::ordered;
    r.n = sizes.size();
    r.delta = delta;
    r.sizes.assign(sizes.begin(), sizes.end());
    r.form = form;
    return r;
}

inline VcBoundReport vc_bound_ordered(const CategoricalDomain& domain, std::size_t delta,
                                      OrderedForm form = OrderedForm::widened) {
    const auto sizes = domain.sizes();
    return vc_bound_ordered(std::span<const std::size_t>(sizes), delta, form);
}

inline VcBoundReport vc_bound_ordered(const CategoricalDomain& domain, std::span<const std::size_t> order,
                                      std::size_t delta, OrderedForm form = OrderedForm::widened) {
    if (order.size() != domain.n()) {
        throw dimension_error("vc_bound_ordered: order length differs from n");
    }
    std::vector<std::size_t> sizes;
    for (auto j : order) {
        sizes.push_back(domain.size(j));
    }
    return vc_bound_ordered(std::span<const std::size_t>(sizes), delta, form);
}

// All graphs of in-degree <= delta: sum over (delta+1)-subsets of the
// product of their alphabet sizes.
inline VcBoundReport vc_bound_unordered(const CategoricalDomain& domain, std::size_t delta) {
    detail::require_delta(domain.n(), delta);
    const auto sizes = domain.sizes();
    VcBoundReport r;
    r.h = detail::elementary_symmetric(sizes, delta + 1);
    r.kind = BoundKind::unordered;
    r.n = domain.n();
    r.delta = delta;
    r.sizes = sizes;
    return r;
}

// Simplified bounds with every alphabet replaced by the largest one.
struct ClosedFormBounds {
    std::uint64_t given_graph; // n * l^(delta+1)
    std::uint64_t ordered;     // l^(delta+1) * sum_j C(j-1, delta)
    std::uint64_t unordered;   // C(n, delta+1) * l^(delta+1)
};

inline ClosedFormBounds closed_form_bounds(std::size_t n, std::size_t l_max, std::size_t delta) {
    detail::require_delta(n, delta);
    const auto power = detail::checked_pow(l_max, delta + 1);
    std::uint64_t ordered_terms = 0;
    for (std::size_t j = 1; j <= n; ++j) {
        ordered_terms = detail::checked_add(ordered_terms, detail::binomial(j - 1, delta), "closed form");
    }
    return {detail::checked_mul(n, power, "closed form"), detail::checked_mul(power, ordered_terms, "closed form"),
            detail::checked_mul(detail::binomial(n, delta + 1), power, "closed form")};
}

// Confidence term for losses bounded in [A, B]:
//   (B - A) * sqrt((h (ln(2l/h) + 1) - ln(eta/4) + 1) / l)
// Beyond h = 2l the expression stops growing in h and the guarantee is
// vacuous; +inf is returned there.
inline double confidence_term_ab(double a, double b, std::size_t l, std::uint64_t h, double eta) {
    if (!(b >= a) || !std::isfinite(a) || !std::isfinite(b)) {
        throw parameter_error("confidence term: need finite A <= B");
    }
    if (l == 0 || h == 0) {
        throw parameter_error("confidence term: l and h must be positive");
    }
    if (!(eta > 0.0 && eta < 1.0)) {
        throw parameter_error("confidence term: eta must lie in (0, 1)");
    }
    const double ld = static_cast<double>(l);
    const double hd = static_cast<double>(h);
    if (hd > 2.0 * ld) {
        return std::numeric_limits<double>::infinity();
    }
    const double radicand = (hd * (std::log(2.0 * ld / hd) + 1.0) - std::log(eta / 4.0) + 1.0) / ld;
    return (b - a) * std::sqrt(radicand);
}

// Losses -ln P for networks with every joint probability >= lambda: A = 0,
// B = -ln lambda.
inline double confidence_term(double lambda, std::size_t l, std::uint64_t h, double eta) {
    if (!(lambda > 0.0 && lambda <= 1.0)) {
        throw parameter_error("confidence term: lambda must lie in (0, 1]");
    }
    return confidence_term_ab(0.0, -std::log(lambda), l, h, eta);
}

inline double cutoff_lambda(std::size_t m) { return std::ldexp(1.0, -static_cast<int>(m)); }

// Prior weight 2^-(k+m) of cell (k, m) before any renormalization.
inline double default_prior(std::size_t k, std::size_t m) { return std::ldexp(1.0, -static_cast<int>(k + m)); }

// Confidence of SRM cell (k, m): lambda_m = 2^-m, confidence eta split by
// the prior weight q of the cell.
inline double srm_confidence(std::size_t m, std::size_t k, std::size_t l, std::uint64_t h_k, double eta, double q) {
    (void)k; // the class enters only through h_k and q
    if (m == 0) {
        throw parameter_error("srm_confidence: cutoff index m starts at 1");
    }
    if (!(q > 0.0 && q <= 1.0)) {
        throw parameter_error("srm_confidence: prior weight must lie in (0, 1]");
    }
    return confidence_term(cutoff_lambda(m), l, h_k, q * eta);
}

// Certified statement: with probability >= 1 - eta, R(net) <= bound.
struct RiskBound {
    double r_emp = 0.0;
    double phi = 0.0;
    double bound = 0.0;
    double eta = 0.05;
    double lambda = 1.0;
    std::uint64_t h = 0;
    std::optional<std::size_t> k;
    std::optional<std::size_t> m;
    std::optional<double> q;
};

} // namespace bnvc

#endif // bnvc_bounds_hpp
