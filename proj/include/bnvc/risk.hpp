#ifndef bnvc_risk_hpp
#define bnvc_risk_hpp

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "bnvc/dataset.hpp"
#include "bnvc/error.hpp"
#include "bnvc/model.hpp"

namespace bnvc {

// Risk is the negative mean log-likelihood in nats: non-negative, smaller is
// better. For a network whose joint probabilities are all >= lambda the
// per-sample loss lies in [0, -ln lambda].
inline double empirical_risk(const BayesNet& net, const Dataset& data) {
    if (!(net.domain() == data.domain())) {
        throw dimension_error("empirical_risk: network and dataset domains differ");
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double lp = log_joint(net, data.row(i));
        if (lp == -std::numeric_limits<double>::infinity()) {
            throw support_violation_error("row " + std::to_string(i) + " has probability zero under the network", i);
        }
        acc += lp;
    }
    return -acc / static_cast<double>(data.size());
}

inline constexpr std::uint64_t max_enumerated_states = std::uint64_t{1} << 22;

namespace detail {

inline void require_enumerable(const CategoricalDomain& domain) {
    std::uint64_t states = 0;
    try {
        states = domain.state_count();
    } catch (const overflow_error&) {
        throw size_limit_error("joint state space exceeds 2^64; exact enumeration refused");
    }
    if (states > max_enumerated_states) {
        throw size_limit_error("joint state space has " + std::to_string(states) + " states (limit " +
                               std::to_string(max_enumerated_states) + "); exact enumeration refused");
    }
}

// Calls visit(x) for every joint assignment, last variable fastest.
template <class Visit>
void for_each_state(const CategoricalDomain& domain, Visit&& visit) {
    require_enumerable(domain);
    const auto sizes = domain.sizes();
    std::vector<Code> x(sizes.size(), 0);
    while (true) {
        visit(std::span<const Code>(x));
        std::size_t d = x.size();
        while (d > 0) {
            --d;
            if (++x[d] < sizes[d]) {
                break;
            }
            x[d] = 0;
            if (d == 0) {
                return;
            }
        }
    }
}

inline void require_same_domain(const BayesNet& a, const BayesNet& b, const char* what) {
    if (!(a.domain() == b.domain())) {
        throw dimension_error(std::string(what) + ": networks are over different domains");
    }
}

} // namespace detail

// -sum_x P_truth(x) ln P_net(x). States outside the truth's support
// contribute nothing; +inf if the net misses part of that support.
inline double true_risk(const BayesNet& net, const BayesNet& truth) {
    detail::require_same_domain(net, truth, "true_risk");
    double acc = 0.0;
    detail::for_each_state(truth.domain(), [&](std::span<const Code> x) {
        const double lt = log_joint(truth, x);
        if (lt == -std::numeric_limits<double>::infinity()) {
            return;
        }
        acc -= std::exp(lt) * log_joint(net, x);
    });
    return acc;
}

inline double entropy(const BayesNet& net) {
    double acc = 0.0;
    detail::for_each_state(net.domain(), [&](std::span<const Code> x) {
        const double lp = log_joint(net, x);
        if (lp == -std::numeric_limits<double>::infinity()) {
            return;
        }
        acc -= std::exp(lp) * lp;
    });
    return acc;
}

// KL(truth || net), summed directly so identical networks give exactly 0.
inline double kl_divergence(const BayesNet& truth, const BayesNet& net) {
    detail::require_same_domain(net, truth, "kl_divergence");
    double acc = 0.0;
    detail::for_each_state(truth.domain(), [&](std::span<const Code> x) {
        const double lt = log_joint(truth, x);
        if (lt == -std::numeric_limits<double>::infinity()) {
            return;
        }
        acc += std::exp(lt) * (lt - log_joint(net, x));
    });
    return acc;
}

} // namespace bnvc

#endif // bnvc_risk_hpp
