// bnvc: learn / bound / sample / eval on categorical Bayesian networks.
//
// Exit codes: 0 success, 2 usage or ingestion, 3 support violation in eval,
// 4 infeasible cutoff. Summaries go to stdout, the JSON or CSV document to
// --out, diagnostics to stderr.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnvc/bnvc.hpp"

namespace {

using namespace bnvc;

constexpr std::uint64_t default_seed = 20260101;

enum exit_code : int { ok = 0, internal = 1, usage = 2, support = 3, infeasible = 4 };

struct usage_error : bnvc::error {
    using bnvc::error::error;
};

std::string num(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(list);
    while (std::getline(in, item, ',')) {
        out.push_back(item);
    }
    return out;
}

std::optional<BoundKind> parse_bound_kind(const std::string& s) {
    if (s.empty()) {
        return std::nullopt;
    }
    if (s == "ordered") {
        return BoundKind::ordered;
    }
    if (s == "unordered") {
        return BoundKind::unordered;
    }
    return BoundKind::closed_form;
}

struct LearnArgs {
    std::string csv, schema, order, bound_kind, out;
    std::size_t delta_max = 2;
    std::size_t m_max = 8;
    double eta = 0.05;
    std::optional<double> lambda;
    std::uint64_t seed = default_seed;
    bool exhaustive = false;
};

int run_learn(const LearnArgs& a) {
    std::optional<Schema> schema;
    if (!a.schema.empty()) {
        schema = load_schema(a.schema);
    }
    const Dataset data = load_csv(a.csv, schema);
    const auto& domain = data.domain();

    SrmConfig config;
    config.delta_max = a.delta_max;
    config.m_max = a.m_max;
    config.eta = a.eta;
    config.bound_kind = parse_bound_kind(a.bound_kind);
    if (a.lambda) {
        config.lambda_ladder = std::vector<double>{*a.lambda};
    }
    if (a.exhaustive) {
        if (!a.order.empty()) {
            throw usage_error("--exhaustive and --order are mutually exclusive");
        }
    } else {
        // default order: CSV column order
        std::vector<std::size_t> order;
        if (a.order.empty()) {
            for (std::size_t j = 0; j < domain.n(); ++j) {
                order.push_back(j);
            }
        } else {
            for (const auto& name : split_names(a.order)) {
                auto j = domain.index_of(name);
                if (!j) {
                    throw usage_error("--order: unknown variable '" + name + "'");
                }
                order.push_back(*j);
            }
        }
        config.order = std::move(order);
    }

    const SearchResult result = srm_select(data, config);
    for (const auto& w : result.warnings) {
        std::cerr << "warning: " << w << '\n';
    }
    const RiskBound& rb = *result.risk_bound;
    std::cout << "k=" << *rb.k << " m=" << *rb.m << " lambda=" << num(rb.lambda) << " R_emp=" << num(rb.r_emp)
              << " phi=" << num(rb.phi) << " bound=" << num(rb.bound) << " edges=" << result.dag().edge_count()
              << '\n';

    if (!a.out.empty()) {
        json doc = to_json(result.net);
        json report = to_json(result);
        report["l"] = data.size();
        report["search"] = a.exhaustive ? "exhaustive" : "ordered";
        if (config.order) {
            std::vector<std::string> names;
            for (auto j : *config.order) {
                names.push_back(domain.name(j));
            }
            report["order"] = names;
        }
        report["seed"] = a.seed;
        doc["report"] = std::move(report);
        save_json(a.out, doc);
    }
    return ok;
}

struct BoundArgs {
    std::optional<std::size_t> n, delta, arity, l;
    bool binary = false;
    std::string dag, domain, out;
    std::optional<double> lambda;
    double eta = 0.05;
};

CategoricalDomain bound_domain(const BoundArgs& a, std::optional<std::size_t> n) {
    const int sources = (a.binary ? 1 : 0) + (a.arity ? 1 : 0) + (a.domain.empty() ? 0 : 1);
    if (sources > 1) {
        throw usage_error("give at most one of --binary, --arity, --domain");
    }
    if (!a.domain.empty()) {
        auto d = domain_from_schema(load_schema(a.domain));
        if (n && *n != d.n()) {
            throw usage_error("--domain lists " + std::to_string(d.n()) + " variables, expected " +
                              std::to_string(*n));
        }
        return d;
    }
    if (!n) {
        throw usage_error("cannot determine the number of variables");
    }
    const std::size_t arity = a.arity.value_or(2);
    if (arity < 2) {
        throw usage_error("--arity must be at least 2");
    }
    return CategoricalDomain::with_sizes(std::vector<std::size_t>(*n, arity));
}

int run_bound(const BoundArgs& a) {
    if (a.dag.empty() == !a.n.has_value()) {
        throw usage_error("give exactly one of --dag or --n");
    }
    if (a.n && !a.delta) {
        throw usage_error("--n needs --delta");
    }
    if (a.l.has_value() != a.lambda.has_value()) {
        throw usage_error("--l and --lambda go together");
    }

    std::optional<Dag> dag;
    std::optional<CategoricalDomain> domain;
    if (!a.dag.empty()) {
        std::ifstream in(a.dag);
        if (!in) {
            throw ingestion_error("cannot open '" + a.dag + "'");
        }
        json j;
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw format_error("'" + a.dag + "': " + e.what());
        }
        if (j.is_object() && j.contains("domain")) {
            domain = domain_from_json(j.at("domain"));
        }
        dag = dag_from_json(j.is_object() && j.contains("dag") ? j.at("dag") : j);
        if (!domain) {
            domain = bound_domain(a, dag->n());
        } else if (a.binary || a.arity || !a.domain.empty()) {
            throw usage_error("the --dag file already carries a domain");
        }
        if (domain->n() != dag->n()) {
            throw dimension_error("dag and domain disagree on the number of variables");
        }
    } else {
        domain = bound_domain(a, a.n);
    }
    const std::size_t n = domain->n();
    const std::size_t delta = a.delta.value_or(dag ? dag->max_in_degree() : 0);

    std::vector<VcBoundReport> exact;
    if (dag) {
        exact.push_back(vc_bound_graph(*domain, *dag));
    }
    exact.push_back(vc_bound_ordered(*domain, delta));
    exact.push_back(vc_bound_ordered(*domain, delta, OrderedForm::literal));
    exact.push_back(vc_bound_unordered(*domain, delta));
    const auto cf = closed_form_bounds(n, domain->max_size(), delta);

    auto phi = [&](std::uint64_t h) { return confidence_term(*a.lambda, *a.l, h, a.eta); };
    json doc{{"n", n}, {"sizes", domain->sizes()}, {"delta", delta}};
    json items = json::array();
    for (const auto& r : exact) {
        std::string label = std::string("h_") + to_string(r.kind);
        if (r.kind == BoundKind::ordered && r.form == OrderedForm::literal) {
            label += "_literal";
        }
        std::cout << label << '=' << r.h;
        json item = to_json(r);
        if (a.l) {
            const double p = phi(r.h);
            std::cout << " phi=" << num(p);
            item["phi"] = detail::number(p);
        }
        std::cout << '\n';
        items.push_back(std::move(item));
    }
    doc["exact"] = std::move(items);
    json closed = to_json(cf);
    std::cout << "closed_form given_graph=" << cf.given_graph << " ordered=" << cf.ordered
              << " unordered=" << cf.unordered << '\n';
    if (a.l) {
        closed["phi"] = json{{"given_graph", detail::number(phi(cf.given_graph))},
                             {"ordered", detail::number(phi(cf.ordered))},
                             {"unordered", detail::number(phi(cf.unordered))}};
        doc["confidence"] = json{{"lambda", *a.lambda}, {"l", *a.l}, {"eta", a.eta}};
    }
    doc["closed_form"] = std::move(closed);
    if (!a.out.empty()) {
        save_json(a.out, doc);
    }
    return ok;
}

struct SampleArgs {
    std::string net, out;
    std::size_t l = 0;
    std::uint64_t seed = default_seed;
};

int run_sample(const SampleArgs& a) {
    const BayesNet net = load_network(a.net);
    const Dataset data = forward_sample(net, a.l, a.seed);
    std::ofstream out(a.out);
    if (!out) {
        throw ingestion_error("cannot write '" + a.out + "'");
    }
    write_csv(out, data);
    std::cout << "sampled " << a.l << " rows with seed " << a.seed << " to " << a.out << '\n';
    return ok;
}

struct EvalArgs {
    std::string net, csv, schema, truth, out;
};

int run_eval(const EvalArgs& a) {
    if (a.csv.empty() && a.truth.empty()) {
        throw usage_error("eval needs --csv and/or --truth");
    }
    const BayesNet net = load_network(a.net);
    require_valid(net);
    json doc = json::object();
    if (!a.csv.empty()) {
        // codes must line up with the network's alphabets
        const Schema schema = a.schema.empty() ? schema_of(net.domain()) : load_schema(a.schema);
        const Dataset data = load_csv(a.csv, schema);
        if (!(data.domain() == net.domain())) {
            throw dimension_error("csv columns or alphabets differ from the network's domain");
        }
        const double r = empirical_risk(net, data);
        std::cout << "R_emp=" << num(r) << " l=" << data.size() << '\n';
        doc["empirical_risk"] = r;
        doc["l"] = data.size();
    }
    if (!a.truth.empty()) {
        const BayesNet truth = load_network(a.truth);
        require_valid(truth);
        const double r = true_risk(net, truth);
        const double h = entropy(truth);
        const double kl = kl_divergence(truth, net);
        std::cout << "R=" << num(r) << " S=" << num(h) << " KL=" << num(kl) << '\n';
        doc["true_risk"] = detail::number(r);
        doc["entropy"] = h;
        doc["kl"] = detail::number(kl);
    }
    if (!a.out.empty()) {
        save_json(a.out, doc);
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian network learning with VC-dimension risk bounds"};
    app.require_subcommand(1);

    LearnArgs learn;
    auto* cmd_learn = app.add_subcommand("learn", "select a network by structural risk minimization");
    cmd_learn->add_option("--csv", learn.csv, "training data")->required();
    cmd_learn->add_option("--schema", learn.schema, "JSON map of variable name to ordered alphabet");
    cmd_learn->add_option("--order", learn.order, "variable order NAME,NAME,... (default: column order)");
    cmd_learn->add_option("--delta-max", learn.delta_max, "largest in-degree class");
    cmd_learn->add_option("--m-max", learn.m_max, "cutoffs lambda = 2^-m for m = 1..m-max")
        ->check(CLI::Range(1, 60));
    cmd_learn->add_option("--eta", learn.eta, "confidence parameter");
    cmd_learn->add_option("--lambda", learn.lambda, "use this single cutoff instead of the ladder");
    cmd_learn->add_option("--bound-kind", learn.bound_kind, "VC bound for the classes")
        ->check(CLI::IsMember({"ordered", "unordered", "closed-form"}));
    cmd_learn->add_option("--seed", learn.seed, "accepted for uniformity; learn is deterministic");
    cmd_learn->add_option("--out", learn.out, "network and report JSON");
    cmd_learn->add_flag("--exhaustive", learn.exhaustive, "search all DAGs (n <= 6, delta <= 2)");

    BoundArgs bound;
    auto* cmd_bound = app.add_subcommand("bound", "VC-dimension bounds and confidence terms");
    cmd_bound->add_option("--n", bound.n, "number of variables");
    cmd_bound->add_option("--delta", bound.delta, "in-degree bound");
    cmd_bound->add_flag("--binary", bound.binary, "all variables binary");
    cmd_bound->add_option("--arity", bound.arity, "common alphabet size");
    cmd_bound->add_option("--dag", bound.dag, "DAG or network JSON");
    cmd_bound->add_option("--domain", bound.domain, "schema JSON giving the alphabets");
    cmd_bound->add_option("--lambda", bound.lambda, "probability cutoff");
    cmd_bound->add_option("--l", bound.l, "sample size");
    cmd_bound->add_option("--eta", bound.eta, "confidence parameter");
    cmd_bound->add_option("--out", bound.out, "report JSON");

    SampleArgs sample;
    auto* cmd_sample = app.add_subcommand("sample", "forward-sample a network to CSV");
    cmd_sample->add_option("--net", sample.net, "network JSON")->required();
    cmd_sample->add_option("--l", sample.l, "number of rows")->required()->check(CLI::PositiveNumber);
    cmd_sample->add_option("--seed", sample.seed, "random seed");
    cmd_sample->add_option("--out", sample.out, "output CSV")->required();

    EvalArgs eval;
    auto* cmd_eval = app.add_subcommand("eval", "risk, entropy and KL of a network");
    cmd_eval->add_option("--net", eval.net, "network JSON")->required();
    cmd_eval->add_option("--csv", eval.csv, "data for the empirical risk");
    cmd_eval->add_option("--schema", eval.schema, "schema JSON (default: the network's alphabets)");
    cmd_eval->add_option("--truth", eval.truth, "reference network JSON");
    cmd_eval->add_option("--out", eval.out, "report JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    try {
        if (*cmd_learn) {
            return run_learn(learn);
        }
        if (*cmd_bound) {
            return run_bound(bound);
        }
        if (*cmd_sample) {
            return run_sample(sample);
        }
        return run_eval(eval);
    } catch (const support_violation_error& e) {
        std::cerr << "error: " << e.what() << " (row " << e.row() << ")\n";
        return support;
    } catch (const infeasible_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return infeasible;
    } catch (const bnvc::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return usage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return internal;
    }
}
