#ifndef bnvc_dataset_hpp
#define bnvc_dataset_hpp

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bnvc/error.hpp"
#include "bnvc/model.hpp"
#include "bnvc/random.hpp"

namespace bnvc {

// l rows of n value codes over a CategoricalDomain, stored row-major.
class Dataset {
public:
    Dataset(CategoricalDomain domain, std::vector<Code> flat_rows)
        : domain_(std::move(domain)), codes_(std::move(flat_rows)) {
        const std::size_t n = domain_.n();
        if (codes_.size() % n != 0) {
            throw dimension_error("Dataset: flat row buffer is not a multiple of n");
        }
        if (codes_.empty()) {
            throw empty_dataset_error("Dataset: no rows");
        }
        const auto sizes = domain_.sizes();
        for (std::size_t k = 0; k < codes_.size(); ++k) {
            if (codes_[k] >= sizes[k % n]) {
                throw invalid_assignment_error("Dataset: code out of range at row " + std::to_string(k / n) +
                                               ", column " + domain_.name(k % n));
            }
        }
    }

    Dataset(CategoricalDomain domain, const std::vector<std::vector<Code>>& rows)
        : Dataset(std::move(domain), flatten(rows)) {}

    const CategoricalDomain& domain() const noexcept { return domain_; }
    std::size_t n() const noexcept { return domain_.n(); }
    std::size_t size() const noexcept { return codes_.size() / domain_.n(); }

    std::span<const Code> row(std::size_t i) const {
        return std::span<const Code>(codes_).subspan(i * n(), n());
    }

    const std::vector<Code>& flat() const noexcept { return codes_; }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    static std::vector<Code> flatten(const std::vector<std::vector<Code>>& rows) {
        std::vector<Code> flat;
        for (const auto& r : rows) {
            if (!rows.empty() && r.size() != rows.front().size()) {
                throw dimension_error("Dataset: ragged rows");
            }
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return flat;
    }

    CategoricalDomain domain_;
    std::vector<Code> codes_;
};

// Sufficient statistics c(x_j, w) of one node, laid out like its Cpt.
struct CountTable {
    std::size_t node = 0;
    std::vector<std::size_t> parents;
    std::size_t child_size = 0;
    std::size_t parent_config_count = 1;
    std::vector<std::int64_t> counts;

    std::span<const std::int64_t> row(std::size_t parent_config) const {
        return std::span<const std::int64_t>(counts).subspan(parent_config * child_size, child_size);
    }

    std::int64_t total() const {
        std::int64_t t = 0;
        for (auto c : counts) {
            t += c;
        }
        return t;
    }

    std::int64_t row_total(std::size_t parent_config) const {
        std::int64_t t = 0;
        for (auto c : row(parent_config)) {
            t += c;
        }
        return t;
    }
};

inline CountTable node_counts(const Dataset& data, std::size_t node, std::vector<std::size_t> parents) {
    const auto& domain = data.domain();
    CountTable table;
    table.node = node;
    table.child_size = domain.size(node);
    std::uint64_t rows = 1;
    for (auto p : parents) {
        rows = detail::checked_mul(rows, domain.size(p), "parent configuration count");
    }
    table.parent_config_count = static_cast<std::size_t>(rows);
    table.parents = std::move(parents);
    table.counts.assign(table.parent_config_count * table.child_size, 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto x = data.row(i);
        ++table.counts[parent_config_of(domain, table.parents, x) * table.child_size + x[node]];
    }
    return table;
}

inline std::vector<CountTable> empirical_counts(const Dataset& data, const Dag& dag) {
    if (dag.n() != data.n()) {
        throw dimension_error("empirical_counts: dag has " + std::to_string(dag.n()) + " nodes, data has " +
                              std::to_string(data.n()) + " columns");
    }
    std::vector<CountTable> out;
    out.reserve(dag.n());
    for (std::size_t j = 0; j < dag.n(); ++j) {
        out.push_back(node_counts(data, j, dag.parents(j)));
    }
    return out;
}

// Ordered map variable name -> alphabet; the declared order of each
// alphabet fixes the value codes.
using Schema = std::vector<std::pair<std::string, std::vector<std::string>>>;

namespace detail {

inline std::vector<std::string> split_commas(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        auto comma = line.find(',', start);
        cells.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return cells;
}

} // namespace detail

// CSV dialect: comma separated, no quoting, first non-comment line is the
// header, lines starting with '#' and blank lines are skipped.
inline Dataset read_csv(std::istream& in, const std::optional<Schema>& schema = std::nullopt) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> line_of_row;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        auto row = detail::split_commas(line);
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (row[c].empty()) {
                throw format_error("line " + std::to_string(line_no) + ": empty cell in column " +
                                   std::to_string(c + 1));
            }
        }
        if (header.empty()) {
            header = std::move(row);
            continue;
        }
        if (row.size() != header.size()) {
            throw format_error("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                               " cells, found " + std::to_string(row.size()));
        }
        cells.push_back(std::move(row));
        line_of_row.push_back(line_no);
    }
    if (header.empty()) {
        throw format_error("csv: missing header line");
    }
    if (cells.empty()) {
        throw empty_dataset_error("csv: header present but no data rows");
    }

    const std::size_t n = header.size();
    std::vector<std::vector<std::string>> alphabets(n);
    if (schema) {
        for (std::size_t j = 0; j < n; ++j) {
            auto it = std::find_if(schema->begin(), schema->end(),
                                   [&](const auto& entry) { return entry.first == header[j]; });
            if (it == schema->end()) {
                throw schema_violation_error("schema has no entry for column '" + header[j] + "'", 1, header[j]);
            }
            alphabets[j] = it->second;
        }
    } else {
        for (std::size_t j = 0; j < n; ++j) {
            std::set<std::string> distinct;
            for (const auto& row : cells) {
                distinct.insert(row[j]);
            }
            if (distinct.size() < 2) {
                throw degenerate_alphabet_error("column '" + header[j] +
                                                "' has a single distinct value; supply a schema");
            }
            alphabets[j].assign(distinct.begin(), distinct.end());
        }
    }

    CategoricalDomain domain(header, alphabets);
    std::vector<std::map<std::string, Code>> lookup(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t v = 0; v < alphabets[j].size(); ++v) {
            lookup[j].emplace(alphabets[j][v], static_cast<Code>(v));
        }
    }

    std::vector<Code> flat;
    flat.reserve(cells.size() * n);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            auto it = lookup[j].find(cells[i][j]);
            if (it == lookup[j].end()) {
                throw schema_violation_error("line " + std::to_string(line_of_row[i]) + ", column '" + header[j] +
                                                 "': token '" + cells[i][j] + "' not in declared alphabet",
                                             line_of_row[i], header[j]);
            }
            flat.push_back(it->second);
        }
    }
    return Dataset(std::move(domain), std::move(flat));
}

inline Dataset load_csv(const std::string& path, const std::optional<Schema>& schema = std::nullopt) {
    std::ifstream in(path);
    if (!in) {
        throw ingestion_error("cannot open '" + path + "'");
    }
    return read_csv(in, schema);
}

inline void write_csv(std::ostream& out, const Dataset& data) {
    const auto& domain = data.domain();
    for (std::size_t j = 0; j < domain.n(); ++j) {
        out << (j ? "," : "") << domain.name(j);
    }
    out << '\n';
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto x = data.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) {
            out << (j ? "," : "") << domain.alphabet(j)[x[j]];
        }
        out << '\n';
    }
}

inline Schema schema_of(const CategoricalDomain& domain) {
    Schema s;
    for (std::size_t j = 0; j < domain.n(); ++j) {
        s.emplace_back(domain.name(j), domain.alphabet(j));
    }
    return s;
}

// Draws l rows i.i.d. from the network. Nodes are visited in topological
// order and each consumes exactly one uniform variate, taken from the
// counter (row * n + node) of a counter-based stream; the child value is the
// inverse CDF of its CPT row at that variate.
inline Dataset forward_sample(const BayesNet& net, std::size_t l, std::uint64_t seed) {
    require_valid(net);
    if (l == 0) {
        throw parameter_error("forward_sample: need at least one row");
    }
    const auto& domain = net.domain();
    const std::size_t n = net.n();
    const auto& order = net.dag().topological_order();

    // cumulative distribution per (node, context)
    std::vector<std::vector<double>> cdf(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& cpt = net.cpt(j);
        cdf[j].resize(cpt.log_table().size());
        for (std::size_t w = 0; w < cpt.parent_config_count(); ++w) {
            double acc = 0.0;
            auto row = cpt.log_row(w);
            for (std::size_t v = 0; v < row.size(); ++v) {
                acc += std::exp(row[v]);
                cdf[j][w * row.size() + v] = acc;
            }
        }
    }

    const CounterRng rng(seed);
    std::vector<Code> flat(l * n);
    for (std::size_t i = 0; i < l; ++i) {
        std::span<Code> x(flat.data() + i * n, n);
        for (auto j : order) {
            const std::size_t m = domain.size(j);
            const std::size_t w = parent_config_of(domain, net.dag().parents(j), x);
            const double* row = cdf[j].data() + w * m;
            // scale by the row total so rounding in the last bin cannot overshoot
            const double u = rng.uniform(static_cast<std::uint64_t>(i) * n + j) * row[m - 1];
            std::size_t v = 0;
            while (v + 1 < m && !(u < row[v])) {
                ++v;
            }
            x[j] = static_cast<Code>(v);
        }
    }
    return Dataset(domain, std::move(flat));
}

} // namespace bnvc

#endif // bnvc_dataset_hpp
