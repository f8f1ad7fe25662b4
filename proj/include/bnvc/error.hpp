#ifndef bnvc_error_hpp
#define bnvc_error_hpp

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bnvc {

// Base for every error raised by the library. Subclasses map onto the
// CLI exit-code families (see tools/bnvc.cpp).
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// bad argument values (ranges, NaN, inconsistent sizes)
class parameter_error : public error {
public:
    using error::error;
};

class dimension_error : public error {
public:
    using error::error;
};

class invalid_assignment_error : public error {
public:
    using error::error;
};

class cycle_error : public error {
public:
    cycle_error(const std::string& what, std::vector<std::size_t> cycle)
        : error(what), cycle_(std::move(cycle)) {}

    // node indices along one directed cycle, each a parent of the next
    const std::vector<std::size_t>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::size_t> cycle_;
};

// ingestion family: file unreadable, ragged rows, bad tokens, empty files
class ingestion_error : public error {
public:
    using error::error;
};

class format_error : public ingestion_error {
public:
    using ingestion_error::ingestion_error;
};

class schema_violation_error : public ingestion_error {
public:
    schema_violation_error(const std::string& what, std::size_t line, std::string column)
        : ingestion_error(what), line_(line), column_(std::move(column)) {}

    std::size_t line() const noexcept { return line_; }
    const std::string& column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::string column_;
};

class degenerate_alphabet_error : public ingestion_error {
public:
    using ingestion_error::ingestion_error;
};

class empty_dataset_error : public ingestion_error {
public:
    using ingestion_error::ingestion_error;
};

// a network failed validate()
class validation_error : public error {
public:
    using error::error;
};

// floor epsilon too large for an alphabet: epsilon * m > 1
class infeasible_error : public error {
public:
    using error::error;
};

// an observed row has probability zero under the evaluated network
class support_violation_error : public error {
public:
    support_violation_error(const std::string& what, std::size_t row)
        : error(what), row_(row) {}

    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

class overflow_error : public error {
public:
    using error::error;
};

// exact enumeration or exhaustive search refused because of size
class size_limit_error : public error {
public:
    using error::error;
};

} // namespace bnvc

#endif // bnvc_error_hpp
