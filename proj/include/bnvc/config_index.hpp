#ifndef bnvc_config_index_hpp
#define bnvc_config_index_hpp

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bnvc/error.hpp"

namespace bnvc {

// value code of a categorical variable, 0 .. m_j - 1
using Code = std::uint32_t;

namespace detail {

inline std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw overflow_error(std::string(what) + ": 64-bit overflow");
    }
    return r;
}

inline std::uint64_t checked_add(std::uint64_t a, std::uint64_t b, const char* what) {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(a, b, &r)) {
        throw overflow_error(std::string(what) + ": 64-bit overflow");
    }
    return r;
}

} // namespace detail

// Mixed-radix encoding of a tuple of codes. Digit 0 is the most significant,
// the last digit varies fastest. For CPT tables the digits are the parents in
// ascending index order followed by the child.
class ConfigIndex {
public:
    ConfigIndex() = default;

    explicit ConfigIndex(std::vector<std::size_t> radices) : radices_(std::move(radices)) {
        std::uint64_t total = 1;
        for (auto r : radices_) {
            if (r == 0) {
                throw parameter_error("ConfigIndex: zero radix");
            }
            total = detail::checked_mul(total, r, "ConfigIndex size");
        }
        size_ = static_cast<std::size_t>(total);
    }

    std::size_t size() const noexcept { return size_; }
    std::size_t digits() const noexcept { return radices_.size(); }
    const std::vector<std::size_t>& radices() const noexcept { return radices_; }

    std::size_t encode(std::span<const Code> tuple) const {
        if (tuple.size() != radices_.size()) {
            throw dimension_error("ConfigIndex::encode: tuple length mismatch");
        }
        std::size_t index = 0;
        for (std::size_t d = 0; d < radices_.size(); ++d) {
            if (tuple[d] >= radices_[d]) {
                throw invalid_assignment_error("ConfigIndex::encode: digit out of range");
            }
            index = index * radices_[d] + tuple[d];
        }
        return index;
    }

    std::vector<Code> decode(std::size_t index) const {
        if (index >= size_) {
            throw invalid_assignment_error("ConfigIndex::decode: index out of range");
        }
        std::vector<Code> tuple(radices_.size());
        for (std::size_t d = radices_.size(); d-- > 0;) {
            tuple[d] = static_cast<Code>(index % radices_[d]);
            index /= radices_[d];
        }
        return tuple;
    }

private:
    std::vector<std::size_t> radices_;
    std::size_t size_ = 1;
};

} // namespace bnvc

#endif // bnvc_config_index_hpp
