#pragma once

#include <cstdint>
#include <ostream>

namespace dcdrtls {

/// Arithmetic operation tally. Comparisons, sign tests and shift-add scalings
/// are booked as additions.
struct OpCounts {
    std::uint64_t mul = 0;
    std::uint64_t add = 0;
    std::uint64_t div = 0;
    std::uint64_t sqrt = 0;

    OpCounts& operator+=(const OpCounts& o) {
        mul += o.mul;
        add += o.add;
        div += o.div;
        sqrt += o.sqrt;
        return *this;
    }
    friend OpCounts operator+(OpCounts a, const OpCounts& b) { return a += b; }
    friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const OpCounts& c) {
    return os << "{mul=" << c.mul << ", add=" << c.add << ", div=" << c.div << ", sqrt=" << c.sqrt << "}";
}

}  // namespace dcdrtls
