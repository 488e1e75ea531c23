#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace xxz {

// Minimal arbitrary-precision unsigned integer: addition, multiplication and
// decimal output, which is all the configuration counting needs.
class BigUInt {
public:
    BigUInt() = default;
    BigUInt(std::uint64_t v);  // NOLINT(google-explicit-constructor)

    BigUInt& operator+=(const BigUInt& rhs);
    friend BigUInt operator+(BigUInt lhs, const BigUInt& rhs) { return lhs += rhs; }
    friend BigUInt operator*(const BigUInt& lhs, const BigUInt& rhs);

    bool operator==(const BigUInt& rhs) const { return limbs_ == rhs.limbs_; }
    bool operator!=(const BigUInt& rhs) const { return !(*this == rhs); }

    bool is_zero() const { return limbs_.empty(); }
    // Value as uint64 if it fits, otherwise throws.
    std::uint64_t to_uint64() const;
    bool fits_uint64() const { return limbs_.size() <= 2; }

    std::string to_string() const;

private:
    void trim();
    std::vector<std::uint32_t> limbs_;  // little-endian base 2^32
};

}  // namespace xxz
