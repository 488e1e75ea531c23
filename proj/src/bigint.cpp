#include "xxz/bigint.hpp"

#include <algorithm>
#include <stdexcept>

namespace xxz {

BigUInt::BigUInt(std::uint64_t v) {
    if (v != 0) {
        limbs_.push_back(static_cast<std::uint32_t>(v & 0xFFFFFFFFu));
        if (v >> 32) limbs_.push_back(static_cast<std::uint32_t>(v >> 32));
    }
}

void BigUInt::trim() {
    while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
}

BigUInt& BigUInt::operator+=(const BigUInt& rhs) {
    const std::size_t n = std::max(limbs_.size(), rhs.limbs_.size());
    limbs_.resize(n, 0);
    std::uint64_t carry = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t s = carry + limbs_[i] + (i < rhs.limbs_.size() ? rhs.limbs_[i] : 0u);
        limbs_[i] = static_cast<std::uint32_t>(s & 0xFFFFFFFFu);
        carry = s >> 32;
    }
    if (carry) limbs_.push_back(static_cast<std::uint32_t>(carry));
    return *this;
}

BigUInt operator*(const BigUInt& lhs, const BigUInt& rhs) {
    BigUInt out;
    if (lhs.is_zero() || rhs.is_zero()) return out;
    out.limbs_.assign(lhs.limbs_.size() + rhs.limbs_.size(), 0);
    for (std::size_t i = 0; i < lhs.limbs_.size(); ++i) {
        std::uint64_t carry = 0;
        const std::uint64_t a = lhs.limbs_[i];
        for (std::size_t j = 0; j < rhs.limbs_.size(); ++j) {
            std::uint64_t cur = out.limbs_[i + j] + a * rhs.limbs_[j] + carry;
            out.limbs_[i + j] = static_cast<std::uint32_t>(cur & 0xFFFFFFFFu);
            carry = cur >> 32;
        }
        std::size_t k = i + rhs.limbs_.size();
        while (carry) {
            std::uint64_t cur = out.limbs_[k] + carry;
            out.limbs_[k] = static_cast<std::uint32_t>(cur & 0xFFFFFFFFu);
            carry = cur >> 32;
            ++k;
        }
    }
    out.trim();
    return out;
}

std::uint64_t BigUInt::to_uint64() const {
    if (limbs_.size() > 2) throw std::overflow_error("BigUInt does not fit in 64 bits");
    std::uint64_t v = 0;
    if (limbs_.size() > 1) v = static_cast<std::uint64_t>(limbs_[1]) << 32;
    if (!limbs_.empty()) v |= limbs_[0];
    return v;
}

std::string BigUInt::to_string() const {
    if (limbs_.empty()) return "0";
    // repeated division by 1e9
    std::vector<std::uint32_t> work(limbs_.rbegin(), limbs_.rend());  // big-endian
    std::string out;
    while (!work.empty()) {
        std::uint64_t rem = 0;
        std::vector<std::uint32_t> quot;
        quot.reserve(work.size());
        for (std::uint32_t limb : work) {
            std::uint64_t cur = (rem << 32) | limb;
            std::uint32_t q = static_cast<std::uint32_t>(cur / 1000000000u);
            rem = cur % 1000000000u;
            if (!(quot.empty() && q == 0)) quot.push_back(q);
        }
        std::string chunk = std::to_string(rem);
        if (!quot.empty()) chunk.insert(0, 9 - chunk.size(), '0');
        out.insert(0, chunk);
        work = std::move(quot);
    }
    return out;
}

}  // namespace xxz
