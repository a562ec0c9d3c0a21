#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

namespace fibra {

// Sign-magnitude arbitrary-precision integer. Counting values grow like
// powers of the golden ratio, so 64 bits run out quickly; we only ever need
// add, subtract, multiply and compare.
class BigInt {
public:
    BigInt() = default;
    BigInt(long long v) { // NOLINT: implicit on purpose
        if (v < 0) { neg_ = true; v = -v; }
        while (v) { limbs_.push_back(static_cast<uint32_t>(v & 0xffffffffu)); v >>= 32; }
    }

    bool is_zero() const { return limbs_.empty(); }
    bool negative() const { return neg_; }

    friend BigInt operator+(const BigInt& a, const BigInt& b) {
        if (a.neg_ == b.neg_) { BigInt r; r.limbs_ = add_mag(a.limbs_, b.limbs_); r.neg_ = a.neg_; r.norm(); return r; }
        int c = cmp_mag(a.limbs_, b.limbs_);
        BigInt r;
        if (c == 0) return r;
        if (c > 0) { r.limbs_ = sub_mag(a.limbs_, b.limbs_); r.neg_ = a.neg_; }
        else       { r.limbs_ = sub_mag(b.limbs_, a.limbs_); r.neg_ = b.neg_; }
        r.norm();
        return r;
    }
    friend BigInt operator-(const BigInt& a, const BigInt& b) { BigInt nb = b; nb.neg_ = !nb.neg_; return a + nb; }
    friend BigInt operator*(const BigInt& a, const BigInt& b) {
        BigInt r;
        if (a.is_zero() || b.is_zero()) return r;
        r.limbs_.assign(a.limbs_.size() + b.limbs_.size(), 0);
        for (size_t i = 0; i < a.limbs_.size(); ++i) {
            uint64_t carry = 0;
            for (size_t j = 0; j < b.limbs_.size(); ++j) {
                uint64_t cur = static_cast<uint64_t>(a.limbs_[i]) * b.limbs_[j] + r.limbs_[i + j] + carry;
                r.limbs_[i + j] = static_cast<uint32_t>(cur);
                carry = cur >> 32;
            }
            r.limbs_[i + b.limbs_.size()] = static_cast<uint32_t>(carry);
        }
        r.neg_ = a.neg_ != b.neg_;
        r.norm();
        return r;
    }
    BigInt& operator+=(const BigInt& o) { *this = *this + o; return *this; }
    BigInt& operator-=(const BigInt& o) { *this = *this - o; return *this; }
    BigInt& operator*=(const BigInt& o) { *this = *this * o; return *this; }

    friend bool operator==(const BigInt& a, const BigInt& b) { return a.neg_ == b.neg_ && a.limbs_ == b.limbs_; }
    friend bool operator!=(const BigInt& a, const BigInt& b) { return !(a == b); }
    friend bool operator<(const BigInt& a, const BigInt& b) {
        if (a.neg_ != b.neg_) return a.neg_;
        int c = cmp_mag(a.limbs_, b.limbs_);
        return a.neg_ ? c > 0 : c < 0;
    }
    friend bool operator<=(const BigInt& a, const BigInt& b) { return a < b || a == b; }
    friend bool operator>(const BigInt& a, const BigInt& b) { return b < a; }
    friend bool operator>=(const BigInt& a, const BigInt& b) { return b <= a; }

    // Value if it fits in long long, otherwise nullopt-ish via bool return.
    bool fits_ll(long long& out) const {
        if (limbs_.size() > 2) return false;
        unsigned long long v = 0;
        for (size_t i = limbs_.size(); i-- > 0;) v = (v << 32) | limbs_[i];
        if (v > 0x7fffffffffffffffull) return false;
        out = neg_ ? -static_cast<long long>(v) : static_cast<long long>(v);
        return true;
    }

    std::string to_string() const {
        if (is_zero()) return "0";
        std::vector<uint32_t> m = limbs_;
        std::string digits;
        while (!m.empty()) {
            uint64_t rem = 0;
            for (size_t i = m.size(); i-- > 0;) {
                uint64_t cur = (rem << 32) | m[i];
                m[i] = static_cast<uint32_t>(cur / 1000000000u);
                rem = cur % 1000000000u;
            }
            while (!m.empty() && m.back() == 0) m.pop_back();
            for (int k = 0; k < 9; ++k) { digits.push_back(static_cast<char>('0' + rem % 10)); rem /= 10; }
        }
        while (digits.size() > 1 && digits.back() == '0') digits.pop_back();
        std::string out;
        if (neg_) out.push_back('-');
        out.append(digits.rbegin(), digits.rend());
        return out;
    }

    size_t hash() const {
        size_t h = neg_ ? 0x9e3779b97f4a7c15ull : 0;
        for (uint32_t l : limbs_) h = h * 1000003u + l;
        return h;
    }

private:
    void norm() {
        while (!limbs_.empty() && limbs_.back() == 0) limbs_.pop_back();
        if (limbs_.empty()) neg_ = false;
    }
    static int cmp_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
        for (size_t i = a.size(); i-- > 0;)
            if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
        return 0;
    }
    static std::vector<uint32_t> add_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r;
        r.reserve(std::max(a.size(), b.size()) + 1);
        uint64_t carry = 0;
        for (size_t i = 0; i < a.size() || i < b.size(); ++i) {
            uint64_t cur = carry;
            if (i < a.size()) cur += a[i];
            if (i < b.size()) cur += b[i];
            r.push_back(static_cast<uint32_t>(cur));
            carry = cur >> 32;
        }
        if (carry) r.push_back(static_cast<uint32_t>(carry));
        return r;
    }
    // requires |a| >= |b|
    static std::vector<uint32_t> sub_mag(const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
        std::vector<uint32_t> r = a;
        int64_t borrow = 0;
        for (size_t i = 0; i < r.size(); ++i) {
            int64_t cur = static_cast<int64_t>(r[i]) - borrow - (i < b.size() ? b[i] : 0);
            borrow = cur < 0;
            if (cur < 0) cur += (1ll << 32);
            r[i] = static_cast<uint32_t>(cur);
        }
        return r;
    }

    std::vector<uint32_t> limbs_; // little endian, no trailing zeros
    bool neg_ = false;
};

} // namespace fibra
