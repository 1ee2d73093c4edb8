#include "rpgkit/fixed.hpp"

#include <cctype>
#include <cstdlib>

namespace rpgkit {

namespace {

using i128 = __int128;

int64_t saturate128(i128 v) {
    if (v > i128(INT64_MAX)) return INT64_MAX;
    if (v < i128(INT64_MIN)) return INT64_MIN;
    return int64_t(v);
}

// num/den rounded half-to-even; den > 0.
i128 div_round_half_even(i128 num, i128 den) {
    bool neg = num < 0;
    i128 n = neg ? -num : num;
    i128 q = n / den;
    i128 r = n % den;
    i128 twice = r * 2;
    if (twice > den || (twice == den && (q & 1))) ++q;
    return neg ? -q : q;
}

}  // namespace

int64_t Fixed::sat_add(int64_t a, int64_t b) {
    return saturate128(i128(a) + i128(b));
}

Fixed Fixed::operator*(Fixed o) const {
    i128 prod = i128(raw_) * i128(o.raw_);
    return from_raw(saturate128(div_round_half_even(prod, kScale)));
}

Fixed Fixed::operator/(Fixed o) const {
    if (o.raw_ == 0) throw EvalError("division by zero");
    i128 num = i128(raw_) * kScale;
    i128 den = o.raw_;
    if (den < 0) {
        num = -num;
        den = -den;
    }
    return from_raw(saturate128(div_round_half_even(num, den)));
}

std::optional<Fixed> Fixed::parse(std::string_view text) {
    size_t i = 0, n = text.size();
    while (i < n && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    size_t end = n;
    while (end > i && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    if (i >= end) return std::nullopt;

    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }

    i128 int_part = 0;
    size_t int_digits = 0;
    while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
        int_part = int_part * 10 + (text[i] - '0');
        if (int_part > i128(INT64_MAX)) return std::nullopt;  // out of range
        ++int_digits;
        ++i;
    }

    i128 frac_raw = 0;  // scaled by kScale
    size_t frac_digits = 0;
    if (i < end && text[i] == '.') {
        ++i;
        int64_t place = Fixed::kScale / 10;
        i128 tail = 0;       // digits beyond the 4th, for rounding
        i128 tail_unit = 0;  // value of one ulp at the cut, in tail units
        while (i < end && std::isdigit(static_cast<unsigned char>(text[i]))) {
            int d = text[i] - '0';
            if (place > 0) {
                frac_raw += i128(d) * place;
                place /= 10;
            } else {
                tail = tail * 10 + d;
                tail_unit = tail_unit == 0 ? 10 : tail_unit * 10;
            }
            ++frac_digits;
            ++i;
        }
        if (frac_digits == 0) return std::nullopt;  // "1." is not a number
        if (tail_unit > 0) {
            // round half-to-even at the 4th fractional digit
            i128 half = tail_unit / 2;
            if (tail > half || (tail == half && (frac_raw & 1))) ++frac_raw;
        }
    }
    if (int_digits == 0 && frac_digits == 0) return std::nullopt;
    if (i != end) return std::nullopt;  // trailing garbage

    i128 raw = int_part * Fixed::kScale + frac_raw;
    if (neg) raw = -raw;
    if (raw > i128(INT64_MAX) || raw < i128(INT64_MIN)) return std::nullopt;
    return from_raw(int64_t(raw));
}

std::string Fixed::to_string() const {
    int64_t v = raw_;
    bool neg = v < 0;
    // avoid overflow on INT64_MIN
    uint64_t u = neg ? (~uint64_t(v) + 1) : uint64_t(v);
    uint64_t ip = u / uint64_t(kScale);
    uint64_t fp = u % uint64_t(kScale);
    std::string out;
    if (neg) out.push_back('-');
    out += std::to_string(ip);
    if (fp != 0) {
        char buf[8];
        std::snprintf(buf, sizeof buf, "%04llu", static_cast<unsigned long long>(fp));
        std::string frac(buf);
        while (!frac.empty() && frac.back() == '0') frac.pop_back();
        out.push_back('.');
        out += frac;
    }
    return out;
}

}  // namespace rpgkit
