#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rpgkit {

// Division by zero inside expression evaluation.
struct EvalError : std::runtime_error {
    explicit EvalError(const std::string& what) : std::runtime_error(what) {}
};

// Signed fixed-point decimal with 4 fractional digits, backed by int64.
// Game state needs exact, hashable values: two states are equal iff their
// raw vectors are equal, so no floats anywhere in the state path.
//
// Addition/subtraction/multiplication saturate at the int64 range;
// multiplication and division round half-to-even to 4 digits. Division by
// zero throws EvalError.
class Fixed {
public:
    static constexpr int64_t kScale = 10000;  // 4 fractional digits

    constexpr Fixed() = default;

    static constexpr Fixed from_raw(int64_t raw) {
        Fixed f;
        f.raw_ = raw;
        return f;
    }
    static constexpr Fixed from_int(int64_t v) { return from_raw(v * kScale); }

    // Accepts optionally signed decimal text, e.g. "-3", "0.5", "12.3456".
    // More than 4 fractional digits are rounded half-to-even. Rejects
    // exponents, hex, and anything that is not a plain decimal.
    static std::optional<Fixed> parse(std::string_view text);

    constexpr int64_t raw() const { return raw_; }
    constexpr bool truthy() const { return raw_ != 0; }

    // Canonical form: minimal digits, no trailing fractional zeros ("1",
    // "-0.5", "2.25"). parse(to_string(x)) == x.
    std::string to_string() const;

    Fixed operator+(Fixed o) const { return from_raw(sat_add(raw_, o.raw_)); }
    Fixed operator-(Fixed o) const { return from_raw(sat_add(raw_, -o.raw_)); }
    Fixed operator-() const { return from_raw(raw_ == INT64_MIN ? INT64_MAX : -raw_); }
    Fixed operator*(Fixed o) const;
    Fixed operator/(Fixed o) const;  // throws EvalError on zero divisor

    friend constexpr bool operator==(Fixed a, Fixed b) { return a.raw_ == b.raw_; }
    friend constexpr bool operator!=(Fixed a, Fixed b) { return a.raw_ != b.raw_; }
    friend constexpr bool operator<(Fixed a, Fixed b) { return a.raw_ < b.raw_; }
    friend constexpr bool operator<=(Fixed a, Fixed b) { return a.raw_ <= b.raw_; }
    friend constexpr bool operator>(Fixed a, Fixed b) { return a.raw_ > b.raw_; }
    friend constexpr bool operator>=(Fixed a, Fixed b) { return a.raw_ >= b.raw_; }

    Fixed clamped(Fixed lo, Fixed hi) const {
        if (raw_ < lo.raw_) return lo;
        if (raw_ > hi.raw_) return hi;
        return *this;
    }

    double to_double() const { return double(raw_) / double(kScale); }

private:
    static int64_t sat_add(int64_t a, int64_t b);
    int64_t raw_ = 0;
};

}  // namespace rpgkit
