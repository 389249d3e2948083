#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>

namespace unsolv {

using Int128 = __int128;

enum class ArithOp : std::uint8_t { Add, Sub, Mul, Div };

char op_symbol(ArithOp op) noexcept;

/// Exact fraction backed by 128-bit integers.
///
/// Always normalized: the denominator is positive, gcd(|num|, den) == 1 and
/// zero is 0/1. Every operation that would leave the representable range
/// throws Overflow rather than wrapping.
class Rational {
public:
    constexpr Rational() noexcept = default;
    constexpr Rational(std::int64_t value) noexcept : num_(value), den_(1) {}  // NOLINT(implicit)
    Rational(Int128 numerator, Int128 denominator);

    Int128 numerator() const noexcept { return num_; }
    Int128 denominator() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_ == 0; }
    bool is_integer() const noexcept { return den_ == 1; }

    Rational operator-() const;

    friend Rational operator+(const Rational& a, const Rational& b);
    friend Rational operator-(const Rational& a, const Rational& b);
    friend Rational operator*(const Rational& a, const Rational& b);
    friend Rational operator/(const Rational& a, const Rational& b);

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend bool operator<(const Rational& a, const Rational& b);

    /// "n" for integers, "n/d" otherwise.
    std::string to_string() const;

    std::size_t hash() const noexcept;

private:
    Int128 num_ = 0;
    Int128 den_ = 1;
};

/// Applies `op` exactly; throws DivisionByZero for Div by zero and Overflow on range exhaustion.
Rational rational_apply(ArithOp op, const Rational& a, const Rational& b);

std::string int128_to_string(Int128 value);

}  // namespace unsolv

template <>
struct std::hash<unsolv::Rational> {
    std::size_t operator()(const unsolv::Rational& r) const noexcept { return r.hash(); }
};
