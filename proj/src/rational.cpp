#include "unsolv/rational.hpp"

#include <algorithm>

#include "unsolv/error.hpp"

namespace unsolv {

namespace {

using UInt128 = unsigned __int128;

constexpr Int128 kMax = static_cast<Int128>(~UInt128{0} >> 1);
constexpr Int128 kMin = -kMax - 1;

UInt128 magnitude(Int128 v) noexcept {
    return v < 0 ? UInt128(0) - static_cast<UInt128>(v) : static_cast<UInt128>(v);
}

UInt128 gcd(UInt128 a, UInt128 b) noexcept {
    while (b != 0) {
        UInt128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

Int128 checked_mul(Int128 a, Int128 b, const char* what) {
    Int128 out;
    if (__builtin_mul_overflow(a, b, &out)) throw Overflow(what);
    return out;
}

Int128 checked_add(Int128 a, Int128 b, const char* what) {
    Int128 out;
    if (__builtin_add_overflow(a, b, &out)) throw Overflow(what);
    return out;
}

Int128 checked_sub(Int128 a, Int128 b, const char* what) {
    Int128 out;
    if (__builtin_sub_overflow(a, b, &out)) throw Overflow(what);
    return out;
}

}  // namespace

char op_symbol(ArithOp op) noexcept {
    switch (op) {
        case ArithOp::Add: return '+';
        case ArithOp::Sub: return '-';
        case ArithOp::Mul: return '*';
        case ArithOp::Div: return '/';
    }
    return '?';
}

Rational::Rational(Int128 numerator, Int128 denominator) {
    if (denominator == 0) throw DivisionByZero();
    // kMin has no positive counterpart; refusing it keeps negation total.
    if (numerator == kMin || denominator == kMin) throw Overflow("rational construction");
    if (denominator < 0) {
        numerator = -numerator;
        denominator = -denominator;
    }
    if (numerator == 0) {
        num_ = 0;
        den_ = 1;
        return;
    }
    const auto g = static_cast<Int128>(gcd(magnitude(numerator), static_cast<UInt128>(denominator)));
    num_ = numerator / g;
    den_ = denominator / g;
}

Rational Rational::operator-() const {
    Rational r;
    r.num_ = -num_;
    r.den_ = den_;
    return r;
}

Rational operator+(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational(checked_add(a.num_, b.num_, "add"), a.den_);
    // Reduce by gcd of denominators first so intermediates stay small.
    const auto g = static_cast<Int128>(gcd(static_cast<UInt128>(a.den_), static_cast<UInt128>(b.den_)));
    const Int128 da = a.den_ / g;
    const Int128 db = b.den_ / g;
    const Int128 num = checked_add(checked_mul(a.num_, db, "add"), checked_mul(b.num_, da, "add"), "add");
    return Rational(num, checked_mul(a.den_, db, "add"));
}

Rational operator-(const Rational& a, const Rational& b) {
    if (a.den_ == b.den_) return Rational(checked_sub(a.num_, b.num_, "sub"), a.den_);
    const auto g = static_cast<Int128>(gcd(static_cast<UInt128>(a.den_), static_cast<UInt128>(b.den_)));
    const Int128 da = a.den_ / g;
    const Int128 db = b.den_ / g;
    const Int128 num = checked_sub(checked_mul(a.num_, db, "sub"), checked_mul(b.num_, da, "sub"), "sub");
    return Rational(num, checked_mul(a.den_, db, "sub"));
}

Rational operator*(const Rational& a, const Rational& b) {
    if (a.num_ == 0 || b.num_ == 0) return Rational();
    // Cross-cancel: gcd(a.num, b.den) and gcd(b.num, a.den).
    const auto g1 = static_cast<Int128>(gcd(magnitude(a.num_), static_cast<UInt128>(b.den_)));
    const auto g2 = static_cast<Int128>(gcd(magnitude(b.num_), static_cast<UInt128>(a.den_)));
    return Rational(checked_mul(a.num_ / g1, b.num_ / g2, "mul"), checked_mul(a.den_ / g2, b.den_ / g1, "mul"));
}

Rational operator/(const Rational& a, const Rational& b) {
    if (b.num_ == 0) throw DivisionByZero();
    Rational inv;
    inv.num_ = b.num_ < 0 ? -b.den_ : b.den_;
    inv.den_ = b.num_ < 0 ? -b.num_ : b.num_;
    return a * inv;
}

bool operator<(const Rational& a, const Rational& b) {
    return checked_mul(a.num_, b.den_, "compare") < checked_mul(b.num_, a.den_, "compare");
}

std::string Rational::to_string() const {
    if (den_ == 1) return int128_to_string(num_);
    return int128_to_string(num_) + "/" + int128_to_string(den_);
}

std::size_t Rational::hash() const noexcept {
    const auto mix = [](std::uint64_t x) {
        x ^= x >> 33;
        x *= 0xff51afd7ed558ccdULL;
        x ^= x >> 33;
        x *= 0xc4ceb9fe1a85ec53ULL;
        x ^= x >> 33;
        return x;
    };
    const auto n = static_cast<UInt128>(num_);
    const auto d = static_cast<UInt128>(den_);
    std::uint64_t h = mix(static_cast<std::uint64_t>(n) ^ 0x9e3779b97f4a7c15ULL);
    h = mix(h ^ static_cast<std::uint64_t>(n >> 64));
    h = mix(h ^ static_cast<std::uint64_t>(d));
    h = mix(h ^ static_cast<std::uint64_t>(d >> 64));
    return static_cast<std::size_t>(h);
}

Rational rational_apply(ArithOp op, const Rational& a, const Rational& b) {
    switch (op) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
        case ArithOp::Div: return a / b;
    }
    throw InvalidArgument("unknown arithmetic operator");
}

std::string int128_to_string(Int128 value) {
    if (value == 0) return "0";
    UInt128 mag = magnitude(value);
    std::string digits;
    while (mag != 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(mag % 10)));
        mag /= 10;
    }
    if (value < 0) digits.push_back('-');
    std::reverse(digits.begin(), digits.end());
    return digits;
}

}  // namespace unsolv
