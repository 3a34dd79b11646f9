#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <boost/rational.hpp>

namespace patmine
{

using Rational = boost::rational<std::int64_t>;

class EvalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Exact rational, or +infinity (only produced by a growth rate with a zero
/// denominator).
class Number
{
public:
    Number() = default;
    Number(Rational v) : value_(v) {}
    Number(std::int64_t v) : value_(v) {}

    static Number infinity()
    {
        Number n;
        n.infinite_ = true;
        return n;
    }

    bool is_infinite() const noexcept { return infinite_; }
    /// Throws EvalError when infinite.
    Rational value() const;

    friend Number operator+(const Number& a, const Number& b);
    friend Number operator-(const Number& a, const Number& b);
    friend Number operator*(const Number& a, const Number& b);
    /// Throws EvalError on division by zero.
    friend Number operator/(const Number& a, const Number& b);

    friend bool operator==(const Number& a, const Number& b) noexcept
    {
        return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
    }
    friend std::strong_ordering operator<=>(const Number& a, const Number& b) noexcept;

private:
    Rational value_{0};
    bool infinite_ = false;
};

/// "3", "-1/2", "inf"
std::string to_string(const Number& n);
std::string to_string(const Rational& r);

} // namespace patmine
