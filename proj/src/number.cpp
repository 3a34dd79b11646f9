#include "patmine/number.hpp"

namespace patmine
{

Rational Number::value() const
{
    if (infinite_)
        throw EvalError("infinite value where a finite number is required");
    return value_;
}

// Sign tests read the numerator: comparing boost::rational against a plain
// int recurses forever under C++20 rewritten comparison operators.

namespace
{

[[noreturn]] void undefined(const char* op)
{
    throw EvalError(std::string("undefined arithmetic on infinity (") + op + ")");
}

} // namespace

Number operator+(const Number& a, const Number& b)
{
    if (a.infinite_ || b.infinite_)
        return Number::infinity();
    Rational r = a.value_;
    r += b.value_;
    return Number(r);
}

Number operator-(const Number& a, const Number& b)
{
    if (b.infinite_)
        undefined("-");
    if (a.infinite_)
        return Number::infinity();
    Rational r = a.value_;
    r -= b.value_;
    return Number(r);
}

Number operator*(const Number& a, const Number& b)
{
    if (a.infinite_ || b.infinite_)
    {
        const Number& other = a.infinite_ ? b : a;
        if (!other.infinite_ && other.value_.numerator() <= 0)
            undefined("*");
        return Number::infinity();
    }
    Rational r = a.value_;
    r *= b.value_;
    return Number(r);
}

Number operator/(const Number& a, const Number& b)
{
    if (b.infinite_)
    {
        if (a.infinite_)
            undefined("/");
        return Number(0);
    }
    if (b.value_.numerator() == 0)
        throw EvalError("division by zero");
    if (a.infinite_)
    {
        if (b.value_.numerator() < 0)
            undefined("/");
        return Number::infinity();
    }
    Rational r = a.value_;
    r /= b.value_;
    return Number(r);
}

std::strong_ordering operator<=>(const Number& a, const Number& b) noexcept
{
    if (a.infinite_ || b.infinite_)
        return a.infinite_ <=> b.infinite_;
    if (a.value_ < b.value_)
        return std::strong_ordering::less;
    if (b.value_ < a.value_)
        return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

std::string to_string(const Rational& r)
{
    if (r.denominator() == 1)
        return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string to_string(const Number& n)
{
    return n.is_infinite() ? "inf" : to_string(n.value());
}

} // namespace patmine
