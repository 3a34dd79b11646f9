#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <boost/container/small_vector.hpp>

namespace patmine
{

/// Fixed-length bit vector used for item sets and transaction covers.
///
/// Two words are stored inline, so sets over up to 128 items or transactions
/// never touch the heap; the solver's inner loop is mostly AND/OR/popcount on
/// these.
class Bitset
{
public:
    using Word = std::uint64_t;
    static constexpr std::size_t word_bits = 64;

    Bitset() = default;
    explicit Bitset(std::size_t size, bool value = false)
        : size_(size), words_((size + word_bits - 1) / word_bits, value ? ~Word{0} : Word{0})
    {
        trim();
    }

    static Bitset full(std::size_t size) { return Bitset(size, true); }

    std::size_t size() const noexcept { return size_; }

    bool test(std::size_t i) const noexcept { return (words_[i / word_bits] >> (i % word_bits)) & 1U; }
    void set(std::size_t i) noexcept { words_[i / word_bits] |= Word{1} << (i % word_bits); }
    void reset(std::size_t i) noexcept { words_[i / word_bits] &= ~(Word{1} << (i % word_bits)); }

    std::size_t count() const noexcept
    {
        std::size_t c = 0;
        for (auto w : words_)
            c += static_cast<std::size_t>(std::popcount(w));
        return c;
    }

    bool none() const noexcept
    {
        for (auto w : words_)
            if (w != 0)
                return false;
        return true;
    }
    bool any() const noexcept { return !none(); }
    bool all() const noexcept { return count() == size_; }

    bool is_subset_of(const Bitset& other) const noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~other.words_[i])
                return false;
        return true;
    }

    std::size_t intersection_count(const Bitset& other) const noexcept
    {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i)
            c += static_cast<std::size_t>(std::popcount(words_[i] & other.words_[i]));
        return c;
    }

    bool intersects(const Bitset& other) const noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & other.words_[i])
                return true;
        return false;
    }

    Bitset& operator&=(const Bitset& other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= other.words_[i];
        return *this;
    }
    Bitset& operator|=(const Bitset& other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] |= other.words_[i];
        return *this;
    }
    /// Set difference: clears every bit that is set in `other`.
    Bitset& subtract(const Bitset& other) noexcept
    {
        for (std::size_t i = 0; i < words_.size(); ++i)
            words_[i] &= ~other.words_[i];
        return *this;
    }

    friend Bitset operator&(Bitset a, const Bitset& b) noexcept { return a &= b; }
    friend Bitset operator|(Bitset a, const Bitset& b) noexcept { return a |= b; }
    friend Bitset difference(Bitset a, const Bitset& b) noexcept { return a.subtract(b); }

    friend bool operator==(const Bitset& a, const Bitset& b) noexcept
    {
        return a.size_ == b.size_ && a.words_ == b.words_;
    }

    /// Index of the first set bit at or after `from`, or size() if there is none.
    std::size_t find_next(std::size_t from) const noexcept
    {
        if (from >= size_)
            return size_;
        std::size_t wi = from / word_bits;
        Word w = words_[wi] & (~Word{0} << (from % word_bits));
        while (true)
        {
            if (w != 0)
                return wi * word_bits + static_cast<std::size_t>(std::countr_zero(w));
            if (++wi == words_.size())
                return size_;
            w = words_[wi];
        }
    }
    std::size_t find_first() const noexcept { return find_next(0); }

    template <typename F>
    void for_each(F&& f) const
    {
        for (std::size_t i = find_first(); i < size_; i = find_next(i + 1))
            f(i);
    }

    std::vector<std::uint32_t> indices() const
    {
        std::vector<std::uint32_t> out;
        for_each([&](std::size_t i) { out.push_back(static_cast<std::uint32_t>(i)); });
        return out;
    }

private:
    void trim() noexcept
    {
        if (size_ % word_bits != 0 && !words_.empty())
            words_.back() &= (Word{1} << (size_ % word_bits)) - 1;
    }

    std::size_t size_ = 0;
    boost::container::small_vector<Word, 2> words_;
};

} // namespace patmine
