#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "patmine/bitset.hpp"

namespace patmine
{

using ItemId = std::uint32_t;
using CoverSet = Bitset;

class DatasetError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

struct Item
{
    ItemId index;
    std::string label;
};

/// A non-empty set of items, kept as a strictly increasing index sequence.
/// The defaulted ordering is the lexicographic order used by `canonical`:
/// element-wise, with a strict prefix ordered first.
class Pattern
{
public:
    Pattern() = default;
    explicit Pattern(std::vector<ItemId> items);
    static Pattern from_bits(const Bitset& items);

    const std::vector<ItemId>& items() const noexcept { return items_; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    bool contains(ItemId i) const noexcept;
    Bitset to_bits(std::size_t n_items) const;

    auto operator<=>(const Pattern&) const = default;
    bool operator==(const Pattern&) const = default;

private:
    std::vector<ItemId> items_;
};

/// Immutable transaction database with a vertical index (one cover bit-vector
/// per item).
class Dataset
{
public:
    Dataset(std::string name,
            std::vector<std::string> labels,
            std::vector<std::vector<ItemId>> transactions,
            std::map<std::string, std::vector<std::size_t>> partitions = {});

    const std::string& name() const noexcept { return name_; }
    std::size_t n_items() const noexcept { return items_.size(); }
    std::size_t n_transactions() const noexcept { return rows_.size(); }

    const std::vector<Item>& items() const noexcept { return items_; }
    const std::string& label(ItemId i) const { return items_.at(i).label; }
    std::optional<ItemId> find_item(std::string_view label) const;

    /// Items of transaction t as a bit-vector over items.
    const Bitset& transaction(std::size_t t) const { return rows_.at(t); }
    const CoverSet& item_cover(ItemId i) const { return item_covers_.at(i); }

    const std::map<std::string, Bitset>& partitions() const noexcept { return partitions_; }
    bool has_partition(const std::string& name) const { return partitions_.contains(name); }
    /// Throws DatasetError for an unknown name.
    const Bitset& partition(const std::string& name) const;

    Bitset all_items() const { return Bitset::full(n_items()); }
    Bitset all_transactions() const { return Bitset::full(n_transactions()); }

    /// Throws DatasetError naming the first unknown label.
    Pattern pattern(const std::vector<std::string>& labels) const;
    std::vector<std::string> labels(const Pattern& p) const;
    /// "{A, F}"
    std::string format(const Pattern& p) const;
    std::string format(const Bitset& items) const;

private:
    std::string name_;
    std::vector<Item> items_;
    std::unordered_map<std::string, ItemId> by_label_;
    std::vector<Bitset> rows_;
    std::vector<CoverSet> item_covers_;
    std::map<std::string, Bitset> partitions_;
};

/// Item order: integer tokens sort numerically, labels keep first-appearance
/// order. A leading `# items: A B C` comment declares the order explicitly.
Dataset parse_fimi(std::istream& in, std::string name);
Dataset parse_labeled(std::istream& in, std::string name, const std::string& class_column);
Dataset load_fimi(const std::filesystem::path& path);
Dataset load_labeled(const std::filesystem::path& path, const std::string& class_column);

/// Writes one line per transaction; partitions, if any, are written as a
/// trailing `<class_column>=<value>` token.
void write_fimi(const Dataset& d, std::ostream& out, const std::string& class_column = "class");

/// Transactions containing every item of `items`; the empty set covers all.
CoverSet cover(const Dataset& d, const Bitset& items);
CoverSet cover(const Dataset& d, const Pattern& x);

std::size_t freq(const Dataset& d, const Pattern& x, const std::optional<std::string>& part = std::nullopt);

/// Intersection of the transactions covering `items`; all items when the
/// cover is empty.
Bitset closure(const Dataset& d, const Bitset& items);
Pattern closure(const Dataset& d, const Pattern& x);
bool is_closed(const Dataset& d, const Pattern& x);

} // namespace patmine
