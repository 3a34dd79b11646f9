#include "patmine/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace patmine
{

Pattern::Pattern(std::vector<ItemId> items) : items_(std::move(items))
{
    if (items_.empty())
        throw std::invalid_argument("pattern must contain at least one item");
    for (std::size_t i = 1; i < items_.size(); ++i)
        if (items_[i - 1] >= items_[i])
            throw std::invalid_argument("pattern items must be strictly increasing");
}

Pattern Pattern::from_bits(const Bitset& items)
{
    return Pattern(items.indices());
}

bool Pattern::contains(ItemId i) const noexcept
{
    return std::binary_search(items_.begin(), items_.end(), i);
}

Bitset Pattern::to_bits(std::size_t n_items) const
{
    Bitset b(n_items);
    for (auto i : items_)
        b.set(i);
    return b;
}

Dataset::Dataset(std::string name,
                 std::vector<std::string> labels,
                 std::vector<std::vector<ItemId>> transactions,
                 std::map<std::string, std::vector<std::size_t>> partitions)
    : name_(std::move(name))
{
    if (transactions.empty())
        throw DatasetError("dataset has no transactions");

    items_.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
    {
        if (!by_label_.emplace(labels[i], static_cast<ItemId>(i)).second)
            throw DatasetError("duplicate item label '" + labels[i] + "'");
        items_.push_back({static_cast<ItemId>(i), std::move(labels[i])});
    }

    const std::size_t n = items_.size();
    const std::size_t m = transactions.size();
    item_covers_.assign(n, Bitset(m));
    rows_.reserve(m);
    for (std::size_t t = 0; t < m; ++t)
    {
        Bitset row(n);
        for (auto i : transactions[t])
        {
            if (i >= n)
                throw DatasetError("transaction " + std::to_string(t) + " references unknown item index");
            row.set(i);
            item_covers_[i].set(t);
        }
        if (row.none())
            throw DatasetError("transaction " + std::to_string(t) + " is empty");
        rows_.push_back(std::move(row));
    }

    Bitset seen(m);
    for (auto& [part, rows] : partitions)
    {
        Bitset bits(m);
        for (auto t : rows)
        {
            if (t >= m)
                throw DatasetError("partition '" + part + "' references transaction " + std::to_string(t));
            if (seen.test(t))
                throw DatasetError("partitions overlap at transaction " + std::to_string(t));
            seen.set(t);
            bits.set(t);
        }
        partitions_.emplace(part, std::move(bits));
    }
}

std::optional<ItemId> Dataset::find_item(std::string_view label) const
{
    auto it = by_label_.find(std::string(label));
    if (it == by_label_.end())
        return std::nullopt;
    return it->second;
}

const Bitset& Dataset::partition(const std::string& name) const
{
    auto it = partitions_.find(name);
    if (it == partitions_.end())
        throw DatasetError("unknown partition '" + name + "'");
    return it->second;
}

Pattern Dataset::pattern(const std::vector<std::string>& labels) const
{
    std::vector<ItemId> ids;
    for (const auto& l : labels)
    {
        auto id = find_item(l);
        if (!id)
            throw DatasetError("unknown item " + l);
        ids.push_back(*id);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return Pattern(std::move(ids));
}

std::vector<std::string> Dataset::labels(const Pattern& p) const
{
    std::vector<std::string> out;
    out.reserve(p.size());
    for (auto i : p.items())
        out.push_back(label(i));
    return out;
}

std::string Dataset::format(const Pattern& p) const
{
    return format(p.to_bits(n_items()));
}

std::string Dataset::format(const Bitset& items) const
{
    std::string s = "{";
    bool first = true;
    items.for_each([&](std::size_t i) {
        if (!first)
            s += ", ";
        s += items_[i].label;
        first = false;
    });
    return s + "}";
}

namespace
{

struct RawLine
{
    std::size_t line_no;
    std::vector<std::string> tokens;
};

struct RawFile
{
    std::vector<RawLine> lines;
    /// labels listed by a `# items: A B C` header, in declared order
    std::vector<std::string> declared;
};

RawFile read_lines(std::istream& in)
{
    RawFile file;
    auto& out = file.lines;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line))
    {
        ++line_no;
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        if (line[first] == '#')
        {
            std::string_view rest(line);
            rest.remove_prefix(first + 1);
            while (!rest.empty() && (rest.front() == ' ' || rest.front() == '\t'))
                rest.remove_prefix(1);
            if (out.empty() && rest.starts_with("items:"))
            {
                std::istringstream ss{std::string(rest.substr(6))};
                std::string tok;
                while (ss >> tok)
                    file.declared.push_back(tok);
            }
            continue;
        }
        std::istringstream ss(line);
        RawLine raw{line_no, {}};
        std::string tok;
        while (ss >> tok)
            raw.tokens.push_back(tok);
        out.push_back(std::move(raw));
    }
    return file;
}

bool is_integer(const std::string& s)
{
    long long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    return ec == std::errc{} && p == s.data() + s.size();
}

Dataset build(RawFile file, std::string name, std::map<std::string, std::vector<std::size_t>> partitions)
{
    auto& lines = file.lines;
    if (lines.empty())
        throw DatasetError("dataset has no transactions");

    bool numeric = file.declared.empty();
    for (const auto& l : lines)
    {
        if (l.tokens.empty())
            throw DatasetError("line " + std::to_string(l.line_no) + ": transaction has no items");
        for (const auto& t : l.tokens)
            numeric = numeric && is_integer(t);
    }

    std::vector<std::string> labels;
    std::unordered_map<std::string, ItemId> ids;
    if (numeric)
    {
        std::vector<long long> values;
        for (const auto& l : lines)
            for (const auto& t : l.tokens)
                values.push_back(std::stoll(t));
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (auto v : values)
        {
            ids.emplace(std::to_string(v), static_cast<ItemId>(labels.size()));
            labels.push_back(std::to_string(v));
        }
    }
    else
    {
        for (const auto& t : file.declared)
            if (ids.emplace(t, static_cast<ItemId>(labels.size())).second)
                labels.push_back(t);
        for (const auto& l : lines)
            for (const auto& t : l.tokens)
                if (ids.emplace(t, static_cast<ItemId>(labels.size())).second)
                    labels.push_back(t);
    }

    std::vector<std::vector<ItemId>> rows;
    rows.reserve(lines.size());
    for (const auto& l : lines)
    {
        std::vector<ItemId> row;
        for (const auto& t : l.tokens)
            row.push_back(ids.at(numeric ? std::to_string(std::stoll(t)) : t));
        std::sort(row.begin(), row.end());
        row.erase(std::unique(row.begin(), row.end()), row.end());
        rows.push_back(std::move(row));
    }
    return Dataset(std::move(name), std::move(labels), std::move(rows), std::move(partitions));
}

std::ifstream open(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw DatasetError("cannot read dataset file '" + path.string() + "'");
    return in;
}

} // namespace

Dataset parse_fimi(std::istream& in, std::string name)
{
    return build(read_lines(in), std::move(name), {});
}

Dataset parse_labeled(std::istream& in, std::string name, const std::string& class_column)
{
    auto file = read_lines(in);
    auto& lines = file.lines;
    const std::string prefix = class_column + "=";
    std::map<std::string, std::vector<std::size_t>> partitions;
    for (std::size_t t = 0; t < lines.size(); ++t)
    {
        auto& toks = lines[t].tokens;
        if (toks.empty() || !toks.back().starts_with(prefix) || toks.back().size() == prefix.size())
            throw DatasetError("line " + std::to_string(lines[t].line_no) + ": missing '" + prefix + "<value>' token");
        partitions[toks.back().substr(prefix.size())].push_back(t);
        toks.pop_back();
    }
    if (partitions.empty())
        throw DatasetError("labeled dataset has no class values");
    return build(std::move(file), std::move(name), std::move(partitions));
}

Dataset load_fimi(const std::filesystem::path& path)
{
    auto in = open(path);
    return parse_fimi(in, path.stem().string());
}

Dataset load_labeled(const std::filesystem::path& path, const std::string& class_column)
{
    auto in = open(path);
    return parse_labeled(in, path.stem().string(), class_column);
}

void write_fimi(const Dataset& d, std::ostream& out, const std::string& class_column)
{
    out << "# items:";
    for (const auto& item : d.items())
        out << ' ' << item.label;
    out << '\n';
    for (std::size_t t = 0; t < d.n_transactions(); ++t)
    {
        bool first = true;
        d.transaction(t).for_each([&](std::size_t i) {
            out << (first ? "" : " ") << d.label(static_cast<ItemId>(i));
            first = false;
        });
        for (const auto& [part, bits] : d.partitions())
            if (bits.test(t))
                out << ' ' << class_column << '=' << part;
        out << '\n';
    }
}

CoverSet cover(const Dataset& d, const Bitset& items)
{
    CoverSet c = d.all_transactions();
    items.for_each([&](std::size_t i) { c &= d.item_cover(static_cast<ItemId>(i)); });
    return c;
}

CoverSet cover(const Dataset& d, const Pattern& x)
{
    CoverSet c = d.all_transactions();
    for (auto i : x.items())
        c &= d.item_cover(i);
    return c;
}

std::size_t freq(const Dataset& d, const Pattern& x, const std::optional<std::string>& part)
{
    auto c = cover(d, x);
    if (part)
        c &= d.partition(*part);
    return c.count();
}

Bitset closure(const Dataset& d, const Bitset& items)
{
    Bitset result = d.all_items();
    cover(d, items).for_each([&](std::size_t t) { result &= d.transaction(t); });
    return result;
}

Pattern closure(const Dataset& d, const Pattern& x)
{
    return Pattern::from_bits(closure(d, x.to_bits(d.n_items())));
}

bool is_closed(const Dataset& d, const Pattern& x)
{
    return closure(d, x) == x;
}

} // namespace patmine
