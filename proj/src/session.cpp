#include "patmine/session.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "patmine/evaluator.hpp"

namespace patmine
{

SessionError::SessionError(SourceSpan span, const std::string& message, int exit_code)
    : std::runtime_error(span.line ? span.to_string() + ": " + message : message), span_(span), message_(message),
      exit_code_(exit_code)
{
}

// ---------------------------------------------------------------- output

namespace
{

template <class... Fs>
struct overloaded : Fs...
{
    using Fs::operator()...;
};

std::vector<std::string> labels_of(const StoredSolutions& s, const Pattern& p)
{
    std::vector<std::string> out;
    for (auto i : p.items())
        out.push_back(s.labels.at(i));
    return out;
}

std::string braced(const std::vector<std::string>& labels)
{
    std::string out = "{";
    for (std::size_t i = 0; i < labels.size(); ++i)
        out += (i ? ", " : "") + labels[i];
    return out + "}";
}

std::string csv_cell(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char c : s)
        out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string plural(std::size_t n, const std::string& word)
{
    return std::to_string(n) + " " + word + (n == 1 ? "" : "s");
}

} // namespace

void write_table(std::ostream& out, const StoredSolutions& s, std::optional<std::size_t> limit)
{
    const auto& sols = s.result.solutions;
    const std::size_t rows = limit ? std::min(*limit, sols.size()) : sols.size();
    const int k = s.query.k;

    std::vector<std::vector<std::string>> cells;
    cells.push_back({"Sol."});
    for (int i = 1; i <= k; ++i)
        cells.front().push_back("X" + std::to_string(i));
    for (std::size_t r = 0; r < rows; ++r)
    {
        std::vector<std::string> row{"s" + std::to_string(r + 1)};
        for (const auto& p : sols[r])
            row.push_back(braced(labels_of(s, p)));
        cells.push_back(std::move(row));
    }

    std::vector<std::size_t> width(k + 1, 0);
    for (const auto& row : cells)
        for (std::size_t c = 0; c < row.size(); ++c)
            width[c] = std::max(width[c], row[c].size());

    auto print_row = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c)
        {
            if (c)
                out << " | ";
            out << row[c];
            if (c + 1 < row.size())
                out << std::string(width[c] - row[c].size(), ' ');
        }
        out << '\n';
    };
    print_row(cells.front());
    for (std::size_t c = 0; c < width.size(); ++c)
        out << (c ? "-+-" : "") << std::string(width[c], '-');
    out << '\n';
    for (std::size_t r = 1; r < cells.size(); ++r)
        print_row(cells[r]);
    if (rows < sols.size())
        out << "(" << sols.size() - rows << " more)\n";
}

void write_json(std::ostream& out, const StoredSolutions& s)
{
    using nlohmann::ordered_json;
    ordered_json doc;
    doc["query"] = s.query.name;
    doc["k"] = s.query.k;
    ordered_json sols = ordered_json::array();
    for (const auto& a : s.result.solutions)
    {
        ordered_json tuple = ordered_json::array();
        for (const auto& p : a)
            tuple.push_back(labels_of(s, p));
        sols.push_back(std::move(tuple));
    }
    doc["solutions"] = std::move(sols);
    // wall time is left out so that repeated runs export identical bytes
    const auto& st = s.result.stats;
    ordered_json stats;
    stats["nodes"] = st.nodes;
    stats["candidates"] = st.candidates;
    stats["leaves"] = st.leaves;
    stats["prunes"] = ordered_json::object();
    for (const auto& [rule, n] : st.prunes)
        stats["prunes"][rule] = n;
    doc["stats"] = std::move(stats);
    out << doc.dump(2) << '\n';
}

void write_csv(std::ostream& out, const StoredSolutions& s)
{
    for (int i = 1; i <= s.query.k; ++i)
        out << (i > 1 ? "," : "") << "X" << i;
    out << '\n';
    for (const auto& a : s.result.solutions)
    {
        for (std::size_t i = 0; i < a.size(); ++i)
        {
            std::string cell;
            for (const auto& l : labels_of(s, a[i]))
                cell += (cell.empty() ? "" : "|") + l;
            out << (i ? "," : "") << csv_cell(cell);
        }
        out << '\n';
    }
}

void write_stats(std::ostream& out, const StoredSolutions& s)
{
    const auto& st = s.result.stats;
    out << "query:      " << s.query.name << " on " << s.dataset << '\n'
        << "solutions:  " << s.result.solutions.size() << '\n'
        << "candidates: " << st.candidates << '\n'
        << "nodes:      " << st.nodes << '\n'
        << "leaves:     " << st.leaves << '\n';
    out << "prunes:    ";
    if (st.prunes.empty())
        out << " none";
    for (const auto& [rule, n] : st.prunes)
        out << ' ' << rule << '=' << n;
    out << '\n' << "time:       " << std::fixed << std::setprecision(3) << st.wall_ms << " ms\n";
    out.unsetf(std::ios::floatfield);
}

// --------------------------------------------------------------- session

Session::Session(std::ostream& out, SessionOptions options) : out_(out), options_(std::move(options)) {}

const Query* Session::query(const std::string& name) const
{
    auto it = queries_.find(name);
    return it == queries_.end() ? nullptr : &it->second;
}

const StoredSolutions* Session::solutions(const std::string& name) const
{
    auto it = solutions_.find(name);
    return it == solutions_.end() ? nullptr : &it->second;
}

bool Session::execute(const Statement& s)
{
    const SourceSpan& span = s.span;
    auto located = [&](const SourceSpan& inner) { return inner.line ? inner : span; };
    try
    {
        return std::visit(
            overloaded{
                [&](const stmt::Load& x) { return load(x, span), true; },
                [&](const stmt::Define& x) { return defs_.define(x.def), true; },
                [&](const stmt::QueryDecl& x) { return declare(x.query, span), true; },
                [&](const stmt::Refine& x) {
                    const Query* base = query(x.base);
                    if (!base)
                        throw SessionError(span, "unknown query " + x.base, exit_invalid);
                    declare(refine(*base, x.extra, x.name), span);
                    return true;
                },
                [&](const stmt::Solve& x) { return solve(x, span), true; },
                [&](const stmt::Param& x) { return params_[x.name] = x.value, true; },
                [&](const stmt::Show& x) { return show(x, span), true; },
                [&](const stmt::Export& x) { return export_to(x, span), true; },
                [&](const stmt::Stats& x) { return write_stats(out_, require_solutions(x.name, span)), true; },
                [&](const stmt::Quit&) { return false; },
                [&](const stmt::Eval& x) { return eval(x, span), true; },
                [&](const stmt::Check& x) { return check(x, span), true; },
            },
            s.node);
    }
    catch (const SessionError&)
    {
        throw;
    }
    catch (const ValidationError& e)
    {
        std::string msg;
        for (const auto& d : e.diagnostics())
            msg += (msg.empty() ? "" : "; ") + d.message;
        throw SessionError(located(e.diagnostics().empty() ? SourceSpan{} : e.diagnostics().front().span), msg,
                           exit_invalid);
    }
    catch (const AstError& e)
    {
        throw SessionError(located(e.span()), e.message(), exit_invalid);
    }
    catch (const ParseError& e)
    {
        throw SessionError(located(e.span()), e.message(), exit_invalid);
    }
    catch (const std::exception& e)
    {
        throw SessionError(span, e.what(), exit_runtime);
    }
}

void Session::load(const stmt::Load& s, const SourceSpan& span)
{
    namespace fs = std::filesystem;
    fs::path path(s.path);
    if (path.is_relative())
    {
        if (options_.data_dir)
            path = *options_.data_dir / path;
        else if (!fs::exists(path) && options_.script_dir && fs::exists(*options_.script_dir / path))
            path = *options_.script_dir / path;
    }
    if (!fs::exists(path))
        throw SessionError(span, "cannot read dataset file '" + path.string() + "'", exit_runtime);
    dataset_ = s.class_column ? load_labeled(path, *s.class_column) : load_fimi(path);
}

void Session::declare(Query q, const SourceSpan& span)
{
    if (queries_.count(q.name))
        throw SessionError(span, "query " + q.name + " is already declared", exit_invalid);
    query_order_.push_back(q.name);
    const std::string name = q.name;
    queries_.emplace(name, std::move(q));
}

const Dataset& Session::require_dataset(const SourceSpan& span) const
{
    if (!dataset_)
        throw SessionError(span, "no dataset loaded", exit_runtime);
    return *dataset_;
}

const StoredSolutions& Session::require_solutions(const std::string& name, const SourceSpan& span) const
{
    if (!queries_.count(name))
        throw SessionError(span, "unknown query " + name, exit_invalid);
    const StoredSolutions* s = solutions(name);
    if (!s)
        throw SessionError(span, "query " + name + " has not been solved", exit_runtime);
    return *s;
}

void Session::solve(const stmt::Solve& s, const SourceSpan& span)
{
    const Query* q = query(s.query);
    if (!q)
        throw SessionError(span, "unknown query " + s.query, exit_invalid);
    const Dataset& d = require_dataset(span);

    Query bound = *q;
    bound.params = params_;
    SearchConfig cfg;
    cfg.workers = options_.workers;
    cfg.limit = s.limit ? std::optional<std::size_t>(static_cast<std::size_t>(*s.limit)) : options_.limit;

    StoredSolutions stored{bound, d.name(), {}, patmine::solve(d, bound, defs_, cfg)};
    for (const auto& item : d.items())
        stored.labels.push_back(item.label);
    auto& slot = solutions_.insert_or_assign(q->name, std::move(stored)).first->second;

    switch (options_.format)
    {
    case stmt::Format::Table:
        out_ << q->name << ": " << plural(slot.result.solutions.size(), "solution") << '\n';
        if (!slot.result.solutions.empty())
            write_table(out_, slot);
        break;
    case stmt::Format::Json: write_json(out_, slot); break;
    case stmt::Format::Csv: write_csv(out_, slot); break;
    }
    if (options_.stats)
        write_stats(out_, slot);
}

void Session::show(const stmt::Show& s, const SourceSpan& span)
{
    switch (s.what)
    {
    case stmt::ShowWhat::Queries:
        for (const auto& name : query_order_)
            out_ << print_canonical(Statement{stmt::QueryDecl{queries_.at(name)}, {}}) << '\n';
        break;
    case stmt::ShowWhat::Defs:
        for (const auto& def : defs_.all())
            out_ << print_canonical(Statement{stmt::Define{def}, {}}) << '\n';
        break;
    case stmt::ShowWhat::Params:
        for (const auto& [name, value] : params_)
            out_ << '$' << name << " = " << to_string(value) << '\n';
        break;
    case stmt::ShowWhat::Solutions: {
        const auto& sols = require_solutions(s.name, span);
        out_ << s.name << ": " << plural(sols.result.solutions.size(), "solution") << '\n';
        if (!sols.result.solutions.empty())
            write_table(out_, sols,
                        s.limit ? std::optional<std::size_t>(static_cast<std::size_t>(*s.limit)) : std::nullopt);
        break;
    }
    }
}

void Session::export_to(const stmt::Export& s, const SourceSpan& span)
{
    const auto& sols = require_solutions(s.name, span);
    std::ofstream file(s.path, std::ios::binary);
    if (!file)
        throw SessionError(span, "cannot write '" + s.path + "'", exit_runtime);
    switch (s.format)
    {
    case stmt::Format::Table: write_table(file, sols); break;
    case stmt::Format::Json: write_json(file, sols); break;
    case stmt::Format::Csv: write_csv(file, sols); break;
    }
    file.flush();
    if (!file)
        throw SessionError(span, "failed writing '" + s.path + "'", exit_runtime);
}

Assignment Session::bind(const stmt::Bindings& with, const SourceSpan& span) const
{
    const Dataset& d = require_dataset(span);
    int k = 0;
    for (const auto& [i, labels] : with)
        k = std::max(k, i);
    std::vector<std::optional<Pattern>> slots(k);
    for (const auto& [i, labels] : with)
    {
        if (i < 1)
            throw SessionError(span, "variable index must be at least 1", exit_invalid);
        if (slots[i - 1])
            throw SessionError(span, "X[" + std::to_string(i) + "] is bound twice", exit_invalid);
        if (labels.empty())
            throw SessionError(span, "X[" + std::to_string(i) + "] must be a non-empty pattern", exit_invalid);
        for (const auto& l : labels)
            if (!d.find_item(l))
                throw SessionError(span, "unknown item " + l, exit_invalid);
        slots[i - 1] = d.pattern(labels);
    }
    Assignment a;
    for (int i = 0; i < k; ++i)
    {
        if (!slots[i])
            throw SessionError(span, "X[" + std::to_string(i + 1) + "] is not bound", exit_invalid);
        a.push_back(*slots[i]);
    }
    return a;
}

void Session::eval(const stmt::Eval& s, const SourceSpan& span)
{
    const Dataset& d = require_dataset(span);
    const Assignment a = bind(s.with, span);
    const int k = static_cast<int>(a.size());
    auto g = ground(s.term, k, defs_, params_);
    std::vector<Diagnostic> diags;
    infer_sort(*g, d, k, diags);
    if (!diags.empty())
        throw ValidationError(std::move(diags));
    const Value v = eval_term(d, a, *g);
    std::visit(overloaded{
                   [&](const Number& n) { out_ << to_string(n); },
                   [&](const ItemSetValue& x) { out_ << d.format(x.items); },
                   [&](const CoverValue& x) {
                       std::string text;
                       x.transactions.for_each(
                           [&](std::size_t t) { text += (text.empty() ? "" : ", ") + std::string("t@") + std::to_string(t); });
                       out_ << '{' << text << '}';
                   },
                   [&](const ItemValue& x) { out_ << d.label(x.item); },
                   [&](const TransactionValue& x) { out_ << "t@" << x.index; },
                   [&](bool b) { out_ << (b ? "true" : "false"); },
               },
               v);
    out_ << '\n';
}

void Session::check(const stmt::Check& s, const SourceSpan& span)
{
    const Dataset& d = require_dataset(span);
    Assignment a = bind(s.with, span);
    if (a.empty())
    {
        // closed formula: rule out variables, then evaluate under a dummy binding
        check_var_bounds(s.formula, 0);
        a.push_back(Pattern({0}));
    }
    Query q{"check", static_cast<int>(a.size()), s.formula, params_, span};
    auto diags = validate(q, d, defs_);
    if (!diags.empty())
        throw ValidationError(std::move(diags));
    auto g = ground(q, defs_);
    out_ << (patmine::check(d, a, *g, q.k) ? "true" : "false") << '\n';
}

// ---------------------------------------------------------------- driver

namespace
{

void report(std::ostream& err, const std::string& origin, const SourceSpan& span, const std::string& message)
{
    err << origin;
    if (span.line)
        err << ':' << span.line << ':' << span.column;
    err << ": error: " << message << '\n';
}

} // namespace

int run_script_text(std::string_view text, const std::string& origin, std::ostream& out, std::ostream& err,
                    SessionOptions options)
{
    std::vector<Statement> statements;
    try
    {
        statements = parse_script(text);
    }
    catch (const ParseError& e)
    {
        report(err, origin, e.span(), e.message());
        return exit_invalid;
    }
    catch (const AstError& e)
    {
        report(err, origin, e.span(), e.message());
        return exit_invalid;
    }

    Session session(out, std::move(options));
    for (const auto& s : statements)
    {
        try
        {
            if (!session.execute(s))
                break;
        }
        catch (const SessionError& e)
        {
            out.flush();
            report(err, origin, e.span(), e.message());
            return e.exit_code();
        }
    }
    return exit_ok;
}

int run_script(const std::filesystem::path& path, std::ostream& out, std::ostream& err, SessionOptions options)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        err << path.string() << ": error: cannot read script\n";
        return exit_runtime;
    }
    std::ostringstream text;
    text << in.rdbuf();
    if (!options.script_dir)
        options.script_dir = path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path();
    return run_script_text(text.str(), path.string(), out, err, std::move(options));
}

void interactive_loop(std::istream& in, std::ostream& out, std::ostream& err, SessionOptions options, ReplOptions repl)
{
    Session session(out, std::move(options));
    std::ofstream history;
    if (repl.history)
        history.open(*repl.history, std::ios::app);

    std::string buffer;
    std::string line;
    auto blank = [](const std::string& s) {
        std::istringstream ss(s);
        std::string l;
        while (std::getline(ss, l))
        {
            auto first = l.find_first_not_of(" \t\r");
            if (first != std::string::npos && l[first] != '#')
                return false;
        }
        return true;
    };

    while (true)
    {
        if (repl.prompt)
            out << (buffer.empty() ? "patmine> " : "     ... ") << std::flush;
        const bool got = static_cast<bool>(std::getline(in, line));
        if (got)
            buffer += line + '\n';
        if (got && !statement_complete(buffer))
            continue;
        if (blank(buffer))
        {
            buffer.clear();
            if (!got)
                break;
            continue;
        }
        if (history.is_open())
            history << buffer << std::flush;

        bool quit = false;
        try
        {
            for (const auto& s : parse_script(buffer))
                if (!session.execute(s))
                {
                    quit = true;
                    break;
                }
        }
        catch (const SessionError& e)
        {
            report(err, "repl", e.span(), e.message());
        }
        catch (const ParseError& e)
        {
            report(err, "repl", e.span(), e.message());
        }
        catch (const AstError& e)
        {
            report(err, "repl", e.span(), e.message());
        }
        out.flush();
        buffer.clear();
        if (quit || !got)
            break;
    }
}

} // namespace patmine
