#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "patmine/ast.hpp"
#include "patmine/dataset.hpp"
#include "patmine/parser.hpp"
#include "patmine/solver.hpp"

namespace patmine
{

enum ExitCode : int { exit_ok = 0, exit_runtime = 1, exit_invalid = 2 };

/// A failed statement: where, what, and the exit code it maps to.
class SessionError : public std::runtime_error
{
public:
    SessionError(SourceSpan span, const std::string& message, int exit_code);
    const SourceSpan& span() const noexcept { return span_; }
    const std::string& message() const noexcept { return message_; }
    int exit_code() const noexcept { return exit_code_; }

private:
    SourceSpan span_;
    std::string message_;
    int exit_code_;
};

struct SessionOptions
{
    /// Relative `load` paths resolve here when set.
    std::optional<std::filesystem::path> data_dir;
    /// Fallback for relative `load` paths missing from the working directory.
    std::optional<std::filesystem::path> script_dir;
    std::optional<std::size_t> limit;
    unsigned workers = 1;
    stmt::Format format = stmt::Format::Table;
    bool stats = false;
};

/// A solution set together with the query (parameters captured) and the
/// dataset it was computed on.
struct StoredSolutions
{
    Query query;
    std::string dataset;
    std::vector<std::string> labels;
    SolutionSet result;
};

void write_table(std::ostream& out, const StoredSolutions& s, std::optional<std::size_t> limit = {});
void write_json(std::ostream& out, const StoredSolutions& s);
void write_csv(std::ostream& out, const StoredSolutions& s);
void write_stats(std::ostream& out, const StoredSolutions& s);

class Session
{
public:
    explicit Session(std::ostream& out, SessionOptions options = {});

    /// Runs one statement; false after `quit`. Throws SessionError.
    bool execute(const Statement& s);

    const Dataset* dataset() const noexcept { return dataset_ ? &*dataset_ : nullptr; }
    const Definitions& definitions() const noexcept { return defs_; }
    const Query* query(const std::string& name) const;
    const StoredSolutions* solutions(const std::string& name) const;
    const std::map<std::string, Rational>& params() const noexcept { return params_; }

private:
    void load(const stmt::Load& s, const SourceSpan& span);
    void declare(Query q, const SourceSpan& span);
    void solve(const stmt::Solve& s, const SourceSpan& span);
    void show(const stmt::Show& s, const SourceSpan& span);
    void export_to(const stmt::Export& s, const SourceSpan& span);
    void eval(const stmt::Eval& s, const SourceSpan& span);
    void check(const stmt::Check& s, const SourceSpan& span);

    const Dataset& require_dataset(const SourceSpan& span) const;
    const StoredSolutions& require_solutions(const std::string& name, const SourceSpan& span) const;
    Assignment bind(const stmt::Bindings& with, const SourceSpan& span) const;

    std::ostream& out_;
    SessionOptions options_;
    std::optional<Dataset> dataset_;
    Definitions defs_;
    std::vector<std::string> query_order_;
    std::map<std::string, Query> queries_;
    std::map<std::string, StoredSolutions> solutions_;
    std::map<std::string, Rational> params_;
};

/// Parses the whole script first, then executes it. Errors go to `err` as
/// `origin:line:col: error: message`. Returns an ExitCode.
int run_script_text(std::string_view text, const std::string& origin, std::ostream& out, std::ostream& err,
                    SessionOptions options = {});
int run_script(const std::filesystem::path& path, std::ostream& out, std::ostream& err, SessionOptions options = {});

struct ReplOptions
{
    bool prompt = false;
    /// Each executed statement is appended here when set.
    std::optional<std::filesystem::path> history;
};

/// Reads statements until `quit;` or end of input; a failing statement is
/// reported and the session carries on.
void interactive_loop(std::istream& in, std::ostream& out, std::ostream& err, SessionOptions options = {},
                      ReplOptions repl = {});

} // namespace patmine
