#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "patmine/ast.hpp"

namespace patmine
{

class ParseError : public std::runtime_error
{
public:
    ParseError(SourceSpan span, const std::string& message);
    const SourceSpan& span() const noexcept { return span_; }
    const std::string& message() const noexcept { return message_; }

private:
    SourceSpan span_;
    std::string message_;
};

namespace stmt
{

struct Load { std::string path; std::optional<std::string> class_column; };
struct Define { FunctionDef def; };
struct QueryDecl { Query query; };
struct Refine { std::string name; std::string base; FormulaPtr extra; };
struct Solve { std::string query; std::optional<int> limit; };
struct Param { std::string name; Rational value; };

// interactive commands
enum class ShowWhat { Queries, Solutions, Defs, Params };
struct Show { ShowWhat what; std::string name; std::optional<int> limit; };
enum class Format { Table, Json, Csv };
struct Export { std::string name; std::string path; Format format; };
struct Stats { std::string name; };
struct Quit {};
/// `X[i] = {..}` bindings used by eval/check.
using Bindings = std::vector<std::pair<int, std::vector<std::string>>>;
struct Eval { TermPtr term; Bindings with; };
struct Check { FormulaPtr formula; Bindings with; };

} // namespace stmt

struct Statement
{
    using Node = std::variant<stmt::Load, stmt::Define, stmt::QueryDecl, stmt::Refine, stmt::Solve, stmt::Param,
                              stmt::Show, stmt::Export, stmt::Stats, stmt::Quit, stmt::Eval, stmt::Check>;
    Node node;
    SourceSpan span;
};

/// Structural equality, spans ignored.
bool equal(const Statement& a, const Statement& b);

/// Parses exactly one statement (terminated by `;`).
Statement parse_statement(std::string_view text);
/// Parses a whole script; spans are relative to `text`.
std::vector<Statement> parse_script(std::string_view text);

/// True when `text` holds at least one `;` outside string literals and
/// comments, i.e. a REPL buffer ready to be parsed.
bool statement_complete(std::string_view text);

std::string print_canonical(const Statement& s);
std::string print_term(const Term& t);
std::string print_formula(const Formula& f);
std::string to_string(stmt::Format f);
std::optional<stmt::Format> parse_format(std::string_view s);

} // namespace patmine
