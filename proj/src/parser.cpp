#include "patmine/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace patmine
{

ParseError::ParseError(SourceSpan span, const std::string& message)
    : std::runtime_error(span.to_string() + ": " + message), span_(span), message_(message)
{
}

namespace
{

template <class... Fs>
struct overloaded : Fs...
{
    using Fs::operator()...;
};

// ----------------------------------------------------------------- lexer

enum class Tok { Ident, Number, String, Quoted, Trans, Param, Punct, End };

struct Token
{
    Tok kind;
    std::string text; // identifier, punctuation, string contents, number spelling
    Rational number{0};
    std::size_t trans = 0;
    SourceSpan span;
};

const std::set<std::string, std::less<>> reserved_words{
    "and", "or", "in", "notin", "subset", "subseteq", "union", "inter", "diff", "true", "forall", "with",
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

class Lexer
{
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run()
    {
        std::vector<Token> out;
        while (true)
        {
            skip_space();
            if (pos_ >= text_.size())
            {
                out.push_back({Tok::End, "", 0, 0, here(0)});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    SourceSpan here(std::size_t len) const { return {line_, col_, pos_, len}; }

    void advance(std::size_t n = 1)
    {
        for (std::size_t i = 0; i < n && pos_ < text_.size(); ++i, ++pos_)
        {
            if (text_[pos_] == '\n')
            {
                ++line_;
                col_ = 1;
            }
            else
                ++col_;
        }
    }

    void skip_space()
    {
        while (pos_ < text_.size())
        {
            char c = text_[pos_];
            if (c == '#')
                while (pos_ < text_.size() && text_[pos_] != '\n')
                    advance();
            else if (std::isspace(static_cast<unsigned char>(c)))
                advance();
            else
                break;
        }
    }

    char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }

    Token finish(Token t, std::size_t start)
    {
        t.span.length = pos_ - start;
        return t;
    }

    std::int64_t digits()
    {
        std::size_t start = pos_;
        while (digit(peek()))
            advance();
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
        if (ec != std::errc{})
            throw ParseError(here(0), "number too large");
        return v;
    }

    Token next()
    {
        const std::size_t start = pos_;
        Token t{Tok::Punct, "", 0, 0, here(0)};
        char c = peek();

        if (ident_start(c))
        {
            while (ident_char(peek()))
                advance();
            t.kind = Tok::Ident;
            t.text = std::string(text_.substr(start, pos_ - start));
            if (t.text == "t" && peek() == '@')
            {
                advance();
                if (!digit(peek()))
                    throw ParseError(here(1), "expected transaction index after 't@'");
                t.kind = Tok::Trans;
                t.trans = static_cast<std::size_t>(digits());
                t.text = std::string(text_.substr(start, pos_ - start));
            }
            return finish(t, start);
        }
        if (digit(c))
        {
            t.kind = Tok::Number;
            std::int64_t whole = digits();
            Rational value(whole);
            if (peek() == '.' && digit(peek(1)))
            {
                advance();
                std::size_t fstart = pos_;
                std::int64_t frac = digits();
                std::int64_t scale = 1;
                for (std::size_t i = fstart; i < pos_; ++i)
                    scale *= 10;
                value = Rational(whole) + Rational(frac, scale);
            }
            else if (peek() == '/' && digit(peek(1)))
            {
                advance();
                std::int64_t den = digits();
                if (den == 0)
                    throw ParseError(t.span, "zero denominator in rational literal");
                value = Rational(whole, den);
            }
            t.number = value;
            t.text = std::string(text_.substr(start, pos_ - start));
            return finish(t, start);
        }
        if (c == '"' || c == '\'')
        {
            advance();
            while (pos_ < text_.size() && peek() != c && peek() != '\n')
                advance();
            if (peek() != c)
                throw ParseError(t.span, c == '"' ? "unterminated string" : "unterminated quoted item");
            t.kind = c == '"' ? Tok::String : Tok::Quoted;
            t.text = std::string(text_.substr(start + 1, pos_ - start - 1));
            advance();
            if (t.kind == Tok::Quoted && t.text.empty())
                throw ParseError(t.span, "empty quoted item");
            return finish(t, start);
        }
        if (c == '$')
        {
            advance();
            if (!ident_start(peek()))
                throw ParseError(here(1), "expected parameter name after '$'");
            std::size_t nstart = pos_;
            while (ident_char(peek()))
                advance();
            t.kind = Tok::Param;
            t.text = std::string(text_.substr(nstart, pos_ - nstart));
            return finish(t, start);
        }

        static const std::string_view two[] = {":=", "..", "<=", ">=", "!="};
        for (auto p : two)
            if (text_.substr(pos_, 2) == p)
            {
                advance(2);
                t.text = std::string(p);
                return finish(t, start);
            }
        if (std::string_view("()[]{},;:<>=+-*/").find(c) != std::string_view::npos)
        {
            advance();
            t.text = std::string(1, c);
            return finish(t, start);
        }
        throw ParseError(here(1), std::string("unexpected character '") + c + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t col_ = 1;
};

// ---------------------------------------------------------------- parser

bool is_relation_token(const Token& t)
{
    if (t.kind == Tok::Punct)
        return t.text == "<" || t.text == "<=" || t.text == "=" || t.text == "!=" || t.text == ">=" || t.text == ">";
    if (t.kind == Tok::Ident)
        return t.text == "in" || t.text == "notin" || t.text == "subset" || t.text == "subseteq";
    return false;
}

bool is_operator_token(const Token& t)
{
    if (t.kind == Tok::Punct)
        return t.text == "+" || t.text == "-" || t.text == "*" || t.text == "/";
    if (t.kind == Tok::Ident)
        return t.text == "union" || t.text == "inter" || t.text == "diff";
    return false;
}

Rel relation_of(const std::string& s)
{
    if (s == "<") return Rel::Lt;
    if (s == "<=") return Rel::Le;
    if (s == "=") return Rel::Eq;
    if (s == "!=") return Rel::Ne;
    if (s == ">=") return Rel::Ge;
    if (s == ">") return Rel::Gt;
    if (s == "in") return Rel::In;
    if (s == "notin") return Rel::NotIn;
    if (s == "subset") return Rel::Subset;
    return Rel::SubsetEq;
}

class Parser
{
public:
    explicit Parser(std::string_view text) : tokens_(Lexer(text).run()) {}

    bool at_end() const { return cur().kind == Tok::End; }

    Statement statement()
    {
        const Token& first = cur();
        if (first.kind != Tok::Ident)
            fail(first, "expected a statement");
        const std::string kw = first.text;
        Statement s;
        if (kw == "load")
            s.node = load();
        else if (kw == "define")
            s.node = define();
        else if (kw == "query")
            s.node = query_decl();
        else if (kw == "refine")
            s.node = refine_stmt();
        else if (kw == "solve")
            s.node = solve();
        else if (kw == "param")
            s.node = param();
        else if (kw == "show")
            s.node = show();
        else if (kw == "export")
            s.node = export_stmt();
        else if (kw == "stats")
        {
            take();
            s.node = stmt::Stats{ident("query name")};
        }
        else if (kw == "quit" || kw == "exit")
        {
            take();
            s.node = stmt::Quit{};
        }
        else if (kw == "eval")
        {
            take();
            auto t = term();
            s.node = stmt::Eval{t, bindings()};
        }
        else if (kw == "check")
        {
            take();
            auto f = formula();
            s.node = stmt::Check{f, bindings()};
        }
        else
            fail(first, "unknown statement '" + kw + "'");
        expect_punct(";");
        s.span = span_from(first);
        return s;
    }

private:
    // ------------------------------------------------------------ helpers

    const Token& cur() const { return tokens_[pos_]; }
    const Token& peek(std::size_t n = 1) const { return tokens_[std::min(pos_ + n, tokens_.size() - 1)]; }
    const Token& take() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const
    {
        SourceSpan sp = t.span;
        throw ParseError(sp, msg);
    }

    std::string describe(const Token& t) const
    {
        switch (t.kind)
        {
        case Tok::End: return "end of input";
        case Tok::String: return "string \"" + t.text + "\"";
        case Tok::Quoted: return "'" + t.text + "'";
        case Tok::Param: return "$" + t.text;
        default: return "'" + t.text + "'";
        }
    }

    bool is_punct(const char* p) const { return cur().kind == Tok::Punct && cur().text == p; }
    bool is_kw(const char* k) const { return cur().kind == Tok::Ident && cur().text == k; }

    void expect_punct(const char* p)
    {
        if (!is_punct(p))
            fail(cur(), std::string("expected '") + p + "', found " + describe(cur()));
        take();
    }

    void expect_kw(const char* k)
    {
        if (!is_kw(k))
            fail(cur(), std::string("expected '") + k + "', found " + describe(cur()));
        take();
    }

    std::string ident(const char* what)
    {
        if (cur().kind != Tok::Ident)
            fail(cur(), std::string("expected ") + what + ", found " + describe(cur()));
        return take().text;
    }

    std::string string_lit(const char* what)
    {
        if (cur().kind != Tok::String)
            fail(cur(), std::string("expected ") + what + " (a quoted string), found " + describe(cur()));
        return take().text;
    }

    int integer(const char* what)
    {
        const Token& t = cur();
        if (t.kind != Tok::Number || t.number.denominator() != 1 || t.text.find_first_of("./") != std::string::npos)
            fail(t, std::string("expected ") + what + " (an integer), found " + describe(t));
        take();
        if (t.number.numerator() > 1'000'000'000)
            fail(t, std::string(what) + " too large");
        return static_cast<int>(t.number.numerator());
    }

    SourceSpan span_from(const Token& start) const
    {
        SourceSpan s = start.span;
        const Token& last = tokens_[pos_ > 0 ? pos_ - 1 : 0];
        std::size_t end = last.span.offset + last.span.length;
        s.length = end > s.offset ? end - s.offset : 0;
        return s;
    }

    // --------------------------------------------------------- statements

    stmt::Load load()
    {
        take();
        stmt::Load l{string_lit("dataset path"), std::nullopt};
        if (is_kw("class"))
        {
            take();
            l.class_column = ident("class column name");
        }
        return l;
    }

    stmt::Define define()
    {
        const Token& start = take();
        FunctionDef def;
        def.name = ident("function name");
        expect_punct("(");
        do
        {
            def.params.push_back(ident("parameter name"));
        } while (is_punct(",") && (take(), true));
        expect_punct(")");
        expect_punct(":=");
        params_ = def.params;
        def.body = term();
        params_.clear();
        def.span = span_from(start);
        return {std::move(def)};
    }

    stmt::QueryDecl query_decl()
    {
        const Token& start = take();
        Query q;
        q.name = ident("query name");
        expect_punct("(");
        expect_kw("k");
        expect_punct("=");
        const Token& ktok = cur();
        q.k = integer("k");
        if (q.k < 1)
            fail(ktok, "k must be at least 1");
        expect_punct(")");
        expect_punct(":=");
        q.formula = formula();
        q.span = span_from(start);
        try
        {
            check_var_bounds(q.formula, q.k);
        }
        catch (const AstError& e)
        {
            throw ParseError(e.span(), e.message());
        }
        return {std::move(q)};
    }

    stmt::Refine refine_stmt()
    {
        take();
        stmt::Refine r;
        r.name = ident("query name");
        expect_kw("from");
        r.base = ident("base query name");
        expect_punct(":=");
        r.extra = formula();
        return r;
    }

    stmt::Solve solve()
    {
        take();
        stmt::Solve s{ident("query name"), std::nullopt};
        if (is_kw("limit"))
        {
            take();
            const Token& t = cur();
            s.limit = integer("limit");
            if (*s.limit < 1)
                fail(t, "limit must be at least 1");
        }
        return s;
    }

    Rational signed_number()
    {
        bool neg = false;
        if (is_punct("-"))
        {
            take();
            neg = true;
        }
        if (cur().kind != Tok::Number)
            fail(cur(), "expected a number, found " + describe(cur()));
        Rational v = take().number;
        return neg ? -v : v;
    }

    stmt::Param param()
    {
        take();
        stmt::Param p;
        p.name = ident("parameter name");
        expect_punct("=");
        p.value = signed_number();
        return p;
    }

    stmt::Show show()
    {
        take();
        stmt::Show s{stmt::ShowWhat::Queries, "", std::nullopt};
        std::string what = ident("'queries', 'solutions', 'defs' or 'params'");
        if (what == "queries")
            s.what = stmt::ShowWhat::Queries;
        else if (what == "defs")
            s.what = stmt::ShowWhat::Defs;
        else if (what == "params")
            s.what = stmt::ShowWhat::Params;
        else if (what == "solutions")
        {
            s.what = stmt::ShowWhat::Solutions;
            s.name = ident("query name");
            if (is_kw("limit"))
            {
                take();
                const Token& t = cur();
                s.limit = integer("limit");
                if (*s.limit < 1)
                    fail(t, "limit must be at least 1");
            }
        }
        else
            fail(tokens_[pos_ - 1], "cannot show '" + what + "'");
        return s;
    }

    stmt::Export export_stmt()
    {
        take();
        stmt::Export e;
        e.name = ident("query name");
        expect_kw("to");
        e.path = string_lit("output path");
        expect_kw("as");
        const Token& ft = cur();
        auto f = parse_format(ident("format"));
        if (!f)
            fail(ft, "unknown format '" + ft.text + "' (expected table, json or csv)");
        e.format = *f;
        return e;
    }

    stmt::Bindings bindings()
    {
        stmt::Bindings out;
        if (!is_kw("with"))
            return out;
        take();
        do
        {
            if (!(is_kw("X") && peek().kind == Tok::Punct && peek().text == "["))
                fail(cur(), "expected X[i] = {...}");
            take();
            take();
            const Token& it = cur();
            int i = integer("variable index");
            if (i < 1)
                fail(it, "variable index must be at least 1");
            expect_punct("]");
            expect_punct("=");
            out.emplace_back(i, labels());
        } while (is_punct(",") && (take(), true));
        return out;
    }

    // ----------------------------------------------------------- formulae

    FormulaPtr formula()
    {
        const Token& start = cur();
        std::vector<FormulaPtr> parts{conj()};
        while (is_kw("or"))
        {
            take();
            parts.push_back(conj());
        }
        if (parts.size() == 1)
            return parts.front();
        return make_formula(Or{std::move(parts)}, span_from(start));
    }

    FormulaPtr conj()
    {
        const Token& start = cur();
        std::vector<FormulaPtr> parts{atom()};
        while (is_kw("and"))
        {
            take();
            parts.push_back(atom());
        }
        if (parts.size() == 1)
            return parts.front();
        return make_formula(And{std::move(parts)}, span_from(start));
    }

    FormulaPtr atom()
    {
        const Token& start = cur();
        if (is_kw("forall"))
        {
            take();
            std::string first = ident("range variable");
            if (first == "k" || first == "X")
                fail(tokens_[pos_ - 1], "'" + first + "' cannot be a range variable");
            if (is_punct("<"))
            {
                take();
                std::string second = ident("range variable");
                if (second == "k" || second == "X" || second == first)
                    fail(tokens_[pos_ - 1], "invalid range variable '" + second + "'");
                expect_punct(":");
                bound_.push_back(first);
                bound_.push_back(second);
                auto body = atom();
                bound_.resize(bound_.size() - 2);
                return make_formula(ForAllPairs{first, second, body}, span_from(start));
            }
            expect_kw("in");
            Index lo = Index::literal(integer("range start"));
            expect_punct("..");
            Index hi = is_kw("k") ? (take(), Index::named("k")) : Index::literal(integer("range end"));
            expect_punct(":");
            bound_.push_back(first);
            auto body = atom();
            bound_.pop_back();
            return make_formula(ForAll{first, lo, hi, body}, span_from(start));
        }
        if (is_kw("true"))
        {
            take();
            return make_formula(TrueConst{}, span_from(start));
        }
        if (cur().kind == Tok::Ident && peek().kind == Tok::Punct && peek().text == "(")
        {
            const std::string& name = cur().text;
            if (name == "closed")
            {
                take();
                expect_punct("(");
                Index v = var_index_in_brackets();
                expect_punct(")");
                return make_formula(Closed{v}, span_from(start));
            }
            std::optional<GlobalKind> kind;
            if (name == "coverTransactions")
                kind = GlobalKind::CoverTransactions;
            else if (name == "coverItems")
                kind = GlobalKind::CoverItems;
            else if (name == "canonical")
                kind = GlobalKind::Canonical;
            if (kind)
            {
                take();
                expect_punct("(");
                auto vars = var_list();
                expect_punct(")");
                return make_formula(Global{*kind, std::move(vars)}, span_from(start));
            }
        }
        if (is_punct("("))
        {
            // either a parenthesised formula or a relation whose left term
            // starts with '('
            const std::size_t save = pos_;
            try
            {
                take();
                auto inner = formula();
                expect_punct(")");
                if (!is_relation_token(cur()) && !is_operator_token(cur()))
                    return inner;
            }
            catch (const ParseError&)
            {
            }
            pos_ = save;
        }
        auto left = term();
        if (!is_relation_token(cur()))
            fail(cur(), "expected a comparison operator, found " + describe(cur()));
        Rel rel = relation_of(take().text);
        auto right = term();
        return make_formula(Relation{rel, left, right}, span_from(start));
    }

    Index index()
    {
        const Token& t = cur();
        if (t.kind == Tok::Number)
        {
            int v = integer("variable index");
            if (v < 1)
                fail(t, "variable index must be at least 1");
            return Index::literal(v);
        }
        std::string name = ident("variable index");
        if (name != "k" && std::find(bound_.begin(), bound_.end(), name) == bound_.end())
            fail(t, "unbound range variable " + name);
        return Index::named(name);
    }

    Index var_index_in_brackets()
    {
        if (!is_kw("X"))
            fail(cur(), "expected a variable X[i], found " + describe(cur()));
        take();
        expect_punct("[");
        Index i = index();
        expect_punct("]");
        return i;
    }

    std::vector<VarSpan> var_list()
    {
        expect_punct("[");
        std::vector<VarSpan> out;
        do
        {
            if (!is_kw("X"))
                fail(cur(), "expected a variable X[i], found " + describe(cur()));
            take();
            expect_punct("[");
            VarSpan vs{index(), std::nullopt};
            if (is_punct(".."))
            {
                take();
                vs.last = index();
            }
            expect_punct("]");
            out.push_back(std::move(vs));
        } while (is_punct(",") && (take(), true));
        expect_punct("]");
        return out;
    }

    // -------------------------------------------------------------- terms

    TermPtr term()
    {
        const Token& start = cur();
        auto left = mul();
        while (true)
        {
            if (is_punct("+") || is_punct("-"))
            {
                auto op = take().text == "+" ? NumOpKind::Add : NumOpKind::Sub;
                auto right = mul();
                left = make_term(NumOp{op, left, right}, span_from(start));
            }
            else if (is_kw("union") || is_kw("diff"))
            {
                auto op = take().text == "union" ? SetOpKind::Union : SetOpKind::Diff;
                auto right = mul();
                left = make_term(SetOp{op, left, right}, span_from(start));
            }
            else
                return left;
        }
    }

    TermPtr mul()
    {
        const Token& start = cur();
        auto left = unary();
        while (true)
        {
            if (is_punct("*") || is_punct("/"))
            {
                auto op = take().text == "*" ? NumOpKind::Mul : NumOpKind::Div;
                auto right = unary();
                left = make_term(NumOp{op, left, right}, span_from(start));
            }
            else if (is_kw("inter"))
            {
                take();
                auto right = unary();
                left = make_term(SetOp{SetOpKind::Inter, left, right}, span_from(start));
            }
            else
                return left;
        }
    }

    TermPtr unary()
    {
        const Token& start = cur();
        if (is_punct("-"))
        {
            take();
            if (cur().kind == Tok::Number)
            {
                Rational v = take().number;
                return make_term(NumConst{-v}, span_from(start));
            }
            auto operand = unary();
            return make_term(NumOp{NumOpKind::Sub, make_term(NumConst{Rational(0)}, start.span), operand}, span_from(start));
        }
        return primary();
    }

    std::vector<std::string> labels()
    {
        expect_punct("{");
        std::vector<std::string> out;
        do
        {
            const Token& t = cur();
            if (t.kind == Tok::Ident && !reserved_words.contains(t.text))
                out.push_back(take().text);
            else if (t.kind == Tok::Quoted || t.kind == Tok::Number)
                out.push_back(take().text);
            else
                fail(t, "expected an item label, found " + describe(t));
        } while (is_punct(",") && (take(), true));
        expect_punct("}");
        return out;
    }

    TermPtr primary()
    {
        const Token& t = cur();
        switch (t.kind)
        {
        case Tok::Number:
            take();
            return make_term(NumConst{t.number}, t.span);
        case Tok::String:
            take();
            return make_term(PartitionConst{t.text}, t.span);
        case Tok::Quoted:
            take();
            return make_term(ItemConst{t.text}, t.span);
        case Tok::Trans:
            take();
            return make_term(TransactionConst{t.trans}, t.span);
        case Tok::Param:
            take();
            return make_term(ParamRef{t.text}, t.span);
        case Tok::Punct:
            if (t.text == "{")
            {
                auto ls = labels();
                return make_term(PatternConst{std::move(ls)}, span_from(t));
            }
            if (t.text == "(")
            {
                take();
                auto inner = term();
                expect_punct(")");
                return inner;
            }
            fail(t, "expected a term, found " + describe(t));
        case Tok::Ident:
        {
            if (reserved_words.contains(t.text))
                fail(t, "expected a term, found keyword '" + t.text + "'");
            if (t.text == "X" && peek().kind == Tok::Punct && peek().text == "[")
            {
                Index i = var_index_in_brackets();
                return make_term(Var{i}, span_from(t));
            }
            if (peek().kind == Tok::Punct && peek().text == "(")
            {
                std::string name = take().text;
                take();
                Call c{name, {}};
                if (!is_punct(")"))
                {
                    do
                    {
                        c.args.push_back(term());
                    } while (is_punct(",") && (take(), true));
                }
                expect_punct(")");
                return make_term(std::move(c), span_from(t));
            }
            take();
            if (std::find(params_.begin(), params_.end(), t.text) != params_.end())
                return make_term(ArgRef{t.text}, t.span);
            return make_term(ItemConst{t.text}, t.span);
        }
        case Tok::End:
            fail(t, "unexpected end of input");
        }
        fail(t, "expected a term");
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
    std::vector<std::string> params_;
    std::vector<std::string> bound_;
};

// --------------------------------------------------------------- printer

bool plain_label(const std::string& s)
{
    if (s.empty() || !ident_start(s[0]) || reserved_words.contains(s))
        return false;
    if (s == "t" || s == "X")
        return true;
    return std::all_of(s.begin(), s.end(), ident_char);
}

// parameter names of the definition being printed; a bare label equal to one
// of them would read back as an argument reference
thread_local const std::vector<std::string>* printing_params = nullptr;

std::string label_text(const std::string& s)
{
    const bool shadowed = printing_params && std::find(printing_params->begin(), printing_params->end(), s) != printing_params->end();
    return plain_label(s) && !shadowed ? s : "'" + s + "'";
}

std::string index_text(const Index& i)
{
    return i.is_literal() ? std::to_string(i.literal_value()) : i.name();
}

int precedence(const Term& t)
{
    if (auto n = std::get_if<NumOp>(&t.node))
        return n->op == NumOpKind::Add || n->op == NumOpKind::Sub ? 1 : 2;
    if (auto s = std::get_if<SetOp>(&t.node))
        return s->op == SetOpKind::Inter ? 2 : 1;
    return 3;
}

void print_binary(std::ostream& os, const Term& self, const Term& l, const char* op, const Term& r);

void print(std::ostream& os, const Term& t)
{
    std::visit(overloaded{
                   [&](const NumConst& c) { os << to_string(c.value); },
                   [&](const ItemConst& c) { os << label_text(c.label); },
                   [&](const PatternConst& c) {
                       os << '{';
                       for (std::size_t i = 0; i < c.labels.size(); ++i)
                           os << (i ? ", " : "") << label_text(c.labels[i]);
                       os << '}';
                   },
                   [&](const TransactionConst& c) { os << "t@" << c.index; },
                   [&](const PartitionConst& c) { os << '"' << c.name << '"'; },
                   [&](const ParamRef& p) { os << '$' << p.name; },
                   [&](const ArgRef& a) { os << a.name; },
                   [&](const Var& v) { os << "X[" << index_text(v.index) << ']'; },
                   [&](const SetOp& o) {
                       const char* op = o.op == SetOpKind::Union ? "union" : o.op == SetOpKind::Inter ? "inter" : "diff";
                       print_binary(os, t, *o.left, op, *o.right);
                   },
                   [&](const NumOp& o) {
                       const char* op = o.op == NumOpKind::Add ? "+" : o.op == NumOpKind::Sub ? "-" : o.op == NumOpKind::Mul ? "*" : "/";
                       print_binary(os, t, *o.left, op, *o.right);
                   },
                   [&](const Call& c) {
                       os << c.name << '(';
                       for (std::size_t i = 0; i < c.args.size(); ++i)
                       {
                           if (i)
                               os << ", ";
                           print(os, *c.args[i]);
                       }
                       os << ')';
                   },
               },
               t.node);
}

void print_binary(std::ostream& os, const Term& self, const Term& l, const char* op, const Term& r)
{
    const int p = precedence(self);
    const bool lp = precedence(l) < p;
    const bool rp = precedence(r) <= p;
    if (lp)
        os << '(';
    print(os, l);
    if (lp)
        os << ')';
    os << ' ' << op << ' ';
    if (rp)
        os << '(';
    print(os, r);
    if (rp)
        os << ')';
}

const char* rel_text(Rel r)
{
    switch (r)
    {
    case Rel::Lt: return "<";
    case Rel::Le: return "<=";
    case Rel::Eq: return "=";
    case Rel::Ne: return "!=";
    case Rel::Ge: return ">=";
    case Rel::Gt: return ">";
    case Rel::In: return "in";
    case Rel::NotIn: return "notin";
    case Rel::Subset: return "subset";
    case Rel::SubsetEq: return "subseteq";
    }
    return "?";
}

void print(std::ostream& os, const Formula& f);

void print_part(std::ostream& os, const Formula& f, bool in_and)
{
    bool paren = std::holds_alternative<Or>(f.node) || (in_and && std::holds_alternative<And>(f.node));
    if (paren)
        os << '(';
    print(os, f);
    if (paren)
        os << ')';
}

void print_body(std::ostream& os, const Formula& f)
{
    bool paren = std::holds_alternative<Or>(f.node) || std::holds_alternative<And>(f.node);
    if (paren)
        os << '(';
    print(os, f);
    if (paren)
        os << ')';
}

void print(std::ostream& os, const Formula& f)
{
    std::visit(overloaded{
                   [&](const TrueConst&) { os << "true"; },
                   [&](const Relation& r) {
                       print(os, *r.left);
                       os << ' ' << rel_text(r.rel) << ' ';
                       print(os, *r.right);
                   },
                   [&](const Closed& c) { os << "closed(X[" << index_text(c.var) << "])"; },
                   [&](const Global& g) {
                       os << (g.kind == GlobalKind::CoverTransactions ? "coverTransactions"
                              : g.kind == GlobalKind::CoverItems     ? "coverItems"
                                                                     : "canonical");
                       os << "([";
                       for (std::size_t i = 0; i < g.vars.size(); ++i)
                       {
                           os << (i ? ", " : "") << "X[" << index_text(g.vars[i].first);
                           if (g.vars[i].last)
                               os << ".." << index_text(*g.vars[i].last);
                           os << ']';
                       }
                       os << "])";
                   },
                   [&](const And& a) {
                       for (std::size_t i = 0; i < a.parts.size(); ++i)
                       {
                           if (i)
                               os << " and ";
                           print_part(os, *a.parts[i], true);
                       }
                   },
                   [&](const Or& o) {
                       for (std::size_t i = 0; i < o.parts.size(); ++i)
                       {
                           if (i)
                               os << " or ";
                           print_part(os, *o.parts[i], false);
                       }
                   },
                   [&](const ForAll& fa) {
                       os << "forall " << fa.var << " in " << index_text(fa.lo) << ".." << index_text(fa.hi) << ": ";
                       print_body(os, *fa.body);
                   },
                   [&](const ForAllPairs& fp) {
                       os << "forall " << fp.first << " < " << fp.second << ": ";
                       print_body(os, *fp.body);
                   },
               },
               f.node);
}

void print_bindings(std::ostream& os, const stmt::Bindings& with)
{
    if (with.empty())
        return;
    os << " with ";
    for (std::size_t i = 0; i < with.size(); ++i)
    {
        os << (i ? ", " : "") << "X[" << with[i].first << "] = {";
        for (std::size_t j = 0; j < with[i].second.size(); ++j)
            os << (j ? ", " : "") << label_text(with[i].second[j]);
        os << '}';
    }
}

} // namespace

Statement parse_statement(std::string_view text)
{
    Parser p(text);
    Statement s = p.statement();
    if (!p.at_end())
    {
        // re-lex to locate the trailing token
        auto tokens = Lexer(text).run();
        for (const auto& t : tokens)
            if (t.span.offset >= s.span.offset + s.span.length && t.kind != Tok::End)
                throw ParseError(t.span, "unexpected input after statement");
    }
    return s;
}

std::vector<Statement> parse_script(std::string_view text)
{
    Parser p(text);
    std::vector<Statement> out;
    while (!p.at_end())
        out.push_back(p.statement());
    return out;
}

bool statement_complete(std::string_view text)
{
    char quote = 0;
    bool comment = false;
    for (char c : text)
    {
        if (comment)
            comment = c != '\n';
        else if (quote)
            quote = c == quote || c == '\n' ? 0 : quote;
        else if (c == '#')
            comment = true;
        else if (c == '"' || c == '\'')
            quote = c;
        else if (c == ';')
            return true;
    }
    return false;
}

std::string print_term(const Term& t)
{
    std::ostringstream os;
    print(os, t);
    return os.str();
}

std::string print_formula(const Formula& f)
{
    std::ostringstream os;
    print(os, f);
    return os.str();
}

std::string to_string(stmt::Format f)
{
    switch (f)
    {
    case stmt::Format::Table: return "table";
    case stmt::Format::Json: return "json";
    case stmt::Format::Csv: return "csv";
    }
    return "table";
}

std::optional<stmt::Format> parse_format(std::string_view s)
{
    if (s == "table")
        return stmt::Format::Table;
    if (s == "json")
        return stmt::Format::Json;
    if (s == "csv")
        return stmt::Format::Csv;
    return std::nullopt;
}

std::string print_canonical(const Statement& s)
{
    std::ostringstream os;
    std::visit(overloaded{
                   [&](const stmt::Load& l) {
                       os << "load \"" << l.path << '"';
                       if (l.class_column)
                           os << " class " << *l.class_column;
                   },
                   [&](const stmt::Define& d) {
                       os << "define " << d.def.name << '(';
                       for (std::size_t i = 0; i < d.def.params.size(); ++i)
                           os << (i ? ", " : "") << d.def.params[i];
                       os << ") := ";
                       printing_params = &d.def.params;
                       print(os, *d.def.body);
                       printing_params = nullptr;
                   },
                   [&](const stmt::QueryDecl& q) {
                       os << "query " << q.query.name << "(k=" << q.query.k << ") := ";
                       print(os, *q.query.formula);
                   },
                   [&](const stmt::Refine& r) {
                       os << "refine " << r.name << " from " << r.base << " := ";
                       print(os, *r.extra);
                   },
                   [&](const stmt::Solve& sv) {
                       os << "solve " << sv.query;
                       if (sv.limit)
                           os << " limit " << *sv.limit;
                   },
                   [&](const stmt::Param& p) { os << "param " << p.name << " = " << to_string(p.value); },
                   [&](const stmt::Show& sh) {
                       switch (sh.what)
                       {
                       case stmt::ShowWhat::Queries: os << "show queries"; break;
                       case stmt::ShowWhat::Defs: os << "show defs"; break;
                       case stmt::ShowWhat::Params: os << "show params"; break;
                       case stmt::ShowWhat::Solutions:
                           os << "show solutions " << sh.name;
                           if (sh.limit)
                               os << " limit " << *sh.limit;
                           break;
                       }
                   },
                   [&](const stmt::Export& e) { os << "export " << e.name << " to \"" << e.path << "\" as " << to_string(e.format); },
                   [&](const stmt::Stats& st) { os << "stats " << st.name; },
                   [&](const stmt::Quit&) { os << "quit"; },
                   [&](const stmt::Eval& e) {
                       os << "eval ";
                       print(os, *e.term);
                       print_bindings(os, e.with);
                   },
                   [&](const stmt::Check& c) {
                       os << "check ";
                       print(os, *c.formula);
                       print_bindings(os, c.with);
                   },
               },
               s.node);
    os << ';';
    return os.str();
}

bool equal(const Statement& a, const Statement& b)
{
    if (a.node.index() != b.node.index())
        return false;
    return std::visit(
        overloaded{
            [&](const stmt::Load& x) {
                const auto& y = std::get<stmt::Load>(b.node);
                return x.path == y.path && x.class_column == y.class_column;
            },
            [&](const stmt::Define& x) { return equal(x.def, std::get<stmt::Define>(b.node).def); },
            [&](const stmt::QueryDecl& x) { return equal(x.query, std::get<stmt::QueryDecl>(b.node).query); },
            [&](const stmt::Refine& x) {
                const auto& y = std::get<stmt::Refine>(b.node);
                return x.name == y.name && x.base == y.base && equal(x.extra, y.extra);
            },
            [&](const stmt::Solve& x) {
                const auto& y = std::get<stmt::Solve>(b.node);
                return x.query == y.query && x.limit == y.limit;
            },
            [&](const stmt::Param& x) {
                const auto& y = std::get<stmt::Param>(b.node);
                return x.name == y.name && x.value == y.value;
            },
            [&](const stmt::Show& x) {
                const auto& y = std::get<stmt::Show>(b.node);
                return x.what == y.what && x.name == y.name && x.limit == y.limit;
            },
            [&](const stmt::Export& x) {
                const auto& y = std::get<stmt::Export>(b.node);
                return x.name == y.name && x.path == y.path && x.format == y.format;
            },
            [&](const stmt::Stats& x) { return x.name == std::get<stmt::Stats>(b.node).name; },
            [&](const stmt::Quit&) { return true; },
            [&](const stmt::Eval& x) {
                const auto& y = std::get<stmt::Eval>(b.node);
                return equal(x.term, y.term) && x.with == y.with;
            },
            [&](const stmt::Check& x) {
                const auto& y = std::get<stmt::Check>(b.node);
                return equal(x.formula, y.formula) && x.with == y.with;
            },
        },
        a.node);
}

} // namespace patmine
