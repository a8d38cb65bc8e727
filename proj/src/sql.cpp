#include "sheetloop/sql.hpp"

#include <algorithm>
#include <cctype>
#include <cstring>
#include <map>
#include <set>

namespace sheetloop::sql {

namespace {

using Kind = SqlError::Kind;

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool ieq(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(a[i])) !=
            std::tolower(static_cast<unsigned char>(b[i]))) {
            return false;
        }
    }
    return true;
}

struct Token {
    enum class Type { Ident, Number, String, Op, LParen, RParen, Comma, Star, End };
    Type type = Type::End;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& cur() const { return cur_; }

    void advance() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        cur_ = Token{};
        if (i_ >= src_.size()) return;
        char c = src_[i_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t start = i_;
            while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                        src_[i_] == '_')) {
                ++i_;
            }
            cur_ = {Token::Type::Ident, std::string(src_.substr(start, i_ - start))};
            return;
        }
        if (c == '"' || c == '`') {
            char close = c;
            ++i_;
            std::string name;
            while (i_ < src_.size() && src_[i_] != close) name.push_back(src_[i_++]);
            if (i_ >= src_.size()) throw SqlError(Kind::Parse, "unterminated quoted identifier");
            ++i_;
            cur_ = {Token::Type::Ident, std::move(name)};
            return;
        }
        if (c == '\'') {
            ++i_;
            std::string s;
            while (i_ < src_.size()) {
                if (src_[i_] == '\'') {
                    if (i_ + 1 < src_.size() && src_[i_ + 1] == '\'') {
                        s.push_back('\'');
                        i_ += 2;
                        continue;
                    }
                    ++i_;
                    cur_ = {Token::Type::String, std::move(s)};
                    return;
                }
                s.push_back(src_[i_++]);
            }
            throw SqlError(Kind::Parse, "unterminated string literal");
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && i_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
            size_t start = i_;
            if (c == '-') ++i_;
            while (i_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[i_])) ||
                                        src_[i_] == '.')) {
                ++i_;
            }
            cur_ = {Token::Type::Number, std::string(src_.substr(start, i_ - start))};
            return;
        }
        switch (c) {
            case '(': ++i_; cur_ = {Token::Type::LParen, "("}; return;
            case ')': ++i_; cur_ = {Token::Type::RParen, ")"}; return;
            case ',': ++i_; cur_ = {Token::Type::Comma, ","}; return;
            case '*': ++i_; cur_ = {Token::Type::Star, "*"}; return;
            case ';':
                ++i_;
                // a single trailing semicolon is tolerated
                advance();
                if (cur_.type != Token::Type::End) {
                    throw SqlError(Kind::Parse, "content after ';'");
                }
                return;
            default: break;
        }
        for (const char* op : {"<=", ">=", "<>", "!=", "=", "<", ">"}) {
            size_t len = std::strlen(op);
            if (src_.substr(i_, len) == op) {
                i_ += len;
                cur_ = {Token::Type::Op, op};
                return;
            }
        }
        throw SqlError(Kind::Parse, std::string("unexpected character '") + c + "'");
    }

private:
    std::string_view src_;
    size_t i_ = 0;
    Token cur_;
};

// Constructs rejected at parse time so nothing outside the subset ever
// half-executes.
const std::set<std::string>& forbidden_keywords() {
    static const std::set<std::string> kw = {
        "join",   "inner", "outer",  "left",  "right",  "union", "having", "over",
        "window", "case",  "exists", "insert", "update", "delete", "create", "drop",
        "alter",  "with",  "offset",
    };
    return kw;
}

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src), src_(src) {}

    Query parse() {
        Query q;
        q.source_text = std::string(src_);
        expect_kw("SELECT");
        if (is_kw("DISTINCT")) {
            next();
            q.distinct = true;
        }
        parse_select_list(q);
        expect_kw("FROM");
        q.table = need_ident("table name");
        check_not_forbidden();
        if (is_kw("WHERE")) {
            next();
            q.where = parse_or();
        }
        if (is_kw("GROUP")) {
            next();
            expect_kw("BY");
            q.group_by.push_back(need_ident("column"));
            while (cur().type == Token::Type::Comma) {
                next();
                q.group_by.push_back(need_ident("column"));
            }
        }
        if (is_kw("ORDER")) {
            next();
            expect_kw("BY");
            q.order_by.push_back(parse_order_key());
            while (cur().type == Token::Type::Comma) {
                next();
                q.order_by.push_back(parse_order_key());
            }
        }
        if (is_kw("LIMIT")) {
            next();
            if (cur().type != Token::Type::Number) {
                throw SqlError(Kind::Parse, "LIMIT expects a number");
            }
            q.limit = std::stol(cur().text);
            if (*q.limit < 0) throw SqlError(Kind::Parse, "LIMIT must be >= 0");
            next();
        }
        if (cur().type != Token::Type::End) {
            check_not_forbidden();
            throw SqlError(Kind::Parse, "unexpected token '" + cur().text + "'");
        }
        validate(q);
        return q;
    }

private:
    Lexer lex_;
    std::string_view src_;

    const Token& cur() const { return lex_.cur(); }
    void next() { lex_.advance(); }

    bool is_kw(const char* kw) const {
        return cur().type == Token::Type::Ident && ieq(cur().text, kw);
    }

    void expect_kw(const char* kw) {
        if (!is_kw(kw)) {
            throw SqlError(Kind::Parse, std::string("expected ") + kw +
                                            (cur().text.empty() ? "" : ", got '" + cur().text + "'"));
        }
        next();
    }

    void check_not_forbidden() {
        if (cur().type == Token::Type::Ident &&
            forbidden_keywords().count(lower(cur().text))) {
            throw SqlError(Kind::Parse,
                           "'" + cur().text + "' is outside the supported SQL subset");
        }
    }

    std::string need_ident(const char* what) {
        if (cur().type != Token::Type::Ident) {
            throw SqlError(Kind::Parse, std::string("expected ") + what);
        }
        // reserved words cannot be bare identifiers
        if (forbidden_keywords().count(lower(cur().text))) {
            throw SqlError(Kind::Parse,
                           "'" + cur().text + "' is outside the supported SQL subset");
        }
        std::string name = cur().text;
        next();
        return name;
    }

    static SelectItem::Agg agg_from(const std::string& name) {
        std::string l = lower(name);
        if (l == "count") return SelectItem::Agg::Count;
        if (l == "sum") return SelectItem::Agg::Sum;
        if (l == "avg") return SelectItem::Agg::Avg;
        if (l == "min") return SelectItem::Agg::Min;
        if (l == "max") return SelectItem::Agg::Max;
        return SelectItem::Agg::None;
    }

    void parse_select_list(Query& q) {
        if (cur().type == Token::Type::Star) {
            next();
            q.select_star = true;
            return;
        }
        q.items.push_back(parse_select_item());
        while (cur().type == Token::Type::Comma) {
            next();
            q.items.push_back(parse_select_item());
        }
    }

    SelectItem parse_select_item() {
        if (cur().type != Token::Type::Ident) {
            throw SqlError(Kind::Parse, "expected column or aggregate in select list");
        }
        std::string name = cur().text;
        SelectItem::Agg agg = agg_from(name);
        next();
        SelectItem item;
        if (agg != SelectItem::Agg::None && cur().type == Token::Type::LParen) {
            next();
            item.agg = agg;
            if (cur().type == Token::Type::Star) {
                if (agg != SelectItem::Agg::Count) {
                    throw SqlError(Kind::Parse, "'*' is only valid in COUNT(*)");
                }
                item.count_star = true;
                next();
            } else {
                item.column = need_ident("column");
            }
            if (cur().type != Token::Type::RParen) throw SqlError(Kind::Parse, "expected ')'");
            next();
            return item;
        }
        if (cur().type == Token::Type::LParen) {
            throw SqlError(Kind::Parse, "'" + name + "(...)' is outside the supported subset");
        }
        item.column = name;
        return item;
    }

    OrderKey parse_order_key() {
        OrderKey k;
        k.column = need_ident("column");
        if (is_kw("ASC")) {
            next();
        } else if (is_kw("DESC")) {
            k.asc = false;
            next();
        }
        return k;
    }

    Scalar parse_literal() {
        if (cur().type == Token::Type::Number) {
            Decimal d;
            if (!Decimal::try_parse(cur().text, d)) {
                throw SqlError(Kind::Parse, "bad number '" + cur().text + "'");
            }
            next();
            return d;
        }
        if (cur().type == Token::Type::String) {
            std::string s = cur().text;
            next();
            return s;
        }
        if (is_kw("TRUE")) {
            next();
            return true;
        }
        if (is_kw("FALSE")) {
            next();
            return false;
        }
        if (is_kw("NULL")) {
            next();
            return EmptyCell{};
        }
        throw SqlError(Kind::Parse, "expected a literal");
    }

    Operand parse_operand() {
        if (cur().type == Token::Type::Ident && !is_kw("TRUE") && !is_kw("FALSE") &&
            !is_kw("NULL")) {
            check_not_forbidden();
            ColumnRef c{cur().text};
            next();
            return c;
        }
        return parse_literal();
    }

    std::unique_ptr<Expr> parse_or() {
        auto left = parse_and();
        while (is_kw("OR")) {
            next();
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::Or;
            node->a = std::move(left);
            node->b = parse_and();
            left = std::move(node);
        }
        return left;
    }

    std::unique_ptr<Expr> parse_and() {
        auto left = parse_not();
        while (is_kw("AND")) {
            next();
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::And;
            node->a = std::move(left);
            node->b = parse_not();
            left = std::move(node);
        }
        return left;
    }

    std::unique_ptr<Expr> parse_not() {
        if (is_kw("NOT")) {
            next();
            auto node = std::make_unique<Expr>();
            node->kind = Expr::Kind::Not;
            node->a = parse_not();
            return node;
        }
        return parse_predicate();
    }

    std::unique_ptr<Expr> parse_predicate() {
        if (cur().type == Token::Type::LParen) {
            next();
            auto inner = parse_or();
            if (cur().type != Token::Type::RParen) throw SqlError(Kind::Parse, "expected ')'");
            next();
            return inner;
        }
        auto node = std::make_unique<Expr>();
        node->lhs = parse_operand();

        bool negated = false;
        if (is_kw("NOT")) {
            next();
            negated = true;
        }
        if (is_kw("LIKE")) {
            next();
            if (cur().type != Token::Type::String) {
                throw SqlError(Kind::Parse, "LIKE expects a string pattern");
            }
            node->kind = Expr::Kind::Like;
            node->pattern = cur().text;
            node->negated = negated;
            next();
            return node;
        }
        if (is_kw("IN")) {
            next();
            if (cur().type != Token::Type::LParen) throw SqlError(Kind::Parse, "expected '('");
            next();
            node->kind = Expr::Kind::In;
            node->negated = negated;
            node->list.push_back(parse_literal());
            while (cur().type == Token::Type::Comma) {
                next();
                node->list.push_back(parse_literal());
            }
            if (cur().type != Token::Type::RParen) throw SqlError(Kind::Parse, "expected ')'");
            next();
            return node;
        }
        if (is_kw("BETWEEN")) {
            next();
            node->kind = Expr::Kind::Between;
            node->negated = negated;
            node->lo = parse_literal();
            expect_kw("AND");
            node->hi = parse_literal();
            return node;
        }
        if (negated) {
            throw SqlError(Kind::Parse, "NOT must precede LIKE, IN or BETWEEN here");
        }
        if (cur().type != Token::Type::Op) {
            throw SqlError(Kind::Parse, "expected a comparison operator" +
                                            (cur().text.empty() ? "" : ", got '" + cur().text + "'"));
        }
        node->kind = Expr::Kind::Cmp;
        node->op = cur().text;
        next();
        node->rhs = parse_operand();
        return node;
    }

    static void collect_columns(const Expr* e, std::vector<std::string>& out) {
        if (!e) return;
        collect_columns(e->a.get(), out);
        collect_columns(e->b.get(), out);
        if (const auto* c = std::get_if<ColumnRef>(&e->lhs)) out.push_back(c->name);
        if (const auto* c = std::get_if<ColumnRef>(&e->rhs)) out.push_back(c->name);
    }

    void validate(const Query& q) {
        bool has_agg = std::any_of(q.items.begin(), q.items.end(), [](const SelectItem& i) {
            return i.agg != SelectItem::Agg::None;
        });
        if (!q.group_by.empty()) {
            // plain select items must be group keys
            for (const auto& item : q.items) {
                if (item.agg != SelectItem::Agg::None) continue;
                bool in_group =
                    std::any_of(q.group_by.begin(), q.group_by.end(),
                                [&](const std::string& g) { return ieq(g, item.column); });
                if (!in_group) {
                    throw SqlError(Kind::Parse, "column '" + item.column +
                                                    "' must appear in GROUP BY or an aggregate");
                }
            }
            if (q.select_star) {
                throw SqlError(Kind::Parse, "SELECT * cannot be combined with GROUP BY");
            }
        }
        if (has_agg && q.select_star) {
            throw SqlError(Kind::Parse, "SELECT * cannot be combined with aggregates");
        }
    }
};

// ---- execution ----

int column_or_throw(const Table& t, const std::string& name) {
    int idx = t.find_column(name);
    if (idx < 0) {
        std::string cols;
        for (const auto& c : t.columns) {
            if (!cols.empty()) cols += ", ";
            cols += c;
        }
        throw SqlError(Kind::Runtime, "no column '" + name + "' (have: " + cols + ")");
    }
    return idx;
}

Scalar operand_value(const Operand& op, const Table& t, const std::vector<Scalar>& row) {
    if (const auto* c = std::get_if<ColumnRef>(&op)) {
        return row[static_cast<size_t>(column_or_throw(t, c->name))];
    }
    return std::get<Scalar>(op);
}

std::optional<DateTime> as_datetime_like(const Scalar& v) {
    if (const auto* d = std::get_if<Date>(&v)) return DateTime{*d, 0, 0, 0};
    if (const auto* dt = std::get_if<DateTime>(&v)) return *dt;
    if (const auto* s = std::get_if<std::string>(&v)) {
        if (auto d = Date::parse(*s)) return DateTime{*d, 0, 0, 0};
        if (auto dt = DateTime::parse(*s)) return *dt;
    }
    return std::nullopt;
}

// Three-way comparison with SQL-subset coercions. Returns nullopt when a
// side is empty (predicate then evaluates false).
std::optional<int> sql_compare(const Scalar& a, const Scalar& b, bool ordering) {
    ValueKind ka = scalar_kind(a), kb = scalar_kind(b);
    if (ka == ValueKind::Empty || kb == ValueKind::Empty) return std::nullopt;
    if (ka == kb && !(ordering && ka == ValueKind::Text)) {
        return compare_scalars(a, b);
    }
    // date/datetime vs text that parses as a date
    bool a_dateish = ka == ValueKind::Date || ka == ValueKind::DateTime;
    bool b_dateish = kb == ValueKind::Date || kb == ValueKind::DateTime;
    if (a_dateish || b_dateish) {
        auto da = as_datetime_like(a);
        auto db = as_datetime_like(b);
        if (da && db) {
            if (*da < *db) return -1;
            if (*db < *da) return 1;
            return 0;
        }
        throw SqlError(Kind::Runtime,
                       std::string("cannot compare ") + to_string(ka) + " with " + to_string(kb));
    }
    if (ka == ValueKind::Text && kb == ValueKind::Text) {
        if (ordering) {
            // Ordering text that is date-shaped on both sides compares
            // chronologically (incoherent-format tolerance).
            auto da = as_datetime_like(a);
            auto db = as_datetime_like(b);
            if (da && db) {
                if (*da < *db) return -1;
                if (*db < *da) return 1;
                return 0;
            }
        }
        return compare_scalars(a, b);
    }
    throw SqlError(Kind::Runtime,
                   std::string("cannot compare ") + to_string(ka) + " with " + to_string(kb));
}

bool like_match(const std::string& text, const std::string& pattern) {
    std::string t = lower(text), p = lower(pattern);
    // classic two-pointer wildcard match, '%' = any run, '_' = one char
    size_t ti = 0, pi = 0, star = std::string::npos, match = 0;
    while (ti < t.size()) {
        if (pi < p.size() && (p[pi] == '_' || p[pi] == t[ti])) {
            ++ti;
            ++pi;
        } else if (pi < p.size() && p[pi] == '%') {
            star = pi++;
            match = ti;
        } else if (star != std::string::npos) {
            pi = star + 1;
            ti = ++match;
        } else {
            return false;
        }
    }
    while (pi < p.size() && p[pi] == '%') ++pi;
    return pi == p.size();
}

bool eval_expr(const Expr* e, const Table& t, const std::vector<Scalar>& row) {
    switch (e->kind) {
        case Expr::Kind::And: return eval_expr(e->a.get(), t, row) && eval_expr(e->b.get(), t, row);
        case Expr::Kind::Or: return eval_expr(e->a.get(), t, row) || eval_expr(e->b.get(), t, row);
        case Expr::Kind::Not: return !eval_expr(e->a.get(), t, row);
        case Expr::Kind::Cmp: {
            Scalar a = operand_value(e->lhs, t, row);
            Scalar b = operand_value(e->rhs, t, row);
            bool ordering = e->op != "=" && e->op != "!=" && e->op != "<>";
            auto c = sql_compare(a, b, ordering);
            if (!c) return false;
            if (e->op == "=") return *c == 0;
            if (e->op == "!=" || e->op == "<>") return *c != 0;
            if (e->op == "<") return *c < 0;
            if (e->op == "<=") return *c <= 0;
            if (e->op == ">") return *c > 0;
            return *c >= 0;
        }
        case Expr::Kind::Like: {
            Scalar v = operand_value(e->lhs, t, row);
            if (std::holds_alternative<EmptyCell>(v)) return false;
            bool hit = like_match(scalar_display(v), e->pattern);
            return e->negated ? !hit : hit;
        }
        case Expr::Kind::In: {
            Scalar v = operand_value(e->lhs, t, row);
            if (std::holds_alternative<EmptyCell>(v)) return false;
            bool hit = false;
            for (const auto& cand : e->list) {
                auto c = sql_compare(v, cand, false);
                if (c && *c == 0) {
                    hit = true;
                    break;
                }
            }
            return e->negated ? !hit : hit;
        }
        case Expr::Kind::Between: {
            Scalar v = operand_value(e->lhs, t, row);
            if (std::holds_alternative<EmptyCell>(v)) return false;
            auto clo = sql_compare(v, e->lo, true);
            auto chi = sql_compare(v, e->hi, true);
            bool hit = clo && chi && *clo >= 0 && *chi <= 0;
            return e->negated ? !hit : hit;
        }
    }
    return false;
}

Decimal sum_numeric(const std::vector<const std::vector<Scalar>*>& rows, int col, int& count) {
    Decimal acc(0);
    count = 0;
    for (const auto* row : rows) {
        if (const auto* d = std::get_if<Decimal>(&(*row)[col])) {
            acc = acc + *d;
            ++count;
        }
    }
    return acc;
}

Scalar compute_aggregate(const SelectItem& item, const Table& t,
                         const std::vector<const std::vector<Scalar>*>& rows) {
    if (item.agg == SelectItem::Agg::Count) {
        if (item.count_star) return Decimal(static_cast<std::int64_t>(rows.size()));
        int col = column_or_throw(t, item.column);
        std::int64_t n = std::count_if(rows.begin(), rows.end(), [&](const auto* row) {
            return !std::holds_alternative<EmptyCell>((*row)[col]);
        });
        return Decimal(n);
    }
    int col = column_or_throw(t, item.column);
    if (item.agg == SelectItem::Agg::Sum || item.agg == SelectItem::Agg::Avg) {
        int count = 0;
        Decimal acc = sum_numeric(rows, col, count);
        if (count == 0) return EmptyCell{};
        if (item.agg == SelectItem::Agg::Sum) return acc;
        return acc / Decimal(count);
    }
    // MIN/MAX over non-empty values with the deterministic scalar order
    std::optional<Scalar> best;
    for (const auto* row : rows) {
        const Scalar& v = (*row)[col];
        if (std::holds_alternative<EmptyCell>(v)) continue;
        if (!best) {
            best = v;
            continue;
        }
        int c = compare_scalars(v, *best);
        if (item.agg == SelectItem::Agg::Min ? c < 0 : c > 0) best = v;
    }
    return best ? *best : Scalar{EmptyCell{}};
}

std::string agg_label(const SelectItem& item, const Table& t) {
    static const std::map<SelectItem::Agg, std::string> names = {
        {SelectItem::Agg::Count, "COUNT"}, {SelectItem::Agg::Sum, "SUM"},
        {SelectItem::Agg::Avg, "AVG"},     {SelectItem::Agg::Min, "MIN"},
        {SelectItem::Agg::Max, "MAX"},
    };
    if (item.count_star) return "COUNT(*)";
    int col = column_or_throw(t, item.column);
    return names.at(item.agg) + "(" + t.columns[col] + ")";
}

}  // namespace

int Table::find_column(std::string_view name) const {
    for (size_t i = 0; i < columns.size(); ++i) {
        if (ieq(columns[i], name)) return static_cast<int>(i);
    }
    return -1;
}

Query parse_sql(std::string_view text) {
    Parser p(text);
    return p.parse();
}

Table execute_sql(const Query& q, const Table& table) {
    // WHERE
    std::vector<const std::vector<Scalar>*> filtered;
    for (const auto& row : table.rows) {
        if (!q.where || eval_expr(q.where.get(), table, row)) filtered.push_back(&row);
    }

    Table out;
    out.name = "result";

    if (!q.group_by.empty() ||
        std::any_of(q.items.begin(), q.items.end(),
                    [](const SelectItem& i) { return i.agg != SelectItem::Agg::None; })) {
        // Grouped/aggregate path. Groups keep first-occurrence order.
        std::vector<int> key_cols;
        for (const auto& g : q.group_by) key_cols.push_back(column_or_throw(table, g));

        std::vector<std::vector<Scalar>> group_keys;
        std::vector<std::vector<const std::vector<Scalar>*>> groups;
        for (const auto* row : filtered) {
            std::vector<Scalar> key;
            for (int c : key_cols) key.push_back((*row)[c]);
            size_t gi = 0;
            for (; gi < group_keys.size(); ++gi) {
                bool same = true;
                for (size_t k = 0; k < key.size(); ++k) {
                    if (compare_scalars(group_keys[gi][k], key[k]) != 0 ||
                        scalar_kind(group_keys[gi][k]) != scalar_kind(key[k])) {
                        same = false;
                        break;
                    }
                }
                if (same) break;
            }
            if (gi == group_keys.size()) {
                group_keys.push_back(key);
                groups.emplace_back();
            }
            groups[gi].push_back(row);
        }
        if (q.group_by.empty()) {
            // aggregates without GROUP BY form a single group (possibly empty)
            group_keys.assign(1, {});
            groups.assign(1, filtered);
        }

        for (const auto& item : q.items) {
            if (item.agg == SelectItem::Agg::None) {
                out.columns.push_back(table.columns[column_or_throw(table, item.column)]);
            } else {
                out.columns.push_back(agg_label(item, table));
            }
        }
        for (size_t gi = 0; gi < groups.size(); ++gi) {
            std::vector<Scalar> row;
            for (const auto& item : q.items) {
                if (item.agg == SelectItem::Agg::None) {
                    int col = column_or_throw(table, item.column);
                    row.push_back((*groups[gi].front())[col]);
                } else {
                    row.push_back(compute_aggregate(item, table, groups[gi]));
                }
            }
            out.rows.push_back(std::move(row));
        }
    } else {
        // Plain projection. ORDER BY keys resolve against the source table
        // so sorting by an unselected column works.
        if (!q.order_by.empty()) {
            std::vector<int> key_cols;
            std::vector<bool> asc;
            for (const auto& k : q.order_by) {
                key_cols.push_back(column_or_throw(table, k.column));
                asc.push_back(k.asc);
            }
            std::stable_sort(filtered.begin(), filtered.end(),
                             [&](const std::vector<Scalar>* a, const std::vector<Scalar>* b) {
                                 for (size_t i = 0; i < key_cols.size(); ++i) {
                                     int c = compare_scalars((*a)[key_cols[i]],
                                                             (*b)[key_cols[i]]);
                                     if (c != 0) return asc[i] ? c < 0 : c > 0;
                                 }
                                 return false;
                             });
        }
        std::vector<int> cols;
        if (q.select_star) {
            out.columns = table.columns;
            for (size_t i = 0; i < table.columns.size(); ++i) cols.push_back(static_cast<int>(i));
        } else {
            for (const auto& item : q.items) {
                int c = column_or_throw(table, item.column);
                cols.push_back(c);
                out.columns.push_back(table.columns[c]);
            }
        }
        for (const auto* row : filtered) {
            std::vector<Scalar> projected;
            projected.reserve(cols.size());
            for (int c : cols) projected.push_back((*row)[c]);
            out.rows.push_back(std::move(projected));
        }
    }

    if (q.distinct) {
        std::vector<std::vector<Scalar>> unique;
        for (auto& row : out.rows) {
            bool dup = std::any_of(unique.begin(), unique.end(), [&](const auto& other) {
                for (size_t i = 0; i < row.size(); ++i) {
                    if (compare_scalars(other[i], row[i]) != 0 ||
                        scalar_kind(other[i]) != scalar_kind(row[i])) {
                        return false;
                    }
                }
                return true;
            });
            if (!dup) unique.push_back(std::move(row));
        }
        out.rows = std::move(unique);
    }

    bool grouped = !q.group_by.empty() ||
                   std::any_of(q.items.begin(), q.items.end(), [](const SelectItem& i) {
                       return i.agg != SelectItem::Agg::None;
                   });
    if (grouped && !q.order_by.empty()) {
        // Grouped output orders by its own (key/aggregate) columns.
        std::vector<int> key_cols;
        std::vector<bool> asc;
        for (const auto& k : q.order_by) {
            key_cols.push_back(column_or_throw(out, k.column));
            asc.push_back(k.asc);
        }
        std::stable_sort(out.rows.begin(), out.rows.end(),
                         [&](const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
                             for (size_t i = 0; i < key_cols.size(); ++i) {
                                 int c = compare_scalars(a[key_cols[i]], b[key_cols[i]]);
                                 if (c != 0) return asc[i] ? c < 0 : c > 0;
                             }
                             return false;
                         });
    }

    if (q.limit && static_cast<long>(out.rows.size()) > *q.limit) {
        out.rows.resize(static_cast<size_t>(*q.limit));
    }
    return out;
}

}  // namespace sheetloop::sql
