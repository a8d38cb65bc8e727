#include "sheetloop/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <optional>
#include <vector>

namespace sheetloop {

namespace {

using Kind = FormulaError::Kind;

struct Token {
    enum class Type { Number, String, Ident, Op, LParen, RParen, Comma, End };
    Type type = Type::End;
    std::string text;
    Decimal number;
    size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        Token t;
        t.pos = i_;
        if (i_ >= src_.size()) return t;
        char c = src_[i_];
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i_ + 1 < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
            size_t start = i_;
            while (i_ < src_.size() &&
                   (std::isdigit(static_cast<unsigned char>(src_[i_])) || src_[i_] == '.')) {
                ++i_;
            }
            t.type = Token::Type::Number;
            t.text = std::string(src_.substr(start, i_ - start));
            if (!Decimal::try_parse(t.text, t.number)) {
                throw FormulaError(Kind::Syntax, "bad number '" + t.text + "'");
            }
            return t;
        }
        if (c == '"') {
            ++i_;
            std::string s;
            while (i_ < src_.size()) {
                if (src_[i_] == '"') {
                    if (i_ + 1 < src_.size() && src_[i_ + 1] == '"') {
                        s.push_back('"');
                        i_ += 2;
                        continue;
                    }
                    ++i_;
                    t.type = Token::Type::String;
                    t.text = std::move(s);
                    return t;
                }
                s.push_back(src_[i_++]);
            }
            throw FormulaError(Kind::Syntax, "unterminated string literal");
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\'') {
            // Identifier, function name, or (possibly sheet-qualified) reference.
            size_t start = i_;
            if (c == '\'') {
                ++i_;
                while (i_ < src_.size() && src_[i_] != '\'') ++i_;
                if (i_ < src_.size()) ++i_;
            }
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_' ||
                    src_[i_] == '!' || src_[i_] == ':' || src_[i_] == '\'')) {
                ++i_;
            }
            t.type = Token::Type::Ident;
            t.text = std::string(src_.substr(start, i_ - start));
            return t;
        }
        switch (c) {
            case '(': ++i_; t.type = Token::Type::LParen; return t;
            case ')': ++i_; t.type = Token::Type::RParen; return t;
            case ',': ++i_; t.type = Token::Type::Comma; return t;
            default: break;
        }
        static const std::string two_char[] = {"<=", ">=", "<>"};
        for (const auto& op : two_char) {
            if (src_.substr(i_, 2) == op) {
                i_ += 2;
                t.type = Token::Type::Op;
                t.text = op;
                return t;
            }
        }
        if (std::string("+-*/=<>").find(c) != std::string::npos) {
            ++i_;
            t.type = Token::Type::Op;
            t.text = std::string(1, c);
            return t;
        }
        throw FormulaError(Kind::Syntax, std::string("unexpected character '") + c + "'");
    }

private:
    std::string_view src_;
    size_t i_ = 0;
};

struct UnknownFunction {
    std::string name;
};

class Evaluator {
public:
    Evaluator(const Workbook& wb, const std::string& host) : wb_(wb), host_(host) {}

    FormulaOutcome run(std::string_view source) {
        if (source.empty() || source[0] != '=') {
            throw FormulaError(Kind::Syntax, "formula must start with '='");
        }
        lexer_ = Lexer(source.substr(1));
        advance();
        try {
            Scalar v = parse_comparison();
            expect_end();
            return {v, true};
        } catch (const UnknownFunction&) {
            return {EmptyCell{}, false};
        }
    }

private:
    const Workbook& wb_;
    std::string host_;
    Lexer lexer_{std::string_view{}};
    Token cur_;

    void advance() { cur_ = lexer_.next(); }

    void expect_end() {
        if (cur_.type != Token::Type::End) {
            throw FormulaError(Kind::Syntax, "unexpected trailing token '" + cur_.text + "'");
        }
    }

    static Decimal to_number(const Scalar& s) {
        if (const auto* d = std::get_if<Decimal>(&s)) return *d;
        if (std::holds_alternative<EmptyCell>(s)) return Decimal(0);
        if (const auto* b = std::get_if<bool>(&s)) return Decimal(*b ? 1 : 0);
        throw FormulaError(Kind::Type, "expected a number, got " +
                                            std::string(to_string(scalar_kind(s))));
    }

    Scalar parse_comparison() {
        Scalar left = parse_additive();
        if (cur_.type == Token::Type::Op &&
            (cur_.text == "=" || cur_.text == "<>" || cur_.text == "<" || cur_.text == "<=" ||
             cur_.text == ">" || cur_.text == ">=")) {
            std::string op = cur_.text;
            advance();
            Scalar right = parse_additive();
            return compare(left, right, op);
        }
        return left;
    }

    Scalar compare(const Scalar& a, const Scalar& b, const std::string& op) {
        int c;
        ValueKind ka = scalar_kind(a), kb = scalar_kind(b);
        if (ka == kb || ka == ValueKind::Empty || kb == ValueKind::Empty) {
            if (ka == ValueKind::Empty && kb == ValueKind::Text) {
                c = std::string().compare(std::get<std::string>(b));
                c = c < 0 ? -1 : (c > 0 ? 1 : 0);
            } else if (kb == ValueKind::Empty && ka == ValueKind::Text) {
                c = std::get<std::string>(a).compare(std::string());
                c = c < 0 ? -1 : (c > 0 ? 1 : 0);
            } else if (ka == ValueKind::Empty || kb == ValueKind::Empty) {
                c = to_number(a).compare(to_number(b));
            } else {
                c = compare_scalars(a, b);
            }
        } else if ((ka == ValueKind::Number || ka == ValueKind::Bool) &&
                   (kb == ValueKind::Number || kb == ValueKind::Bool)) {
            c = to_number(a).compare(to_number(b));
        } else {
            throw FormulaError(Kind::Type, "cannot compare " + std::string(to_string(ka)) +
                                                " with " + to_string(kb));
        }
        bool r = false;
        if (op == "=") r = c == 0;
        else if (op == "<>") r = c != 0;
        else if (op == "<") r = c < 0;
        else if (op == "<=") r = c <= 0;
        else if (op == ">") r = c > 0;
        else r = c >= 0;
        return r;
    }

    Scalar parse_additive() {
        Scalar v = parse_term();
        while (cur_.type == Token::Type::Op && (cur_.text == "+" || cur_.text == "-")) {
            bool add = cur_.text == "+";
            advance();
            Scalar rhs = parse_term();
            Decimal l = to_number(v), r = to_number(rhs);
            v = add ? l + r : l - r;
        }
        return v;
    }

    Scalar parse_term() {
        Scalar v = parse_factor();
        while (cur_.type == Token::Type::Op && (cur_.text == "*" || cur_.text == "/")) {
            bool mul = cur_.text == "*";
            advance();
            Scalar rhs = parse_factor();
            Decimal l = to_number(v), r = to_number(rhs);
            if (!mul && r.is_zero()) throw FormulaError(Kind::Runtime, "division by zero");
            v = mul ? l * r : l / r;
        }
        return v;
    }

    Scalar parse_factor() {
        if (cur_.type == Token::Type::Op && (cur_.text == "-" || cur_.text == "+")) {
            bool neg = cur_.text == "-";
            advance();
            Scalar v = parse_factor();
            Decimal d = to_number(v);
            return neg ? -d : d;
        }
        return parse_primary();
    }

    Scalar parse_primary() {
        switch (cur_.type) {
            case Token::Type::Number: {
                Decimal d = cur_.number;
                advance();
                return d;
            }
            case Token::Type::String: {
                std::string s = cur_.text;
                advance();
                return s;
            }
            case Token::Type::LParen: {
                advance();
                Scalar v = parse_comparison();
                if (cur_.type != Token::Type::RParen) {
                    throw FormulaError(Kind::Syntax, "missing ')'");
                }
                advance();
                return v;
            }
            case Token::Type::Ident:
                return parse_ident();
            default:
                throw FormulaError(Kind::Syntax, "unexpected token");
        }
    }

    Scalar parse_ident() {
        std::string name = cur_.text;
        advance();
        if (cur_.type == Token::Type::LParen) {
            return call_function(name);
        }
        std::string upper = name;
        std::transform(upper.begin(), upper.end(), upper.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        if (upper == "TRUE") return true;
        if (upper == "FALSE") return false;
        // Plain reference (single cell only in scalar position).
        if (auto cell = parse_cell_ref(name)) {
            return resolve_cell(*cell);
        }
        if (parse_range_ref(name)) {
            throw FormulaError(Kind::Type, "range reference not valid here: " + name);
        }
        throw FormulaError(Kind::BadRef, "unresolved reference '" + name + "'");
    }

    Scalar resolve_cell(const CellRef& ref) {
        const std::string& sheet_name = ref.sheet.empty() ? host_ : ref.sheet;
        const Sheet* s = wb_.find_sheet(sheet_name);
        if (!s) throw FormulaError(Kind::BadRef, "no sheet named '" + sheet_name + "'");
        return s->cell(ref.row, ref.col).scalar();
    }

    // One function argument: either a range reference or a scalar expression.
    struct Arg {
        std::optional<RangeRef> range;
        Scalar value = EmptyCell{};
    };

    Arg parse_arg() {
        if (cur_.type == Token::Type::Ident) {
            if (auto range = parse_range_ref(cur_.text)) {
                if (range->row1 != range->row2 || range->col1 != range->col2 ||
                    cur_.text.find(':') != std::string::npos) {
                    advance();
                    return Arg{*range, EmptyCell{}};
                }
            }
        }
        Arg a;
        a.value = parse_comparison();
        return a;
    }

    void collect(const Arg& a, std::vector<Scalar>& out) {
        if (a.range) {
            RangeRef r = *a.range;
            const std::string& sheet_name = r.sheet.empty() ? host_ : r.sheet;
            const Sheet* s = wb_.find_sheet(sheet_name);
            if (!s) throw FormulaError(Kind::BadRef, "no sheet named '" + sheet_name + "'");
            for (int row = r.row1; row <= r.row2; ++row) {
                for (int col = r.col1; col <= r.col2; ++col) {
                    Scalar v = s->cell(row, col).scalar();
                    if (!std::holds_alternative<EmptyCell>(v)) out.push_back(std::move(v));
                }
            }
        } else {
            out.push_back(a.value);
        }
    }

    Scalar call_function(const std::string& raw_name) {
        std::string name = raw_name;
        std::transform(name.begin(), name.end(), name.begin(),
                       [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
        advance();  // consume '('
        std::vector<Arg> args;
        if (cur_.type != Token::Type::RParen) {
            args.push_back(parse_arg());
            while (cur_.type == Token::Type::Comma) {
                advance();
                args.push_back(parse_arg());
            }
        }
        if (cur_.type != Token::Type::RParen) {
            throw FormulaError(Kind::Syntax, "missing ')' in " + name);
        }
        advance();

        static const char* kKnown[] = {"SUM", "AVERAGE", "COUNT", "MAX", "MIN", "IF"};
        if (std::find_if(std::begin(kKnown), std::end(kKnown),
                         [&](const char* k) { return name == k; }) == std::end(kKnown)) {
            throw UnknownFunction{name};
        }

        if (name == "IF") {
            if (args.size() < 2 || args.size() > 3 || args[0].range) {
                throw FormulaError(Kind::Syntax, "IF expects (condition, then[, else])");
            }
            bool cond;
            const Scalar& c = args[0].value;
            if (const auto* b = std::get_if<bool>(&c)) cond = *b;
            else if (const auto* d = std::get_if<Decimal>(&c)) cond = !d->is_zero();
            else throw FormulaError(Kind::Type, "IF condition must be boolean or number");
            if (cond) return args[1].range ? range_error() : args[1].value;
            if (args.size() == 3) return args[2].range ? range_error() : args[2].value;
            return false;
        }

        std::vector<Scalar> values;
        for (const auto& a : args) collect(a, values);

        if (name == "COUNT") {
            std::int64_t n = std::count_if(values.begin(), values.end(), [](const Scalar& v) {
                return std::holds_alternative<Decimal>(v);
            });
            return Decimal(n);
        }

        // Aggregates consider numeric values only; text, bools and dates
        // inside the argument list are skipped.
        std::vector<Decimal> nums;
        for (const auto& v : values) {
            if (const auto* d = std::get_if<Decimal>(&v)) nums.push_back(*d);
        }
        if (name == "SUM") {
            Decimal acc(0);
            for (const auto& d : nums) acc = acc + d;
            return acc;
        }
        if (name == "AVERAGE") {
            if (nums.empty()) throw FormulaError(Kind::Runtime, "AVERAGE of no numbers");
            Decimal acc(0);
            for (const auto& d : nums) acc = acc + d;
            return acc / Decimal(static_cast<std::int64_t>(nums.size()));
        }
        if (nums.empty()) throw FormulaError(Kind::Runtime, name + " of no numbers");
        Decimal best = nums.front();
        for (const auto& d : nums) {
            if (name == "MAX" ? d > best : d < best) best = d;
        }
        return best;
    }

    [[noreturn]] static Scalar range_error() {
        throw FormulaError(Kind::Type, "range not valid as IF branch");
    }
};

}  // namespace

FormulaOutcome evaluate_formula(const Workbook& wb, const std::string& host_sheet,
                                std::string_view source) {
    Evaluator ev(wb, host_sheet);
    return ev.run(source);
}

}  // namespace sheetloop
