#include <algorithm>
#include <cctype>
#include <charconv>

#include "semiq/ast.hpp"

namespace semiq {

std::string_view name_of(AggKind k) {
  switch (k) {
    case AggKind::Count: return "COUNT";
    case AggKind::CountDistinct: return "COUNTDISTINCT";
    case AggKind::Sum: return "SUM";
    case AggKind::Max: return "MAX";
    case AggKind::Min: return "MIN";
    case AggKind::Avg: return "AVG";
    case AggKind::Most: return "MOST";
  }
  return "?";
}

std::string_view name_of(QuantorKind k) {
  switch (k) {
    case QuantorKind::Exists: return "EXISTS";
    case QuantorKind::NotExists: return "NOTEXISTS";
    case QuantorKind::ForAll: return "FORALL";
  }
  return "?";
}

std::string_view name_of(Template t) {
  switch (t) {
    case Template::Count: return "count";
    case Template::Aggregate: return "aggregate";
    case Template::Distinct: return "distinct values";
    case Template::Show: return "show";
    case Template::FullShow: return "fullshow";
    case Template::Table: return "table";
    case Template::TableDistinct: return "table from distinct values";
    case Template::TableInterval: return "table from interval";
  }
  return "?";
}

std::string_view label_of(Template t) {
  switch (t) {
    case Template::Count: return "T1";
    case Template::Aggregate: return "T2";
    case Template::Distinct: return "T3";
    case Template::Show: return "T4";
    case Template::FullShow: return "T5";
    case Template::Table: return "T6";
    case Template::TableDistinct: return "T7a";
    case Template::TableInterval: return "T7b";
  }
  return "?";
}

namespace {

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::optional<AggKind> agg_keyword(std::string_view word) {
  std::string w = upper(word);
  if (w == "SUM") return AggKind::Sum;
  if (w == "MAX") return AggKind::Max;
  if (w == "MIN") return AggKind::Min;
  if (w == "AVG") return AggKind::Avg;
  if (w == "MOST") return AggKind::Most;
  if (w == "COUNTDISTINCT") return AggKind::CountDistinct;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text), toks_(tokenize(text)) {}

  QueryAst parse() {
    QueryAst q;
    const Token& head = peek();
    if (word("COUNT")) {
      begin(q, Template::Count, "COUNT");
      take();
      q.source = class_ref();
      q.where = opt_where();
    } else if (head.kind == TokenKind::Word && agg_keyword(head.text)) {
      begin(q, Template::Aggregate, upper(head.text));
      q.agg = *agg_keyword(take().text);
      q.attribute = std::make_unique<Expr>(expr());
      expect_word("FROM");
      q.source = class_ref();
      q.where = opt_where();
    } else if (word("SHOW") || word("FULLSHOW")) {
      bool full = word("FULLSHOW");
      begin(q, full ? Template::FullShow : Template::Show, full ? "FULLSHOW" : "SHOW");
      take();
      if (peek().kind == TokenKind::Number) {
        q.limit = integer("show limit");
      } else if (word("ALL")) {
        take();
      }
      q.source = class_ref();
      q.where = opt_where();
    } else if (word("SELECT")) {
      take();
      if (word("FROM")) {
        take();
        if (word("INTERVAL")) {
          begin(q, Template::TableInterval, "SELECT FROM INTERVAL");
          take();
          expect_symbol("(");
          q.interval_start = signed_integer("interval start");
          expect_symbol("-");
          q.interval_end = signed_integer("interval end");
          expect_symbol(")");
          expect_word("ALL");
          if (word("DISTINCT")) take();
          expect_word("VALUES");
          q.row_variable = short_name_required("row variable");
          table(q);
        } else {
          begin(q, Template::Distinct, "SELECT FROM");
          q.source = class_ref();
          q.where = opt_where();
          skip_comma_before({"ATTRIBUTE"});
          expect_word("ATTRIBUTE");
          q.attribute = std::make_unique<Expr>(expr());
          expect_word("ALL");
          expect_word("DISTINCT");
          expect_word("VALUES");
          if (peek().kind == TokenKind::Word && !is_keyword(peek().text)) {
            q.kind = Template::TableDistinct;
            prefix_ = "T7a SELECT FROM ... ALL DISTINCT VALUES";
            q.row_variable = take().text;
            table(q);
          }
        }
      } else {
        begin(q, Template::Table, "SELECT");
        q.source = class_ref();
        q.where = opt_where();
        table(q);
      }
    } else {
      fail({"COUNT", "SUM", "MAX", "MIN", "AVG", "MOST", "SELECT", "SHOW", "FULLSHOW"});
    }
    if (symbol(";") || symbol(".")) take();
    if (peek().kind != TokenKind::End) fail({"end of query"});
    return q;
  }

 private:
  // --- token helpers ---------------------------------------------------------------

  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  const Token& take() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  bool word_at(std::size_t ahead, std::string_view kw) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Word && upper(t.text) == kw;
  }
  bool word(std::string_view kw) const { return word_at(0, kw); }
  bool symbol_at(std::size_t ahead, std::string_view s) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Symbol && t.text == s;
  }
  bool symbol(std::string_view s) const { return symbol_at(0, s); }
  bool where_word_at(std::size_t ahead) const {
    return word_at(ahead, "WHERE") || word_at(ahead, "WHO") || word_at(ahead, "WHICH") ||
           word_at(ahead, "WITH");
  }
  bool plain_word(std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Word && !is_keyword(t.text);
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of query" : "'" + t.text + "'";
    std::string msg = "expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + found;
    throw ParseError(msg, t.span.length ? t.span : Span{t.span.offset, 0}, std::move(expected),
                     prefix_);
  }

  void expect_word(std::string_view kw) {
    if (!word(kw)) fail({std::string(kw)});
    take();
  }
  void expect_symbol(std::string_view s) {
    if (!symbol(s)) fail({"'" + std::string(s) + "'"});
    take();
  }
  void skip_comma_before(std::initializer_list<std::string_view> next) {
    if (!symbol(",")) return;
    for (auto kw : next) {
      if (word_at(1, kw)) {
        take();
        return;
      }
    }
  }

  void begin(QueryAst& q, Template t, const std::string& head) {
    q.kind = t;
    prefix_ = std::string(label_of(t)) + " " + head;
  }

  std::int64_t integer(const char* what) {
    const Token& t = peek();
    std::int64_t v = 0;
    if (t.kind == TokenKind::Number) {
      auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (ec == std::errc() && p == t.text.data() + t.text.size()) {
        take();
        return v;
      }
    }
    fail({what});
  }
  std::int64_t signed_integer(const char* what) {
    if (symbol("-")) {
      take();
      return -integer(what);
    }
    return integer(what);
  }

  std::string short_name_required(const char* what) {
    if (!plain_word()) fail({what});
    return take().text;
  }

  Span span_from(std::size_t start_tok) const {
    std::size_t begin = toks_[start_tok].span.offset;
    std::size_t last = pos_ > start_tok ? pos_ - 1 : start_tok;
    const Span& e = toks_[last].span;
    return Span{begin, e.offset + e.length - begin};
  }

  // --- class references and conditions ----------------------------------------------

  ClassRef class_ref() {
    ClassRef r;
    std::size_t start = pos_;
    if (!plain_word()) fail({"class name"});
    std::string first = take().text;
    if (symbol(".") && plain_word(1)) {
      take();
      r.context = first;
      r.class_name = take().text;
    } else {
      r.class_name = first;
    }
    if (plain_word()) r.short_name = take().text;
    if (word("OF") && plain_word(1)) {
      take();
      r.of_class = take().text;
      r.context = short_name_required("short name of the context instance");
    }
    r.span = span_from(start);
    return r;
  }

  CondPtr opt_where() {
    skip_comma_before({"WHERE", "WHO", "WHICH", "WITH"});
    if (!where_word_at(0)) return nullptr;
    take();
    return cond();
  }

  CondPtr cond() {
    std::size_t start = pos_;
    CondPtr left = and_cond();
    while (true) {
      skip_comma_before({"OR"});
      if (!word("OR")) break;
      take();
      auto node = std::make_unique<Cond>();
      node->kind = Cond::Or;
      node->left = std::move(left);
      node->right = and_cond();
      node->span = span_from(start);
      left = std::move(node);
    }
    return left;
  }

  CondPtr and_cond() {
    std::size_t start = pos_;
    CondPtr left = atom();
    while (true) {
      skip_comma_before({"AND"});
      if (!word("AND")) break;
      take();
      auto node = std::make_unique<Cond>();
      node->kind = Cond::And;
      node->left = std::move(left);
      node->right = atom();
      node->span = span_from(start);
      left = std::move(node);
    }
    return left;
  }

  std::optional<QuantorKind> quantor_head() {
    if (word("EXISTS")) {
      take();
      return QuantorKind::Exists;
    }
    if (word("NOTEXISTS")) {
      take();
      return QuantorKind::NotExists;
    }
    if (word("NOT") && word_at(1, "EXISTS")) {
      take();
      take();
      return QuantorKind::NotExists;
    }
    if (word("FORALL")) {
      take();
      return QuantorKind::ForAll;
    }
    if (word("HAVE") || word("HAS")) {
      take();
      if (word("AT") && word_at(1, "LEAST") && word_at(2, "ONE")) {
        take();
        take();
        take();
      }
      return QuantorKind::Exists;
    }
    return std::nullopt;
  }

  CondPtr atom() {
    std::size_t start = pos_;
    if (auto q = quantor_head()) {
      auto node = std::make_unique<Cond>();
      node->kind = Cond::Quantor;
      node->quantor = *q;
      node->target = class_ref();
      node->where = opt_where();
      node->span = span_from(start);
      return node;
    }
    if (symbol("(")) {
      std::size_t saved = pos_;
      try {
        take();
        CondPtr inner = cond();
        if (symbol(")")) {
          take();
          const Token& next = peek();
          bool continues = next.kind == TokenKind::Symbol &&
                           std::string_view("=<><=>=.+-*/").find(next.text) != std::string_view::npos &&
                           !(next.text == "." && peek(1).kind == TokenKind::End);
          if (!continues && !word("EQUALS")) {
            inner->parenthesized = true;
            return inner;
          }
        }
      } catch (const ParseError&) {
      }
      pos_ = saved;
    }
    return comparison();
  }

  CondPtr comparison() {
    std::size_t start = pos_;
    auto node = std::make_unique<Cond>();
    node->kind = Cond::Compare;
    node->lhs = std::make_unique<Expr>(expr());
    const Token& t = peek();
    if (word("EQUALS")) {
      node->op = CompareOp::Eq;
    } else if (t.kind == TokenKind::Symbol && t.text == "=") {
      node->op = CompareOp::Eq;
    } else if (t.kind == TokenKind::Symbol && t.text == "<>") {
      node->op = CompareOp::Ne;
    } else if (t.kind == TokenKind::Symbol && t.text == "<") {
      node->op = CompareOp::Lt;
    } else if (t.kind == TokenKind::Symbol && t.text == "<=") {
      node->op = CompareOp::Le;
    } else if (t.kind == TokenKind::Symbol && t.text == ">") {
      node->op = CompareOp::Gt;
    } else if (t.kind == TokenKind::Symbol && t.text == ">=") {
      node->op = CompareOp::Ge;
    } else {
      fail({"comparison operator"});
    }
    take();
    if (symbol("*") && !starts_operand(1)) {
      Expr star;
      star.kind = Expr::Star;
      star.span = take().span;
      node->rhs = std::make_unique<Expr>(std::move(star));
    } else {
      node->rhs = std::make_unique<Expr>(expr());
    }
    node->span = span_from(start);
    return node;
  }

  bool starts_operand(std::size_t ahead) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Number || t.kind == TokenKind::String ||
           t.kind == TokenKind::Raw || (t.kind == TokenKind::Word && !is_keyword(t.text)) ||
           (t.kind == TokenKind::Symbol && t.text == "(");
  }

  // --- expressions -------------------------------------------------------------------

  Expr binary(Expr lhs, ArithOp op, Expr rhs, std::size_t start) {
    Expr e;
    e.kind = Expr::Arith;
    e.op = op;
    e.operands.push_back(std::move(lhs));
    e.operands.push_back(std::move(rhs));
    e.span = span_from(start);
    return e;
  }

  Expr expr() {
    std::size_t start = pos_;
    Expr lhs = term();
    while (symbol("+") || symbol("-")) {
      ArithOp op = take().text == "+" ? ArithOp::Add : ArithOp::Sub;
      lhs = binary(std::move(lhs), op, term(), start);
    }
    return lhs;
  }

  Expr term() {
    std::size_t start = pos_;
    Expr lhs = unary();
    while ((symbol("*") && starts_operand(1)) || symbol("/")) {
      ArithOp op = take().text == "*" ? ArithOp::Mul : ArithOp::Div;
      lhs = binary(std::move(lhs), op, unary(), start);
    }
    return lhs;
  }

  Expr unary() {
    std::size_t start = pos_;
    if (symbol("-")) {
      take();
      if (peek().kind == TokenKind::Number) {
        Expr lit;
        lit.kind = Expr::Literal;
        lit.text = "-" + take().text;
        lit.span = span_from(start);
        return postfix(std::move(lit), start);
      }
      Expr e;
      e.kind = Expr::Negate;
      e.operands.push_back(unary());
      e.span = span_from(start);
      return e;
    }
    return postfix(primary(), start);
  }

  std::vector<Expr> call_arguments() {
    std::vector<Expr> args;
    expect_symbol("(");
    if (!symbol(")")) {
      args.push_back(expr());
      while (symbol(",")) {
        take();
        args.push_back(expr());
      }
    }
    expect_symbol(")");
    return args;
  }

  Expr postfix(Expr e, std::size_t start) {
    while (symbol(".") && peek(1).kind == TokenKind::Word) {
      take();
      std::string name = take().text;
      if (symbol("(") && !word_at(1, "COLUMN")) {
        Expr call;
        call.kind = Expr::Call;
        call.text = name;
        call.operands.push_back(std::move(e));
        for (auto& a : call_arguments()) call.operands.push_back(std::move(a));
        call.span = span_from(start);
        e = std::move(call);
      } else if (e.kind == Expr::Path) {
        e.names.push_back(std::move(name));
        e.span = span_from(start);
      } else {
        Expr call;
        call.kind = Expr::Call;
        call.text = name;
        call.operands.push_back(std::move(e));
        call.span = span_from(start);
        e = std::move(call);
      }
    }
    if (e.kind == Expr::Path && word("OF") && plain_word(1) && plain_word(2)) {
      take();
      e.source.of_class = take().text;
      e.names.insert(e.names.begin(), take().text);
      e.span = span_from(start);
    }
    return e;
  }

  bool selector_ahead() const {
    // ( ctx . Class [short] {, WHERE | WHERE | )}
    if (!(plain_word(1) && symbol_at(2, ".") && plain_word(3))) return false;
    std::size_t k = 4;
    if (plain_word(k)) ++k;
    return symbol_at(k, ",") || where_word_at(k) || (k == 5 && symbol_at(k, ")"));
  }

  Expr primary() {
    std::size_t start = pos_;
    const Token& t = peek();
    Expr e;
    switch (t.kind) {
      case TokenKind::Number:
      case TokenKind::Raw:
        e.kind = Expr::Literal;
        e.text = take().text;
        e.span = t.span;
        return e;
      case TokenKind::String:
        e.kind = Expr::Literal;
        e.quoted = true;
        e.text = take().text;
        e.span = t.span;
        return e;
      case TokenKind::Word:
        if (word("NIL")) {
          e.kind = Expr::Nil;
          e.span = take().span;
          return e;
        }
        if (is_keyword(t.text)) break;
        e.kind = Expr::Path;
        e.names.push_back(take().text);
        e.span = t.span;
        return e;
      case TokenKind::Symbol:
        if (t.text != "(") break;
        if (word_at(1, "COUNT")) {
          take();
          take();
          e.kind = Expr::Count;
          e.agg = AggKind::Count;
          e.source = class_ref();
          e.where = opt_where();
          expect_symbol(")");
          e.span = span_from(start);
          return e;
        }
        if (peek(1).kind == TokenKind::Word && agg_keyword(peek(1).text)) {
          take();
          e.kind = Expr::Aggregate;
          e.agg = *agg_keyword(take().text);
          e.operands.push_back(expr());
          expect_word("FROM");
          e.source = class_ref();
          e.where = opt_where();
          expect_symbol(")");
          e.span = span_from(start);
          return e;
        }
        if (selector_ahead()) {
          take();
          e.kind = Expr::Selector;
          e.source = class_ref();
          e.where = opt_where();
          expect_symbol(")");
          expect_symbol(".");
          if (!plain_word()) fail({"attribute name"});
          e.names.push_back(take().text);
          while (symbol(".") && plain_word(1)) {
            take();
            e.names.push_back(take().text);
          }
          e.span = span_from(start);
          return e;
        }
        take();
        e = expr();
        expect_symbol(")");
        return e;
      default: break;
    }
    fail({"attribute expression"});
  }

  std::string_view text_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string prefix_;

  // --- tables ------------------------------------------------------------------------

  bool column_list_ends() const {
    std::size_t k = symbol(",") ? 1 : 0;
    return word_at(k, "KEEP") || word_at(k, "SORT") || word_at(k, "LEAVE") ||
           peek().kind == TokenKind::End ||
           ((symbol(";") || symbol(".")) && peek(1).kind == TokenKind::End);
  }

  void table(QueryAst& q) {
    skip_comma_before({"DEFINE"});
    expect_word("DEFINE");
    expect_word("TABLE");
    prefix_ += " DEFINE TABLE";
    do {
      ColumnSpec c;
      std::size_t start = pos_;
      c.expr = expr();
      if (symbol("(") && word_at(1, "COLUMN")) {
        take();
        take();
        if (peek().kind != TokenKind::Word && peek().kind != TokenKind::String) {
          fail({"column name"});
        }
        c.name = take().text;
        expect_symbol(")");
      }
      c.span = span_from(start);
      q.columns.push_back(std::move(c));
      if (symbol(",") && !word_at(1, "KEEP") && !word_at(1, "SORT") && !word_at(1, "LEAVE")) {
        take();
      }
    } while (!column_list_ends());

    skip_comma_before({"KEEP"});
    if (word("KEEP")) {
      take();
      expect_word("ROWS");
      if (!where_word_at(0)) fail({"WHERE"});
      take();
      q.keep = cond();
    }
    skip_comma_before({"SORT"});
    if (word("SORT")) {
      std::size_t start = pos_;
      take();
      SortSpec s;
      if (word("ASCENDING")) {
        take();
      } else if (word("DESCENDING")) {
        take();
        s.descending = true;
      }
      expect_word("BY");
      expect_word("COLUMN");
      if (peek().kind != TokenKind::Word) fail({"column name"});
      s.column = take().text;
      s.span = span_from(start);
      q.sort = s;
    }
    skip_comma_before({"LEAVE"});
    if (word("LEAVE")) {
      take();
      LeaveSpec l;
      if (word("FIRST")) {
        take();
      } else if (word("LAST")) {
        take();
        l.last = true;
      }
      l.count = integer("row count");
      if (l.count < 1) throw ParseError("LEAVE needs at least 1 row", toks_[pos_ - 1].span, {}, prefix_);
      expect_word("ROWS");
      q.leave = l;
    }
  }
};

}  // namespace

QueryAst parse_query(std::string_view text) { return Parser(text).parse(); }

}  // namespace semiq
