#include <algorithm>
#include <cctype>

#include "semiq/bound.hpp"

namespace semiq {

std::string_view name_of(Nav n) {
  switch (n) {
    case Nav::Scan: return "scan";
    case Nav::Global: return "global";
    case Nav::Child: return "child";
    case Nav::Parent: return "parent";
    case Nav::Brother: return "brother";
    case Nav::Values: return "values";
  }
  return "?";
}

namespace {

// A single unresolvable name; comparisons may reread it as a literal.
class UnknownName : public ResolveError {
 public:
  using ResolveError::ResolveError;
};

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() > suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

struct Named {
  bool classifier = false;
  std::uint32_t id = 0;
};

enum class Role { Source, Quantor, Aggregate, Selector };

bool is_typeless(const Expr& e) {
  return e.kind == Expr::Literal || e.kind == Expr::Nil || e.kind == Expr::Star;
}

class Resolver {
 public:
  explicit Resolver(std::shared_ptr<const Schema> schema) : schema_(*schema) {
    q_.schema = std::move(schema);
  }

  BoundQuery run(const QueryAst& ast) {
    q_.kind = ast.kind;
    switch (ast.kind) {
      case Template::Count:
      case Template::Show:
      case Template::FullShow:
        source(ast);
        q_.limit = ast.limit;
        scope_.pop_back();
        break;
      case Template::Aggregate:
      case Template::Distinct:
        source(ast);
        q_.agg = ast.agg;
        q_.attribute = std::make_unique<BExpr>(resolve_expr(*ast.attribute));
        check_aggregate(ast.kind == Template::Distinct ? AggKind::CountDistinct : ast.agg,
                        *q_.attribute, ast.attribute->span);
        scope_.pop_back();
        break;
      case Template::Table:
        source(ast);
        columns(ast);
        break;
      case Template::TableDistinct: {
        source(ast);
        q_.attribute = std::make_unique<BExpr>(resolve_expr(*ast.attribute));
        check_aggregate(AggKind::CountDistinct, *q_.attribute, ast.attribute->span);
        scope_.pop_back();
        q_.row_var = declare_scalar(ast.row_variable, *q_.attribute, ast.source.span);
        scope_.push_back(q_.row_var);
        columns(ast);
        break;
      }
      case Template::TableInterval: {
        if (ast.interval_start > ast.interval_end) {
          throw ResolveError("interval start exceeds its end", Span{});
        }
        q_.interval_start = ast.interval_start;
        q_.interval_end = ast.interval_end;
        BExpr type;
        type.type = TypeTag::Integer;
        q_.row_var = declare_scalar(ast.row_variable, type, Span{});
        scope_.push_back(q_.row_var);
        columns(ast);
        break;
      }
    }
    return std::move(q_);
  }

 private:
  // --- classes and bindings ------------------------------------------------------------

  static std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  std::optional<Named> find_named(const std::string& n) const {
    if (auto c = schema_.find_class(n)) return Named{false, *c};
    if (auto c = schema_.find_classifier(n)) return Named{true, *c};
    return std::nullopt;
  }

  // Unique case-insensitive match, with the declared spelling.
  std::optional<std::pair<Named, std::string>> find_folded(const std::string& n) const {
    std::optional<std::pair<Named, std::string>> hit;
    int hits = 0;
    std::string key = lower(n);
    for (ClassId c = 0; c < schema_.classes().size(); ++c) {
      if (lower(schema_.cls(c).name) == key) hit = {{Named{false, c}, schema_.cls(c).name}}, ++hits;
    }
    for (ClassifierId c = 0; c < schema_.classifiers().size(); ++c) {
      if (lower(schema_.classifier(c).name) == key) {
        hit = {{Named{true, c}, schema_.classifier(c).name}};
        ++hits;
      }
    }
    if (hits != 1) return std::nullopt;
    return hit;
  }

  // The name as written, then its singular forms.
  static std::vector<std::string> spellings(const std::string& name) {
    std::vector<std::string> out = {name};
    if (ends_with(name, "ies")) out.push_back(name.substr(0, name.size() - 3) + "y");
    if (ends_with(name, "ses")) out.push_back(name.substr(0, name.size() - 3) + "sis");
    if (ends_with(name, "es")) out.push_back(name.substr(0, name.size() - 2));
    if (ends_with(name, "s")) out.push_back(name.substr(0, name.size() - 1));
    return out;
  }

  std::optional<std::pair<Named, std::string>> match_class(const std::string& name) const {
    auto forms = spellings(name);
    for (const auto& f : forms) {
      if (auto n = find_named(f)) return {{*n, f}};
    }
    for (const auto& f : forms) {
      if (auto n = find_folded(f)) return n;
    }
    return std::nullopt;
  }

  Named lookup_class(const std::string& name, Span span) {
    if (auto m = match_class(name)) {
      if (m->second != name) note("read '" + name + "' as " + m->second);
      return m->first;
    }
    throw ResolveError("unknown class '" + name + "'", span);
  }

  bool names_class(const std::string& name) const { return match_class(name).has_value(); }

  std::string class_name(const Named& n) const {
    return n.classifier ? schema_.classifier(n.id).name : schema_.cls(n.id).name;
  }

  int find_binding(std::string_view name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (q_.bindings[*it].name == name) return *it;
    }
    return -1;
  }

  bool schema_uses_name(const std::string& name) const {
    if (schema_.find_class(name) || schema_.find_classifier(name)) return true;
    for (const auto& c : schema_.classes()) {
      for (const auto& a : c.attributes) {
        if (a.name == name) return true;
      }
    }
    for (const auto& c : schema_.classifiers()) {
      for (const auto& a : c.attributes) {
        if (a.name == name) return true;
      }
    }
    return false;
  }

  void name_binding(Binding& b, const std::string& requested, Span span) {
    int slot = static_cast<int>(q_.bindings.size());
    if (requested.empty()) {
      b.name = "_" + std::to_string(slot + 1);
      b.automatic = true;
      while (find_binding(b.name) >= 0) b.name += "_";
      return;
    }
    if (find_binding(requested) >= 0) {
      throw ResolveError("short name '" + requested + "' is already in use", span);
    }
    if (schema_uses_name(requested)) {
      throw ResolveError("short name '" + requested + "' clashes with a class or attribute name",
                         span);
    }
    b.name = requested;
  }

  int declare(const ClassRef& r, Role role) {
    Named target = lookup_class(r.class_name, r.span);
    Binding b;
    b.kind = target.classifier ? BindingKind::Classifier : BindingKind::Instance;
    if (target.classifier) {
      b.classifier = target.id;
    } else {
      b.cls = target.id;
    }

    if (role == Role::Source) {
      if (!r.context.empty()) {
        throw ResolveError("the query's own class cannot take a prefix", r.span);
      }
      b.nav = Nav::Scan;
    } else {
      int ctx = -1;
      bool implicit = false;
      if (!r.context.empty()) {
        ctx = find_binding(r.context);
        if (ctx < 0) throw ResolveError("unknown short name '" + r.context + "'", r.span);
        if (!r.of_class.empty()) {
          const Binding& c = q_.bindings[ctx];
          Named of = lookup_class(r.of_class, r.span);
          bool same = c.kind == BindingKind::Classifier
                          ? of.classifier && of.id == c.classifier
                          : c.kind == BindingKind::Instance && !of.classifier && of.id == c.cls;
          if (!same) {
            throw ResolveError("'" + r.context + "' is not a " + r.of_class, r.span);
          }
        }
      } else if (role == Role::Selector) {
        throw ResolveError("a child selector needs a prefix, as in x." + r.class_name, r.span);
      } else if (role == Role::Quantor && !scope_.empty()) {
        ctx = scope_.back();
        implicit = true;
      }

      b.context = ctx;
      if (target.classifier || ctx < 0 || q_.bindings[ctx].kind != BindingKind::Instance) {
        b.nav = Nav::Global;
      } else {
        const Binding& c = q_.bindings[ctx];
        RelationInfo rel = schema_.relation(c.cls, b.cls);
        switch (rel.kind) {
          case Relation::Descendant: b.nav = Nav::Child; break;
          case Relation::Ancestor: b.nav = Nav::Parent; break;
          case Relation::Brother:
            b.nav = Nav::Brother;
            b.anchor = *rel.common_ancestor;
            break;
          case Relation::Self:
            if (auto p = schema_.cls(b.cls).parent) {
              b.nav = Nav::Brother;
              b.anchor = *p;
            } else {
              b.nav = Nav::Global;
            }
            break;
        }
        if (implicit && b.nav == Nav::Child) note_other_parents(ctx, b.cls);
      }
      if (implicit && b.nav == Nav::Global) b.context = -1;
      if (role == Role::Selector && b.nav != Nav::Child) {
        throw ResolveError(r.class_name + " is not a child class of " + r.context, r.span);
      }
    }
    name_binding(b, r.short_name, r.span);
    q_.bindings.push_back(std::move(b));
    return static_cast<int>(q_.bindings.size()) - 1;
  }

  void note_other_parents(int chosen, ClassId target) {
    for (int slot : scope_) {
      const Binding& b = q_.bindings[slot];
      if (slot == chosen || b.kind != BindingKind::Instance) continue;
      if (!schema_.is_ancestor(b.cls, target)) continue;
      const Binding& c = q_.bindings[chosen];
      note(schema_.cls(target).name + " is reached from " + c.name + " (" +
           schema_.cls(c.cls).name + "); write " + b.name + "." + schema_.cls(target).name +
           " to reach it from " + b.name + " (" + schema_.cls(b.cls).name + ")");
    }
  }

  int declare_scalar(const std::string& name, const BExpr& type, Span span) {
    Binding b;
    b.kind = BindingKind::Scalar;
    b.scalar_type = type.type;
    b.classifier = type.classifier;
    b.nav = Nav::Values;
    name_binding(b, name, span);
    q_.bindings.push_back(std::move(b));
    return static_cast<int>(q_.bindings.size()) - 1;
  }

  void source(const QueryAst& ast) {
    q_.source = declare(ast.source, Role::Source);
    scope_.push_back(q_.source);
    if (ast.where) q_.where = resolve_cond(*ast.where);
  }

  void columns(const QueryAst& ast) {
    in_column_ = true;
    for (std::size_t i = 0; i < ast.columns.size(); ++i) {
      const auto& c = ast.columns[i];
      BColumn col;
      col.name = c.name.empty() ? "col" + std::to_string(i + 1) : c.name;
      for (const auto& other : q_.columns) {
        if (other.name == col.name) {
          throw ResolveError("duplicate column name '" + col.name + "'", c.span);
        }
      }
      col.expr = resolve_expr(c.expr);
      if (col.expr.instance_ref) {
        throw ResolveError("a column needs a value, not an instance; add an attribute", c.span);
      }
      q_.columns.push_back(std::move(col));
    }
    in_column_ = false;
    scope_.clear();
    if (ast.keep) {
      keep_mode_ = true;
      q_.keep = resolve_cond(*ast.keep);
      keep_mode_ = false;
    }
    if (ast.sort) {
      auto it = std::find_if(q_.columns.begin(), q_.columns.end(),
                             [&](const BColumn& c) { return c.name == ast.sort->column; });
      if (it == q_.columns.end()) {
        throw ResolveError("SORT names unknown column '" + ast.sort->column + "'",
                           ast.sort->span);
      }
      q_.sort = BSort{ast.sort->descending, static_cast<std::size_t>(it - q_.columns.begin())};
    }
    q_.leave = ast.leave;
  }

  void note(std::string text) {
    if (std::find(q_.notes.begin(), q_.notes.end(), text) == q_.notes.end()) {
      q_.notes.push_back(std::move(text));
    }
  }

  // --- expressions -------------------------------------------------------------------

  static void set_type(BExpr& e, const AttrType& t) {
    e.type = t.tag;
    e.classifier = t.classifier;
  }

  BExpr binding_ref(int slot) const {
    const Binding& b = q_.bindings[slot];
    BExpr e;
    e.kind = BExpr::BindingRef;
    e.binding = slot;
    switch (b.kind) {
      case BindingKind::Instance:
        e.instance_ref = true;
        e.type = TypeTag::Integer;
        break;
      case BindingKind::Classifier:
        e.type = TypeTag::Classifier;
        e.classifier = b.classifier;
        break;
      case BindingKind::Scalar:
        e.type = b.scalar_type;
        e.classifier = b.classifier;
        break;
    }
    return e;
  }

  BExpr attribute_of(int slot, const std::string& name, Span span) const {
    const Binding& b = q_.bindings[slot];
    BExpr e;
    e.kind = BExpr::Attr;
    e.binding = slot;
    if (b.kind == BindingKind::Instance) {
      auto v = schema_.find_visible(b.cls, name);
      if (!v) {
        if (auto d = schema_.descendant_declaring(b.cls, name)) {
          throw ResolveError("'" + name + "' belongs to child class " + schema_.cls(*d).name +
                                 " of " + schema_.cls(b.cls).name +
                                 "; use EXISTS to reach child classes",
                             span);
        }
        if (names_class(name)) {
          throw ResolveError("'" + name + "' is a class, not an attribute of " +
                                 schema_.cls(b.cls).name +
                                 "; a child selector needs a short name or WHERE, as in (" +
                                 b.name + "." + name + " y).attribute",
                             span);
        }
        throw UnknownName("unknown attribute '" + name + "' of " + schema_.cls(b.cls).name, span);
      }
      e.owner = v->owner;
      e.attr = v->index;
      set_type(e, v->def->type);
      return e;
    }
    if (b.kind == BindingKind::Classifier) {
      auto idx = schema_.find_classifier_attribute(b.classifier, name);
      if (!idx) {
        throw UnknownName("unknown attribute '" + name + "' of " +
                              schema_.classifier(b.classifier).name,
                          span);
      }
      e.attr = *idx;
      set_type(e, schema_.classifier(b.classifier).attributes[*idx].type);
      return e;
    }
    throw UnknownName("'" + b.name + "' is a value and has no attribute '" + name + "'", span);
  }

  bool declares(int slot, const std::string& name) const {
    const Binding& b = q_.bindings[slot];
    if (b.kind == BindingKind::Instance) return schema_.find_visible(b.cls, name).has_value();
    if (b.kind == BindingKind::Classifier) {
      return schema_.find_classifier_attribute(b.classifier, name).has_value();
    }
    return false;
  }

  // Whether `inner`'s attribute owned by `owner` is necessarily read from the
  // same instance as through `outer`.
  bool same_instance(int inner, int outer, ClassId owner) const {
    int b = inner;
    while (b >= 0 && b != outer) {
      const Binding& x = q_.bindings[b];
      if (x.nav != Nav::Child && x.nav != Nav::Parent) return false;
      b = x.context;
    }
    if (b != outer) return false;
    const Binding& o = q_.bindings[outer];
    return o.kind == BindingKind::Instance &&
           (o.cls == owner || schema_.is_ancestor(owner, o.cls));
  }

  BExpr resolve_path(const std::vector<std::string>& names, Span span) {
    if (keep_mode_) {
      for (std::size_t i = 0; i < q_.columns.size(); ++i) {
        if (q_.columns[i].name != names[0]) continue;
        BExpr e;
        e.kind = BExpr::Column;
        e.column = i;
        e.type = q_.columns[i].expr.type;
        e.classifier = q_.columns[i].expr.classifier;
        return chain(std::move(e), names, 1, span);
      }
      throw UnknownName("unknown column '" + names[0] + "'", span);
    }
    if (int slot = find_binding(names[0]); slot >= 0) {
      if (names.size() == 1) return binding_ref(slot);
      if (q_.bindings[slot].kind == BindingKind::Scalar) {
        return chain(binding_ref(slot), names, 1, span);
      }
      return chain(attribute_of(slot, names[1], span), names, 2, span);
    }
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (!declares(*it, names[0])) continue;
      BExpr e = attribute_of(*it, names[0], span);
      for (auto outer = std::next(it); outer != scope_.rend(); ++outer) {
        if (declares(*outer, names[0]) && !same_instance(*it, *outer, e.owner)) {
          note("'" + names[0] + "' is read as " + q_.bindings[*it].name + "." + names[0] +
               "; write " + q_.bindings[*outer].name + "." + names[0] + " for the outer one");
          break;
        }
      }
      return chain(std::move(e), names, 1, span);
    }
    for (int slot : scope_) {
      const Binding& b = q_.bindings[slot];
      if (b.kind != BindingKind::Instance) continue;
      if (auto d = schema_.descendant_declaring(b.cls, names[0])) {
        throw ResolveError("'" + names[0] + "' belongs to child class " + schema_.cls(*d).name +
                               " of " + schema_.cls(b.cls).name +
                               "; use EXISTS to reach child classes",
                           span);
      }
    }
    throw UnknownName("unknown attribute '" + names[0] + "'", span);
  }

  BExpr chain(BExpr e, const std::vector<std::string>& names, std::size_t i, Span span) {
    for (; i < names.size(); ++i) {
      const std::string& n = names[i];
      if (e.kind == BExpr::Attr && e.type == TypeTag::Classifier && !e.hop &&
          q_.bindings[e.binding].kind == BindingKind::Instance) {
        if (auto idx = schema_.find_classifier_attribute(e.classifier, n)) {
          e.hop = *idx;
          set_type(e, schema_.classifier(e.classifier).attributes[*idx].type);
          continue;
        }
      }
      if (function_applies(n, e.type)) {
        std::vector<BExpr> none;
        e = make_call(n, std::move(e), std::move(none), span);
        continue;
      }
      throw ResolveError("unknown attribute or operation '" + n + "' for " +
                             std::string(type_name(e.type)),
                         span);
    }
    return e;
  }

  static bool function_applies(const std::string& name, TypeTag t) {
    if (auto f = temporal_field(name)) return applies_to(*f, t);
    if (duration_unit(name)) return t == TypeTag::Duration;
    return false;
  }

  BExpr make_call(const std::string& name, BExpr target, std::vector<BExpr> args, Span span) {
    BExpr e;
    e.kind = BExpr::Call;
    if (name == "substring") {
      if (target.type != TypeTag::String || args.size() != 2 ||
          args[0].type != TypeTag::Integer || args[1].type != TypeTag::Integer) {
        throw ResolveError("substring(i,j) needs a String and two Integer positions", span);
      }
      e.fn = CallFn::Substring;
      e.type = TypeTag::String;
    } else if (auto f = temporal_field(name); f && applies_to(*f, target.type)) {
      e.fn = CallFn::Temporal;
      e.field = *f;
      e.type = result_type(*f, target.type);
    } else if (auto u = duration_unit(name); u && target.type == TypeTag::Duration) {
      e.fn = CallFn::Duration;
      e.unit = *u;
      e.type = *u == DurationUnit::Seconds ? TypeTag::Real : TypeTag::Integer;
    } else {
      throw ResolveError("operation '" + name + "' does not apply to " +
                             std::string(type_name(target.type)),
                         span);
    }
    if (e.fn != CallFn::Substring && !args.empty()) {
      throw ResolveError(name + "() takes no arguments", span);
    }
    e.operands.push_back(std::move(target));
    for (auto& a : args) e.operands.push_back(std::move(a));
    return e;
  }

  static BExpr constant(Value v) {
    BExpr e;
    e.kind = BExpr::Const;
    e.type = v.tag();
    e.value = std::move(v);
    return e;
  }

  static Value infer_literal(const std::string& text, bool quoted) {
    if (quoted) return Value::string(text);
    for (TypeTag t : {TypeTag::Boolean, TypeTag::Integer, TypeTag::Real, TypeTag::Date,
                      TypeTag::DateTime, TypeTag::Duration}) {
      if (auto v = try_parse_literal(text, t)) return *v;
    }
    return Value::string(text);
  }

  static BExpr typed_literal(const std::string& text, bool quoted, TypeTag expected, Span span) {
    if (expected == TypeTag::Nil) return constant(infer_literal(text, quoted));
    if (quoted && expected != TypeTag::String) {
      throw ResolveError("literal/type mismatch: quoted \"" + text + "\" where " +
                             std::string(type_name(expected)) + " is expected",
                         span);
    }
    if (auto v = try_parse_literal(text, expected)) return constant(*v);
    throw ResolveError("literal/type mismatch: '" + text + "' is not a valid " +
                           std::string(type_name(expected)),
                       span);
  }

  static TypeTag numeric_hint(const std::string& text) {
    return try_parse_literal(text, TypeTag::Integer) ? TypeTag::Integer : TypeTag::Real;
  }

  BExpr resolve_expr(const Expr& e, TypeTag hint = TypeTag::Nil) {
    switch (e.kind) {
      case Expr::Literal: {
        if ((hint == TypeTag::Integer || hint == TypeTag::Real) && !e.quoted) {
          hint = numeric_hint(e.text);
        }
        return typed_literal(e.text, e.quoted, hint, e.span);
      }
      case Expr::Nil: return constant(Value());
      case Expr::Star:
        throw ResolveError("'*' is only allowed as attr=* inside a child selector", e.span);
      case Expr::Path: return resolve_path(e.names, e.span);
      case Expr::Call: {
        BExpr target = resolve_expr(e.operands[0]);
        std::vector<BExpr> args;
        for (std::size_t i = 1; i < e.operands.size(); ++i) {
          args.push_back(resolve_expr(e.operands[i], TypeTag::Integer));
        }
        return make_call(e.text, std::move(target), std::move(args), e.span);
      }
      case Expr::Arith: return resolve_arith(e);
      case Expr::Negate: {
        BExpr inner = resolve_expr(e.operands[0], TypeTag::Integer);
        if (inner.type != TypeTag::Integer && inner.type != TypeTag::Real) {
          throw ResolveError("unary minus needs a number", e.span);
        }
        BExpr out;
        out.kind = BExpr::Negate;
        out.type = inner.type;
        out.operands.push_back(std::move(inner));
        return out;
      }
      case Expr::Count:
      case Expr::Aggregate: {
        if (!in_column_) {
          throw ResolveError("(" + std::string(name_of(e.agg)) +
                                 " ...) is only allowed as a table column",
                             e.span);
        }
        BExpr out;
        out.kind = e.kind == Expr::Count ? BExpr::Count : BExpr::Aggregate;
        out.agg = e.agg;
        out.binding = declare(e.source, Role::Aggregate);
        scope_.push_back(out.binding);
        if (e.where) out.where = resolve_cond(*e.where);
        if (e.kind == Expr::Count) {
          out.type = TypeTag::Integer;
        } else {
          out.operands.push_back(resolve_expr(e.operands[0]));
          out.type = check_aggregate(e.agg, out.operands[0], e.operands[0].span);
        }
        scope_.pop_back();
        return out;
      }
      case Expr::Selector: {
        if (!in_column_) {
          throw ResolveError("a child selector is only allowed as a table column", e.span);
        }
        BExpr out;
        out.kind = BExpr::Selector;
        out.binding = declare(e.source, Role::Selector);
        scope_.push_back(out.binding);
        int saved = selector_;
        selector_ = out.binding;
        if (e.where) out.where = resolve_cond(*e.where);
        selector_ = saved;
        BExpr value = chain(attribute_of(out.binding, e.names[0], e.span), e.names, 1, e.span);
        scope_.pop_back();
        out.type = value.type;
        out.classifier = value.classifier;
        out.operands.push_back(std::move(value));
        return out;
      }
    }
    throw ResolveError("unsupported expression", e.span);
  }

  BExpr resolve_arith(const Expr& e) {
    const Expr& l = e.operands[0];
    const Expr& r = e.operands[1];
    BExpr lb, rb;
    auto hint_from = [](const BExpr& other) {
      return other.type == TypeTag::Duration ? TypeTag::Nil : other.type;
    };
    if (is_typeless(l) && !is_typeless(r)) {
      rb = resolve_expr(r);
      lb = resolve_expr(l, hint_from(rb));
    } else {
      lb = resolve_expr(l);
      rb = resolve_expr(r, hint_from(lb));
    }
    auto numeric = [](TypeTag t) { return t == TypeTag::Integer || t == TypeTag::Real; };
    BExpr out;
    out.kind = BExpr::Arith;
    out.op = e.op;
    if (numeric(lb.type) && numeric(rb.type) && !lb.instance_ref && !rb.instance_ref) {
      out.type = e.op != ArithOp::Div && lb.type == TypeTag::Integer && rb.type == TypeTag::Integer
                     ? TypeTag::Integer
                     : TypeTag::Real;
    } else if (e.op == ArithOp::Sub && lb.type == rb.type &&
               (lb.type == TypeTag::Date || lb.type == TypeTag::DateTime)) {
      out.type = TypeTag::Duration;
    } else if ((lb.type == TypeTag::Nil && lb.kind == BExpr::Const) ||
               (rb.type == TypeTag::Nil && rb.kind == BExpr::Const)) {
      out.type = lb.type == TypeTag::Nil ? rb.type : lb.type;
    } else {
      throw ResolveError("operator '" + std::string(symbol(e.op)) + "' does not apply to " +
                             std::string(type_name(lb.type)) + " and " +
                             std::string(type_name(rb.type)),
                         e.span);
    }
    out.operands.push_back(std::move(lb));
    out.operands.push_back(std::move(rb));
    return out;
  }

  TypeTag check_aggregate(AggKind agg, const BExpr& value, Span span) const {
    auto numeric = value.type == TypeTag::Integer || value.type == TypeTag::Real;
    if (value.instance_ref) {
      throw ResolveError("aggregates need an attribute expression, not an instance", span);
    }
    switch (agg) {
      case AggKind::Count:
      case AggKind::CountDistinct: return TypeTag::Integer;
      case AggKind::Sum:
        if (!numeric) throw ResolveError("SUM needs a number", span);
        return value.type;
      case AggKind::Avg:
        if (!numeric) throw ResolveError("AVG needs a number", span);
        return TypeTag::Real;
      case AggKind::Max:
      case AggKind::Min:
        if (!orderable(value.type)) {
          throw ResolveError(std::string(name_of(agg)) + " needs an ordered type, not " +
                                 std::string(type_name(value.type)),
                             span);
        }
        return value.type;
      case AggKind::Most: return value.type;
    }
    return value.type;
  }

  // --- conditions ---------------------------------------------------------------------

  std::unique_ptr<BCond> resolve_cond(const Cond& c) {
    auto out = std::make_unique<BCond>();
    out->kind = static_cast<BCond::Kind>(c.kind);
    switch (c.kind) {
      case Cond::And:
      case Cond::Or:
        out->left = resolve_cond(*c.left);
        out->right = resolve_cond(*c.right);
        break;
      case Cond::Quantor:
        out->quantor = c.quantor;
        out->binding = declare(c.target, Role::Quantor);
        scope_.push_back(out->binding);
        if (c.where) {
          out->where = resolve_cond(*c.where);
        } else if (c.quantor == QuantorKind::ForAll) {
          note("FORALL without WHERE is always true");
        }
        scope_.pop_back();
        break;
      case Cond::Compare: resolve_compare(c, *out); break;
    }
    return out;
  }

  std::optional<BExpr> try_resolve(const Expr& e, std::optional<UnknownName>& unknown) {
    if (is_typeless(e)) return std::nullopt;
    if (e.kind == Expr::Path && e.names.size() == 1) {
      try {
        return resolve_expr(e);
      } catch (const UnknownName& u) {
        unknown = u;
        return std::nullopt;
      }
    }
    return resolve_expr(e);
  }

  BExpr literal_for(const Expr& e, BExpr& other, const std::optional<UnknownName>& unknown,
                    Span span) {
    if (e.kind == Expr::Nil) return constant(Value());
    if (e.kind == Expr::Star) {
      throw ResolveError("'*' is only allowed as attr=* inside a child selector", e.span);
    }
    if (other.instance_ref) {
      if (unknown) throw *unknown;
      throw ResolveError("an instance can only be compared with another instance", span);
    }
    if (other.type == TypeTag::Classifier) {
      const ClassifierDef& def = schema_.classifier(other.classifier);
      if (other.kind == BExpr::Attr && !other.hop &&
          q_.bindings[other.binding].kind == BindingKind::Instance) {
        other.hop = def.key_index;
      } else if (other.kind == BExpr::BindingRef &&
                 q_.bindings[other.binding].kind == BindingKind::Classifier) {
        other.kind = BExpr::Attr;
        other.attr = def.key_index;
      } else {
        throw ResolveError("compare a classifier value through its ." + def.key_attribute, span);
      }
      set_type(other, def.attributes[def.key_index].type);
    }
    const std::string& text = e.kind == Expr::Path ? e.names[0] : e.text;
    try {
      TypeTag hint = other.type;
      if ((hint == TypeTag::Integer || hint == TypeTag::Real) && !e.quoted) {
        hint = numeric_hint(text);
        if (other.type == TypeTag::Real) hint = TypeTag::Real;
      }
      return typed_literal(text, e.quoted, hint, e.span);
    } catch (const ResolveError&) {
      if (unknown) throw *unknown;
      throw;
    }
  }

  void resolve_compare(const Cond& c, BCond& out) {
    const Expr& l = *c.lhs;
    const Expr& r = *c.rhs;
    out.op = c.op;

    if (r.kind == Expr::Star) {
      if (selector_ < 0 || c.op != CompareOp::Eq) {
        throw ResolveError("'*' is only allowed as attr=* inside a child selector", r.span);
      }
      out.lhs = resolve_expr(l);
      if (!orderable(out.lhs.type)) {
        throw ResolveError("attr=* needs an ordered attribute", l.span);
      }
      out.rhs.kind = BExpr::MaxOf;
      out.rhs.binding = selector_;
      out.rhs.type = out.lhs.type;
      out.rhs.operands.push_back(resolve_expr(l));
      return;
    }

    std::optional<UnknownName> lu, ru;
    std::optional<BExpr> lb = try_resolve(l, lu);
    std::optional<BExpr> rb = try_resolve(r, ru);
    if (lb && !rb) {
      rb = literal_for(r, *lb, ru, c.span);
    } else if (!lb && rb) {
      lb = literal_for(l, *rb, lu, c.span);
      std::swap(lb, rb);
      out.op = flipped(out.op);
    } else if (!lb && !rb) {
      if (lu) throw *lu;
      if (ru) throw *ru;
      lb = resolve_expr(l);
      rb = resolve_expr(r);
    }
    out.lhs = std::move(*lb);
    out.rhs = std::move(*rb);

    const BExpr& a = out.lhs;
    const BExpr& b = out.rhs;
    bool nil_test = (a.kind == BExpr::Const && a.type == TypeTag::Nil) ||
                    (b.kind == BExpr::Const && b.type == TypeTag::Nil);
    if (a.instance_ref || b.instance_ref) {
      if (nil_test && (out.op == CompareOp::Eq || out.op == CompareOp::Ne)) return;
      if (!(a.instance_ref && b.instance_ref) ||
          q_.bindings[a.binding].cls != q_.bindings[b.binding].cls) {
        throw ResolveError("instances can only be compared with instances of the same class",
                           c.span);
      }
      if (out.op != CompareOp::Eq && out.op != CompareOp::Ne) {
        throw ResolveError("instances can only be compared with = or <>", c.span);
      }
      return;
    }
    if (!comparable(a.type, b.type) ||
        (a.type == TypeTag::Classifier && b.type == TypeTag::Classifier &&
         a.classifier != b.classifier)) {
      throw ResolveError("cannot compare " + describe(a) + " with " + describe(b), c.span);
    }
    if (out.op != CompareOp::Eq && out.op != CompareOp::Ne) {
      if (nil_test) throw ResolveError("nil can only be tested with = or <>", c.span);
      if (!orderable(a.type)) {
        throw ResolveError(describe(a) + " values have no order", c.span);
      }
    }
  }

  std::string describe(const BExpr& e) const {
    if (e.type == TypeTag::Classifier) return schema_.classifier(e.classifier).name;
    return std::string(type_name(e.type));
  }

  const Schema& schema_;
  BoundQuery q_;
  std::vector<int> scope_;
  int selector_ = -1;
  bool in_column_ = false;
  bool keep_mode_ = false;
};

}  // namespace

BoundQuery resolve(const QueryAst& ast, std::shared_ptr<const Schema> schema) {
  return Resolver(std::move(schema)).run(ast);
}

std::string binding_type_name(const BoundQuery& q, int slot) {
  const Binding& b = q.bindings[slot];
  switch (b.kind) {
    case BindingKind::Instance: return q.schema->cls(b.cls).name;
    case BindingKind::Classifier: return q.schema->classifier(b.classifier).name;
    case BindingKind::Scalar:
      if (b.scalar_type == TypeTag::Classifier) return q.schema->classifier(b.classifier).name;
      return std::string(type_name(b.scalar_type));
  }
  return "?";
}

std::vector<std::string> explain_bindings(const BoundQuery& q) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < q.bindings.size(); ++i) {
    const Binding& b = q.bindings[i];
    std::string line = b.name + ": " + binding_type_name(q, static_cast<int>(i)) + ", ";
    auto ctx = [&] {
      const Binding& c = q.bindings[b.context];
      return c.name + " (" + q.schema->cls(c.cls).name + ")";
    };
    switch (b.nav) {
      case Nav::Scan: line += "root scan"; break;
      case Nav::Global: line += "global"; break;
      case Nav::Child: line += "child of " + ctx(); break;
      case Nav::Parent: line += "parent of " + ctx(); break;
      case Nav::Brother:
        line += "brother of " + ctx() + " via " + q.schema->cls(b.anchor).name;
        break;
      case Nav::Values:
        line += q.kind == Template::TableInterval ? "interval value" : "distinct value";
        break;
    }
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace semiq
