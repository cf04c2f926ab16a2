#include <cctype>

#include "semiq/bound.hpp"

namespace semiq {

namespace {

bool bare_literal(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = s[0] == '-' ? 1 : 0;
  if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  for (char c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '.' && c != ':' &&
        c != '_') {
      return false;
    }
  }
  return std::isalnum(static_cast<unsigned char>(s.back())) != 0;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '\\';
    out += c;
  }
  return out + "\"";
}

int precedence(const BExpr& e) {
  if (e.kind == BExpr::Arith) return e.op == ArithOp::Add || e.op == ArithOp::Sub ? 1 : 2;
  if (e.kind == BExpr::Negate) return 3;
  return 4;
}

class Renderer {
 public:
  explicit Renderer(const BoundQuery& q) : q_(q), schema_(*q.schema) {}

  std::string query() {
    std::string out;
    switch (q_.kind) {
      case Template::Count:
        out = "COUNT " + source() + where(q_.where);
        break;
      case Template::Aggregate:
        out = std::string(name_of(q_.agg)) + " " + expr(*q_.attribute) + " FROM " + source() +
              where(q_.where);
        break;
      case Template::Distinct:
        out = "SELECT FROM " + source() + where(q_.where) + ", ATTRIBUTE " + expr(*q_.attribute) +
              " ALL DISTINCT VALUES";
        break;
      case Template::Show:
      case Template::FullShow:
        out = std::string(q_.kind == Template::Show ? "SHOW " : "FULLSHOW ") +
              (q_.limit ? std::to_string(*q_.limit) : "ALL") + " " + source() + where(q_.where);
        break;
      case Template::Table:
        out = "SELECT " + source() + where(q_.where) + table();
        break;
      case Template::TableDistinct:
        out = "SELECT FROM " + source() + where(q_.where) + ", ATTRIBUTE " + expr(*q_.attribute) +
              " ALL DISTINCT VALUES " + q_.bindings[q_.row_var].name + table();
        break;
      case Template::TableInterval:
        out = "SELECT FROM INTERVAL (" + std::to_string(q_.interval_start) + "-" +
              std::to_string(q_.interval_end) + ") ALL VALUES " + q_.bindings[q_.row_var].name +
              table();
        break;
    }
    return out;
  }

 private:
  std::string source() const { return class_ref(q_.source); }

  std::string class_ref(int slot) const {
    const Binding& b = q_.bindings[slot];
    std::string out;
    if (b.context >= 0) out = q_.bindings[b.context].name + ".";
    out += b.kind == BindingKind::Classifier ? schema_.classifier(b.classifier).name
                                             : schema_.cls(b.cls).name;
    return out + " " + b.name;
  }

  std::string where(const std::unique_ptr<BCond>& c) {
    return c ? ", WHERE " + cond(*c) : std::string();
  }

  std::string table() {
    std::string out = ", DEFINE TABLE ";
    for (std::size_t i = 0; i < q_.columns.size(); ++i) {
      if (i) out += ", ";
      out += expr(q_.columns[i].expr) + " (COLUMN " + q_.columns[i].name + ")";
    }
    if (q_.keep) out += ", KEEP ROWS WHERE " + cond(*q_.keep);
    if (q_.sort) {
      out += std::string(", SORT ") + (q_.sort->descending ? "DESCENDING" : "ASCENDING") +
             " BY COLUMN " + q_.columns[q_.sort->column].name;
    }
    if (q_.leave) {
      out += std::string(", LEAVE ") + (q_.leave->last ? "LAST " : "FIRST ") +
             std::to_string(q_.leave->count) + " ROWS";
    }
    return out;
  }

  // Whether the rendered condition ends in a WHERE that would absorb what follows.
  static bool open_ended(const BCond& c) {
    if (c.kind == BCond::Quantor) return c.where != nullptr;
    if (c.kind == BCond::And || c.kind == BCond::Or) return open_ended(*c.right);
    return false;
  }

  std::string cond(const BCond& c) {
    switch (c.kind) {
      case BCond::Compare: return compare(c);
      case BCond::Quantor:
        return std::string(name_of(c.quantor)) + " " + class_ref(c.binding) + where(c.where);
      case BCond::And:
      case BCond::Or: {
        auto side = [&](const BCond& s, bool left) {
          bool wrap = (left && open_ended(s)) ||
                      (c.kind == BCond::And && s.kind == BCond::Or) ||
                      (!left && (s.kind == BCond::And || s.kind == BCond::Or));
          std::string text = cond(s);
          return wrap ? "(" + text + ")" : text;
        };
        return side(*c.left, true) + (c.kind == BCond::And ? " AND " : " OR ") +
               side(*c.right, false);
      }
    }
    return {};
  }

  std::string compare(const BCond& c) {
    std::string lhs = expr(c.lhs);
    std::string rhs;
    if (c.rhs.kind == BExpr::Const && c.rhs.type == TypeTag::String && c.lhs.kind != BExpr::Const &&
        bare_literal(c.rhs.value.as_string())) {
      rhs = c.rhs.value.as_string();
    } else {
      rhs = expr(c.rhs);
    }
    return lhs + " " + std::string(symbol(c.op)) + " " + rhs;
  }

  std::string constant(const Value& v) const {
    switch (v.tag()) {
      case TypeTag::String: return quote(v.as_string());
      case TypeTag::Integer:
      case TypeTag::Real: {
        std::string s = render(v);
        return s[0] == '-' ? "(" + s + ")" : s;
      }
      default: return render(v);
    }
  }

  std::string wrapped(const BExpr& e, int min_prec) {
    std::string text = expr(e);
    return precedence(e) < min_prec ? "(" + text + ")" : text;
  }

  std::string expr(const BExpr& e) {
    switch (e.kind) {
      case BExpr::Const: return constant(e.value);
      case BExpr::Attr: {
        const Binding& b = q_.bindings[e.binding];
        std::string out = b.name + ".";
        if (b.kind == BindingKind::Classifier) {
          return out + schema_.classifier(b.classifier).attributes[e.attr].name;
        }
        const AttributeDef& a = schema_.cls(e.owner).attributes[e.attr];
        out += a.name;
        if (e.hop) out += "." + schema_.classifier(a.type.classifier).attributes[*e.hop].name;
        return out;
      }
      case BExpr::BindingRef: return q_.bindings[e.binding].name;
      case BExpr::Call: {
        std::string out = wrapped(e.operands[0], 4) + ".";
        switch (e.fn) {
          case CallFn::Temporal: return out + std::string(name_of(e.field)) + "()";
          case CallFn::Duration: return out + std::string(name_of(e.unit)) + "()";
          case CallFn::Substring:
            return out + "substring(" + expr(e.operands[1]) + "," + expr(e.operands[2]) + ")";
        }
        return out;
      }
      case BExpr::Arith: {
        int p = precedence(e);
        return wrapped(e.operands[0], p) + " " + std::string(symbol(e.op)) + " " +
               wrapped(e.operands[1], p + 1);
      }
      case BExpr::Negate: return "-" + wrapped(e.operands[0], 4);
      case BExpr::Count: return "(COUNT " + class_ref(e.binding) + where(e.where) + ")";
      case BExpr::Aggregate:
        return "(" + std::string(name_of(e.agg)) + " " + expr(e.operands[0]) + " FROM " +
               class_ref(e.binding) + where(e.where) + ")";
      case BExpr::Selector: {
        std::string value = expr(e.operands[0]);
        std::string prefix = q_.bindings[e.binding].name + ".";
        return "(" + class_ref(e.binding) + where(e.where) + ")." + value.substr(prefix.size());
      }
      case BExpr::MaxOf: return "*";
      case BExpr::Column: return q_.columns[e.column].name;
    }
    return {};
  }

  const BoundQuery& q_;
  const Schema& schema_;
};

bool equal_binding(const Binding& a, const Binding& b) {
  return a.name == b.name && a.kind == b.kind && a.cls == b.cls && a.classifier == b.classifier &&
         a.scalar_type == b.scalar_type && a.nav == b.nav && a.context == b.context &&
         a.anchor == b.anchor;
}

bool equal_cond(const std::unique_ptr<BCond>& a, const std::unique_ptr<BCond>& b);

bool equal_expr(const BExpr& a, const BExpr& b) {
  if (a.kind != b.kind || a.type != b.type || a.classifier != b.classifier ||
      a.instance_ref != b.instance_ref || a.binding != b.binding ||
      a.operands.size() != b.operands.size()) {
    return false;
  }
  switch (a.kind) {
    case BExpr::Const:
      if (!identical(a.value, b.value)) return false;
      break;
    case BExpr::Attr:
      if (a.owner != b.owner || a.attr != b.attr || a.hop != b.hop) return false;
      break;
    case BExpr::Call:
      if (a.fn != b.fn || (a.fn == CallFn::Temporal && a.field != b.field) ||
          (a.fn == CallFn::Duration && a.unit != b.unit)) {
        return false;
      }
      break;
    case BExpr::Arith:
      if (a.op != b.op) return false;
      break;
    case BExpr::Aggregate:
      if (a.agg != b.agg) return false;
      break;
    case BExpr::Column:
      if (a.column != b.column) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (!equal_expr(a.operands[i], b.operands[i])) return false;
  }
  return equal_cond(a.where, b.where);
}

bool equal_cond(const std::unique_ptr<BCond>& a, const std::unique_ptr<BCond>& b) {
  if (!a || !b) return !a && !b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case BCond::Compare:
      return a->op == b->op && equal_expr(a->lhs, b->lhs) && equal_expr(a->rhs, b->rhs);
    case BCond::Quantor:
      return a->quantor == b->quantor && a->binding == b->binding && equal_cond(a->where, b->where);
    case BCond::And:
    case BCond::Or: return equal_cond(a->left, b->left) && equal_cond(a->right, b->right);
  }
  return false;
}

}  // namespace

std::string render_canonical(const BoundQuery& q) { return Renderer(q).query(); }

bool structurally_equal(const BoundQuery& a, const BoundQuery& b) {
  if (a.kind != b.kind || a.source != b.source || a.row_var != b.row_var ||
      a.bindings.size() != b.bindings.size() || a.columns.size() != b.columns.size()) {
    return false;
  }
  for (std::size_t i = 0; i < a.bindings.size(); ++i) {
    if (!equal_binding(a.bindings[i], b.bindings[i])) return false;
  }
  if (!equal_cond(a.where, b.where) || !equal_cond(a.keep, b.keep)) return false;
  if ((a.kind == Template::Aggregate && a.agg != b.agg) || a.limit != b.limit ||
      a.interval_start != b.interval_start || a.interval_end != b.interval_end) {
    return false;
  }
  if (bool(a.attribute) != bool(b.attribute) ||
      (a.attribute && !equal_expr(*a.attribute, *b.attribute))) {
    return false;
  }
  for (std::size_t i = 0; i < a.columns.size(); ++i) {
    if (a.columns[i].name != b.columns[i].name ||
        !equal_expr(a.columns[i].expr, b.columns[i].expr)) {
      return false;
    }
  }
  if (bool(a.sort) != bool(b.sort) ||
      (a.sort && (a.sort->descending != b.sort->descending || a.sort->column != b.sort->column))) {
    return false;
  }
  if (bool(a.leave) != bool(b.leave) ||
      (a.leave && (a.leave->last != b.leave->last || a.leave->count != b.leave->count))) {
    return false;
  }
  return true;
}

}  // namespace semiq
