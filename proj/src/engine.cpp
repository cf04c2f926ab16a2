#include "semiq/engine.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace semiq {

std::string_view name_of(QueryResult::Kind k) {
  switch (k) {
    case QueryResult::Scalar: return "scalar";
    case QueryResult::ValueList: return "values";
    case QueryResult::InstanceListing: return "listing";
    case QueryResult::TableResult: return "table";
  }
  return "?";
}

namespace {

struct Slot {
  InstanceRef inst;
  ClassifierRef cref;
  Value scalar;
};

struct Env {
  std::vector<Slot> slots;
  const std::vector<Value>* row = nullptr;  // KEEP ROWS
  WarningLog* warnings = nullptr;
};

using ExprFn = std::function<Value(Env&)>;
using CondFn = std::function<bool(Env&)>;
using Body = std::function<bool(Env&)>;
// Binds each candidate of one binding in turn; stops when `body` returns false.
using ScanFn = std::function<bool(Env&, const Body&)>;

Value instance_value(InstanceRef x) {
  return Value::integer((static_cast<std::int64_t>(x.cls) << 32) | x.row);
}

class Compiler {
 public:
  Compiler(const BoundQuery& q, const Store& store) : q_(q), store_(store) {}

  ScanFn scan(int slot) const {
    const Binding& b = q_.bindings[slot];
    const Store& store = store_;
    if (b.kind == BindingKind::Classifier) {
      ClassifierId id = b.classifier;
      auto n = static_cast<std::uint32_t>(store.classifier_size(id));
      return [slot, id, n](Env& env, const Body& body) {
        for (std::uint32_t r = 0; r < n; ++r) {
          env.slots[slot].cref = ClassifierRef{id, r};
          if (!body(env)) return false;
        }
        return true;
      };
    }
    if (b.kind == BindingKind::Scalar) throw EvalError("a value binding has no scan");
    ClassId cls = b.cls;
    int ctx = b.context;
    switch (b.nav) {
      case Nav::Scan:
      case Nav::Global:
      case Nav::Values: {
        return [slot, cls, &store](Env& env, const Body& body) {
          auto n = static_cast<std::uint32_t>(store.size(cls));
          for (std::uint32_t r = 0; r < n; ++r) {
            env.slots[slot].inst = InstanceRef{cls, r};
            if (!body(env)) return false;
          }
          return true;
        };
      }
      case Nav::Child:
        return [slot, cls, ctx, &store](Env& env, const Body& body) {
          return store.for_each_descendant(env.slots[ctx].inst, cls, [&](InstanceRef x) {
            env.slots[slot].inst = x;
            return body(env);
          });
        };
      case Nav::Parent:
        return [slot, cls, ctx, &store](Env& env, const Body& body) {
          env.slots[slot].inst = store.parent_of(env.slots[ctx].inst, cls);
          return body(env);
        };
      case Nav::Brother: {
        ClassId anchor = b.anchor;
        return [slot, cls, ctx, anchor, &store](Env& env, const Body& body) {
          InstanceRef a = store.parent_of(env.slots[ctx].inst, anchor);
          return store.for_each_descendant(a, cls, [&](InstanceRef x) {
            env.slots[slot].inst = x;
            return body(env);
          });
        };
      }
    }
    throw EvalError("unknown navigation");
  }

  CondFn cond(const BCond& c) const {
    switch (c.kind) {
      case BCond::Compare: {
        ExprFn l = expr(c.lhs);
        ExprFn r = expr(c.rhs);
        CompareOp op = c.op;
        auto nil_literal = [](const BExpr& x) {
          return x.kind == BExpr::Const && x.value.is_nil();
        };
        if (nil_literal(c.lhs) || nil_literal(c.rhs)) {
          return [l, r, op](Env& env) { return compare(op, l(env), r(env)); };
        }
        return [l, r, op](Env& env) {
          Value a = l(env);
          Value b = r(env);
          if (a.is_nil() || b.is_nil()) return false;
          return compare(op, a, b);
        };
      }
      case BCond::And: {
        CondFn l = cond(*c.left);
        CondFn r = cond(*c.right);
        return [l, r](Env& env) { return l(env) && r(env); };
      }
      case BCond::Or: {
        CondFn l = cond(*c.left);
        CondFn r = cond(*c.right);
        return [l, r](Env& env) { return l(env) || r(env); };
      }
      case BCond::Quantor: {
        ScanFn s = scan(c.binding);
        CondFn where = c.where ? cond(*c.where) : CondFn();
        switch (c.quantor) {
          case QuantorKind::Exists:
          case QuantorKind::NotExists: {
            bool negate = c.quantor == QuantorKind::NotExists;
            return [s, where, negate](Env& env) {
              bool found = false;
              s(env, [&](Env& e) {
                if (!where || where(e)) {
                  found = true;
                  return false;
                }
                return true;
              });
              return found != negate;
            };
          }
          case QuantorKind::ForAll:
            return [s, where](Env& env) {
              if (!where) return true;
              bool all = true;
              s(env, [&](Env& e) {
                if (!where(e)) {
                  all = false;
                  return false;
                }
                return true;
              });
              return all;
            };
        }
      }
    }
    throw EvalError("unknown condition");
  }

  ExprFn expr(const BExpr& e) const {
    const Store& store = store_;
    switch (e.kind) {
      case BExpr::Const: {
        Value v = e.value;
        return [v](Env&) { return v; };
      }
      case BExpr::Attr: {
        int slot = e.binding;
        std::size_t attr = e.attr;
        if (q_.bindings[slot].kind == BindingKind::Classifier) {
          return [slot, attr, &store](Env& env) {
            return store.classifier_value(env.slots[slot].cref, attr);
          };
        }
        ClassId owner = e.owner;
        if (e.hop) {
          std::size_t hop = *e.hop;
          return [slot, owner, attr, hop, &store](Env& env) {
            const Value& v = store.value(store.parent_of(env.slots[slot].inst, owner), attr);
            if (v.is_nil()) return Value();
            return store.classifier_value(v.as_classifier(), hop);
          };
        }
        return [slot, owner, attr, &store](Env& env) {
          return store.value(store.parent_of(env.slots[slot].inst, owner), attr);
        };
      }
      case BExpr::BindingRef: {
        int slot = e.binding;
        switch (q_.bindings[slot].kind) {
          case BindingKind::Instance:
            return [slot](Env& env) { return instance_value(env.slots[slot].inst); };
          case BindingKind::Classifier:
            return [slot](Env& env) { return Value::classifier(env.slots[slot].cref); };
          case BindingKind::Scalar:
            return [slot](Env& env) { return env.slots[slot].scalar; };
        }
        break;
      }
      case BExpr::Call: {
        ExprFn target = expr(e.operands[0]);
        switch (e.fn) {
          case CallFn::Temporal: {
            TemporalField f = e.field;
            return [target, f](Env& env) { return datetime_unary(target(env), f); };
          }
          case CallFn::Duration: {
            DurationUnit u = e.unit;
            return [target, u](Env& env) { return duration_accessor(target(env), u); };
          }
          case CallFn::Substring: {
            ExprFn first = expr(e.operands[1]);
            ExprFn last = expr(e.operands[2]);
            return [target, first, last](Env& env) {
              Value s = target(env);
              Value i = first(env);
              Value j = last(env);
              if (s.is_nil() || i.is_nil() || j.is_nil()) return Value();
              return substring(s, i.as_integer(), j.as_integer(), env.warnings);
            };
          }
        }
        break;
      }
      case BExpr::Arith: {
        ExprFn l = expr(e.operands[0]);
        ExprFn r = expr(e.operands[1]);
        ArithOp op = e.op;
        return [l, r, op](Env& env) { return arith(op, l(env), r(env), env.warnings); };
      }
      case BExpr::Negate: {
        ExprFn inner = expr(e.operands[0]);
        return [inner](Env& env) {
          Value v = inner(env);
          if (v.tag() == TypeTag::Integer) return arith(ArithOp::Sub, Value::integer(0), v, env.warnings);
          if (v.tag() == TypeTag::Real) return Value::real(-v.as_real());
          return Value();
        };
      }
      case BExpr::Count: {
        ScanFn s = scan(e.binding);
        CondFn where = e.where ? cond(*e.where) : CondFn();
        return [s, where](Env& env) {
          std::int64_t n = 0;
          s(env, [&](Env& x) {
            if (!where || where(x)) ++n;
            return true;
          });
          return Value::integer(n);
        };
      }
      case BExpr::Aggregate: {
        ScanFn s = scan(e.binding);
        CondFn where = e.where ? cond(*e.where) : CondFn();
        ExprFn value = expr(e.operands[0]);
        AggKind agg = e.agg;
        return [s, where, value, agg](Env& env) {
          std::vector<Value> values;
          s(env, [&](Env& x) {
            if (!where || where(x)) values.push_back(value(x));
            return true;
          });
          return eval_aggregate(agg, values, env.warnings);
        };
      }
      case BExpr::Selector: {
        ScanFn s = scan(e.binding);
        CondFn where = e.where ? cond(*e.where) : CondFn();
        ExprFn value = expr(e.operands[0]);
        return [s, where, value](Env& env) {
          Value::List values;
          s(env, [&](Env& x) {
            if (!where || where(x)) values.push_back(value(x));
            return true;
          });
          if (values.empty()) return Value();
          if (values.size() == 1) return values.front();
          return Value::list(std::move(values));
        };
      }
      case BExpr::MaxOf: {
        ScanFn s = scan(e.binding);
        ExprFn value = expr(e.operands[0]);
        int slot = e.binding;
        return [s, value, slot](Env& env) {
          Slot saved = env.slots[slot];
          Value best;
          s(env, [&](Env& x) {
            Value v = value(x);
            if (v.is_nil()) return true;
            auto o = order(v, best);
            if (best.is_nil() || (o && *o > 0)) best = std::move(v);
            return true;
          });
          env.slots[slot] = std::move(saved);
          return best;
        };
      }
      case BExpr::Column: {
        std::size_t i = e.column;
        return [i](Env& env) { return (*env.row)[i]; };
      }
    }
    throw EvalError("unknown expression");
  }

 private:
  const BoundQuery& q_;
  const Store& store_;
};

// Sort key: scalars, then lists (lexicographic), then nil.
int sort_order(const Value& a, const Value& b) {
  if (a.is_nil() || b.is_nil()) return a.is_nil() == b.is_nil() ? 0 : a.is_nil() ? 1 : -1;
  bool la = a.tag() == TypeTag::List;
  bool lb = b.tag() == TypeTag::List;
  if (la != lb) return la ? 1 : -1;
  if (!la) {
    auto o = order(a, b);
    return !o || *o == 0 ? 0 : *o < 0 ? -1 : 1;
  }
  const auto& xs = a.as_list();
  const auto& ys = b.as_list();
  for (std::size_t i = 0; i < xs.size() && i < ys.size(); ++i) {
    if (int o = sort_order(xs[i], ys[i])) return o;
  }
  return xs.size() < ys.size() ? -1 : xs.size() > ys.size() ? 1 : 0;
}

// Runs fn(begin, end, env) over [0, n) in contiguous chunks and merges the
// per-chunk warnings in chunk order.
template <typename Fn>
void partitioned(std::size_t n, unsigned threads, Env& base, Fn&& fn) {
  constexpr std::size_t kMinChunk = 2048;
  std::size_t chunks = std::min<std::size_t>(threads, (n + kMinChunk - 1) / kMinChunk);
  if (chunks <= 1) {
    fn(0, n, base);
    return;
  }
  std::vector<Env> envs(chunks, base);
  std::vector<WarningLog> logs(chunks);
  std::vector<std::thread> workers;
  for (std::size_t c = 0; c < chunks; ++c) {
    envs[c].warnings = &logs[c];
    std::size_t begin = n * c / chunks;
    std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] { fn(begin, end, envs[c]); });
  }
  for (auto& w : workers) w.join();
  for (auto& log : logs) base.warnings->merge(log);
}

class Executor {
 public:
  Executor(const BoundQuery& q, const Store& store, const EngineOptions& options, QueryResult& r)
      : q_(q), store_(store), compiler_(q, store), result_(r) {
    threads_ = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
    env_.slots.resize(q.bindings.size());
    env_.warnings = &r.warnings;
  }

  void run() {
    switch (q_.kind) {
      case Template::Count:
        result_.scalar = Value::integer(static_cast<std::int64_t>(select().size()));
        break;
      case Template::Aggregate:
        result_.scalar = eval_aggregate(q_.agg, attribute_values(), env_.warnings);
        break;
      case Template::Distinct:
        result_.kind = QueryResult::ValueList;
        result_.values = distinct(attribute_values());
        break;
      case Template::Show:
      case Template::FullShow:
        result_.kind = QueryResult::InstanceListing;
        show();
        break;
      case Template::Table: {
        std::vector<std::uint32_t> rows = select();
        table(rows.size(), [&](std::size_t i, Env& env) { bind_source(env, rows[i]); });
        break;
      }
      case Template::TableDistinct: {
        std::vector<Value> values = distinct(attribute_values());
        table(values.size(), [&](std::size_t i, Env& env) {
          env.slots[q_.row_var].scalar = values[i];
        });
        break;
      }
      case Template::TableInterval: {
        std::int64_t start = q_.interval_start;
        auto n = static_cast<std::size_t>(q_.interval_end - q_.interval_start + 1);
        table(n, [&](std::size_t i, Env& env) {
          env.slots[q_.row_var].scalar = Value::integer(start + static_cast<std::int64_t>(i));
        });
        break;
      }
    }
  }

 private:
  const Binding& source() const { return q_.bindings[q_.source]; }

  std::size_t source_size() const {
    const Binding& b = source();
    return b.kind == BindingKind::Classifier ? store_.classifier_size(b.classifier)
                                             : store_.size(b.cls);
  }

  void bind_source(Env& env, std::uint32_t row) const {
    const Binding& b = source();
    if (b.kind == BindingKind::Classifier) {
      env.slots[q_.source].cref = ClassifierRef{b.classifier, row};
    } else {
      env.slots[q_.source].inst = InstanceRef{b.cls, row};
    }
  }

  // Source rows satisfying the WHERE condition, in load order.
  std::vector<std::uint32_t> select() {
    std::size_t n = source_size();
    CondFn where = q_.where ? compiler_.cond(*q_.where) : CondFn();
    std::vector<char> keep(n, 1);
    if (where) {
      partitioned(n, threads_, env_, [&](std::size_t begin, std::size_t end, Env& env) {
        for (std::size_t i = begin; i < end; ++i) {
          bind_source(env, static_cast<std::uint32_t>(i));
          keep[i] = where(env) ? 1 : 0;
        }
      });
    }
    std::vector<std::uint32_t> rows;
    for (std::size_t i = 0; i < n; ++i) {
      if (keep[i]) rows.push_back(static_cast<std::uint32_t>(i));
    }
    return rows;
  }

  std::vector<Value> attribute_values() {
    std::vector<std::uint32_t> rows = select();
    ExprFn value = compiler_.expr(*q_.attribute);
    std::vector<Value> out(rows.size());
    partitioned(rows.size(), threads_, env_, [&](std::size_t begin, std::size_t end, Env& env) {
      for (std::size_t i = begin; i < end; ++i) {
        bind_source(env, rows[i]);
        out[i] = value(env);
      }
    });
    return out;
  }

  static std::vector<Value> distinct(const std::vector<Value>& values) {
    std::unordered_set<Value, ValueHash, ValueIdentical> seen;
    std::vector<Value> out;
    for (const auto& v : values) {
      if (v.is_nil()) continue;
      if (seen.insert(v).second) out.push_back(v);
    }
    return out;
  }

  ListingNode node(InstanceRef x, bool full) const {
    const ClassDef& def = store_.schema().cls(x.cls);
    ListingNode n;
    n.cls = def.name;
    n.label = store_.label(x);
    auto row = store_.row(x);
    n.values.assign(row.begin(), row.end());
    if (full) {
      for (ClassId child : def.children) {
        for (std::uint32_t r : store_.children(x, child)) {
          n.children.push_back(node(InstanceRef{child, r}, true));
        }
      }
    }
    return n;
  }

  void show() {
    std::vector<std::uint32_t> rows = select();
    Listing& l = result_.listing;
    l.matched = rows.size();
    std::size_t limit = rows.size();
    if (q_.limit) limit = std::min<std::size_t>(limit, static_cast<std::size_t>(std::max<std::int64_t>(0, *q_.limit)));
    const Binding& b = source();
    if (b.kind == BindingKind::Classifier) {
      const ClassifierDef& def = store_.schema().classifier(b.classifier);
      l.cls = def.name;
      for (const auto& a : def.attributes) l.attributes.push_back(a.name);
      for (std::size_t i = 0; i < limit; ++i) {
        ClassifierRef ref{b.classifier, rows[i]};
        ListingNode n;
        n.cls = def.name;
        n.label = store_.classifier_key(ref);
        for (std::size_t a = 0; a < def.attributes.size(); ++a) {
          n.values.push_back(store_.classifier_value(ref, a));
        }
        l.nodes.push_back(std::move(n));
      }
      return;
    }
    const ClassDef& def = store_.schema().cls(b.cls);
    l.cls = def.name;
    for (const auto& a : def.attributes) l.attributes.push_back(a.name);
    for (std::size_t i = 0; i < limit; ++i) {
      l.nodes.push_back(node(InstanceRef{b.cls, rows[i]}, q_.kind == Template::FullShow));
    }
  }

  template <typename Bind>
  void table(std::size_t n, Bind&& bind) {
    result_.kind = QueryResult::TableResult;
    Table& t = result_.table;
    std::vector<ExprFn> columns;
    for (const auto& c : q_.columns) {
      t.columns.push_back(c.name);
      columns.push_back(compiler_.expr(c.expr));
    }
    t.rows.assign(n, std::vector<Value>(columns.size()));
    partitioned(n, threads_, env_, [&](std::size_t begin, std::size_t end, Env& env) {
      for (std::size_t i = begin; i < end; ++i) {
        bind(i, env);
        for (std::size_t c = 0; c < columns.size(); ++c) t.rows[i][c] = columns[c](env);
      }
    });
    post_ops();
  }

  void post_ops() {
    Table& t = result_.table;
    if (q_.keep) {
      CondFn keep = compiler_.cond(*q_.keep);
      std::vector<std::vector<Value>> kept;
      for (auto& row : t.rows) {
        env_.row = &row;
        if (keep(env_)) kept.push_back(std::move(row));
      }
      env_.row = nullptr;
      t.rows = std::move(kept);
    }
    if (q_.sort) {
      std::size_t c = q_.sort->column;
      bool descending = q_.sort->descending;
      std::stable_sort(t.rows.begin(), t.rows.end(), [&](const auto& x, const auto& y) {
        const Value& a = x[c];
        const Value& b = y[c];
        int o = sort_order(a, b);
        if (a.is_nil() || b.is_nil()) return o < 0;
        return descending ? o > 0 : o < 0;
      });
    }
    if (q_.leave) {
      auto keep = static_cast<std::size_t>(q_.leave->count);
      if (keep < t.rows.size()) {
        if (q_.leave->last) {
          t.rows.erase(t.rows.begin(), t.rows.end() - static_cast<std::ptrdiff_t>(keep));
        } else {
          t.rows.resize(keep);
        }
      }
    }
  }

  const BoundQuery& q_;
  const Store& store_;
  Compiler compiler_;
  QueryResult& result_;
  Env env_;
  unsigned threads_ = 1;
};

}  // namespace

Value eval_aggregate(AggKind kind, const std::vector<Value>& values, WarningLog* warnings) {
  std::vector<const Value*> items;
  items.reserve(values.size());
  std::size_t nils = 0;
  for (const auto& v : values) {
    if (v.is_nil()) {
      ++nils;
    } else {
      items.push_back(&v);
    }
  }
  std::string name(name_of(kind));
  if (nils && warnings) warnings->add("nil values skipped by " + name, nils);
  auto empty = [&] {
    if (warnings) warnings->add(name + " of no values is nil");
    return Value();
  };
  switch (kind) {
    case AggKind::Count: return Value::integer(static_cast<std::int64_t>(items.size()));
    case AggKind::CountDistinct: {
      std::unordered_set<Value, ValueHash, ValueIdentical> seen;
      for (const Value* v : items) seen.insert(*v);
      return Value::integer(static_cast<std::int64_t>(seen.size()));
    }
    case AggKind::Sum: {
      if (items.empty()) return Value::integer(0);
      Value acc = *items[0];
      for (std::size_t i = 1; i < items.size(); ++i) acc = arith(ArithOp::Add, acc, *items[i], warnings);
      return acc;
    }
    case AggKind::Avg: {
      if (items.empty()) return empty();
      double sum = 0;
      for (const Value* v : items) sum += v->numeric();
      return Value::real(sum / static_cast<double>(items.size()));
    }
    case AggKind::Max:
    case AggKind::Min: {
      if (items.empty()) return empty();
      const Value* best = items[0];
      for (const Value* v : items) {
        auto o = order(*v, *best);
        if (o && (kind == AggKind::Max ? *o > 0 : *o < 0)) best = v;
      }
      return *best;
    }
    case AggKind::Most: {
      if (items.empty()) return empty();
      std::unordered_map<Value, std::size_t, ValueHash, ValueIdentical> counts;
      std::vector<const Value*> order_seen;
      for (const Value* v : items) {
        if (counts[*v]++ == 0) order_seen.push_back(v);
      }
      const Value* best = order_seen[0];
      for (const Value* v : order_seen) {
        std::size_t cv = counts[*v];
        std::size_t cb = counts[*best];
        if (cv > cb) {
          best = v;
        } else if (cv == cb) {
          auto o = order(*v, *best);
          if (o && *o < 0) best = v;
        }
      }
      return *best;
    }
  }
  return Value();
}

QueryResult execute(const BoundQuery& q, const Store& store, const EngineOptions& options) {
  auto start = std::chrono::steady_clock::now();
  QueryResult r;
  Executor(q, store, options, r).run();
  r.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace semiq
