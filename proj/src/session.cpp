#include "semiq/session.hpp"

#include <cctype>
#include <chrono>
#include <functional>

namespace semiq {

std::string_view name_of(QueryOutcome::Status s) {
  switch (s) {
    case QueryOutcome::Ok: return "ok";
    case QueryOutcome::ParseFailed: return "parse_error";
    case QueryOutcome::ResolveFailed: return "resolve_error";
    case QueryOutcome::InternalFailed: return "internal_error";
  }
  return "?";
}

std::string token_echo(std::string_view text) {
  std::string out;
  for (const auto& t : tokenize(text)) {
    if (t.kind == TokenKind::End) break;
    std::string piece = t.text;
    if (t.kind == TokenKind::Word && is_keyword(piece)) {
      for (auto& c : piece) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    } else if (t.kind == TokenKind::String) {
      piece = "\"" + piece + "\"";
    }
    bool glue = piece == "." || piece == "," || piece == ")" ||
                (!out.empty() && (out.back() == '.' || out.back() == '('));
    if (!out.empty() && !glue) out += ' ';
    out += piece;
  }
  return out;
}

Session::Session(std::shared_ptr<const Schema> schema, Store store, LoadReport report,
                 double load_ms)
    : schema_(std::move(schema)),
      store_(std::move(store)),
      report_(std::move(report)),
      load_ms_(load_ms) {}

Session Session::open(const SessionConfig& cfg) {
  auto start = std::chrono::steady_clock::now();
  auto schema = std::make_shared<const Schema>(load_schema_file(cfg.schema));
  MappingSpec mapping = load_mapping_file(cfg.mapping);
  LoadResult loaded = load(schema, mapping, cfg.data);
  double ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return Session(schema, std::move(loaded.store), std::move(loaded.report), ms);
}

QueryOutcome Session::run(std::string_view text, const EngineOptions& options) const {
  QueryOutcome out;
  out.query = std::string(text);
  QueryAst ast;
  try {
    ast = parse_query(text);
  } catch (const ParseError& e) {
    out.status = QueryOutcome::ParseFailed;
    out.error = e.what();
    out.span = e.span();
    out.expected = e.expected();
    out.template_prefix = e.template_prefix();
    return out;
  }
  BoundQuery bq;
  try {
    bq = resolve(ast, schema_);
  } catch (const ResolveError& e) {
    out.status = QueryOutcome::ResolveFailed;
    out.parse_back = token_echo(text);
    out.error = e.what();
    out.span = e.span();
    out.template_prefix = std::string(label_of(ast.kind));
    return out;
  }
  out.parse_back = render_canonical(bq);
  out.bindings = explain_bindings(bq);
  out.notes = bq.notes;
  try {
    out.result = execute(bq, store_, options);
  } catch (const std::exception& e) {
    out.status = QueryOutcome::InternalFailed;
    out.error = e.what();
  }
  return out;
}

std::string describe_schema(const Store& store) {
  const Schema& schema = store.schema();
  std::string out;
  std::function<void(ClassId, int)> walk = [&](ClassId id, int depth) {
    const ClassDef& c = schema.cls(id);
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    out += indent + c.name + " (" + std::to_string(store.size(id)) + ")\n";
    for (const auto& a : c.attributes) {
      out += indent + "  ." + a.name + ": " + schema.describe_type(a.type) + "\n";
    }
    for (ClassId child : c.children) walk(child, depth + 1);
  };
  if (!schema.classes().empty()) walk(schema.root(), 0);
  if (!schema.classifiers().empty()) out += "classifiers:\n";
  for (std::size_t i = 0; i < schema.classifiers().size(); ++i) {
    const ClassifierDef& k = schema.classifiers()[i];
    out += "  " + k.name + " key " + k.key_attribute + " (" +
           std::to_string(store.classifier_size(static_cast<ClassifierId>(i))) + ")\n";
    for (const auto& a : k.attributes) {
      out += "    ." + a.name + ": " + schema.describe_type(a.type) + "\n";
    }
  }
  return out;
}

}  // namespace semiq
