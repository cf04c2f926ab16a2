#include "semiq/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "semiq/wire.hpp"

namespace semiq {

namespace {

std::string ms_text(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

std::string trim(std::string_view s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string caret_diagnostic(const QueryOutcome& o) {
  std::string kind = o.status == QueryOutcome::ParseFailed     ? "parse error"
                     : o.status == QueryOutcome::ResolveFailed ? "resolve error"
                                                               : "internal error";
  std::string out = "  " + o.query + "\n";
  if (o.status != QueryOutcome::InternalFailed) {
    std::size_t offset = std::min(o.span.offset, o.query.size());
    std::size_t column = utf8_length(std::string_view(o.query).substr(0, offset));
    std::size_t length = utf8_length(std::string_view(o.query).substr(offset, o.span.length));
    out += "  " + std::string(column, ' ') + std::string(std::max<std::size_t>(length, 1), '^') + "\n";
  }
  out += kind + ": " + o.error + "\n";
  if (!o.expected.empty()) {
    out += "  expected one of:";
    for (const auto& e : o.expected) out += " " + e;
    out += "\n";
  }
  if (!o.template_prefix.empty()) out += "  recognized so far: " + o.template_prefix + "\n";
  return out;
}

std::string render_outcome(const QueryOutcome& o, const Store& store, const SessionConfig& cfg) {
  if (cfg.format == OutputFormat::JsonLines) return outcome_json(o, store).dump() + "\n";
  if (o.status != QueryOutcome::Ok) return caret_diagnostic(o);
  std::string out;
  if (cfg.format == OutputFormat::Csv) {
    out = format_csv(*o.result, store);
  } else {
    if (cfg.echo) {
      out += "= " + o.parse_back + "\n";
      for (const auto& b : o.bindings) out += "  " + b + "\n";
      for (const auto& n : o.notes) out += "  note: " + n + "\n";
    }
    out += format_text(*o.result, store);
    for (const auto& w : o.result->warnings.lines()) out += "warning: " + w + "\n";
  }
  if (cfg.timing && cfg.format == OutputFormat::Text) {
    out += "(" + ms_text(o.result->elapsed_ms) + " ms)\n";
  }
  return out;
}

std::vector<std::string> read_batch(std::istream& in) {
  std::vector<std::string> queries;
  std::string line;
  std::string pending;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (pending.empty() && (t.empty() || t[0] == '#')) continue;
    if (!t.empty() && t.back() == '\\') {
      t.pop_back();
      pending += trim(t) + " ";
      continue;
    }
    pending += t;
    std::string q = trim(pending);
    pending.clear();
    if (!q.empty()) queries.push_back(q);
  }
  if (!trim(pending).empty()) queries.push_back(trim(pending));
  return queries;
}

int run_batch(const Session& session, const SessionConfig& cfg, std::istream& in,
              std::ostream& out) {
  int status = 0;
  bool first = true;
  for (const auto& q : read_batch(in)) {
    QueryOutcome o = session.run(q, cfg.engine);
    if (o.status != QueryOutcome::Ok) status = 1;
    if (cfg.format == OutputFormat::Text && !first) out << "\n";
    first = false;
    if (cfg.format == OutputFormat::Text && cfg.echo) out << "> " << q << "\n";
    out << render_outcome(o, session.store(), cfg);
  }
  return status;
}

int run_repl(const Session& session, SessionConfig cfg, std::istream& in, std::ostream& out,
             bool prompt) {
  cfg.timing = true;
  out << session.report().render();
  out << "loaded in " << ms_text(session.load_ms()) << " ms; :help for commands\n";
  std::optional<QueryResult> last;
  std::string line;
  while (true) {
    if (prompt) out << "semiq> " << std::flush;
    if (!std::getline(in, line)) break;
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == ':') {
      std::string cmd = t.substr(0, t.find(' '));
      std::string arg = cmd.size() < t.size() ? trim(t.substr(cmd.size())) : std::string();
      if (cmd == ":quit" || cmd == ":q") break;
      if (cmd == ":schema") {
        out << describe_schema(session.store());
      } else if (cmd == ":report") {
        out << session.report().render();
      } else if (cmd == ":export") {
        if (arg.empty()) {
          out << "usage: :export <file>\n";
        } else if (!last) {
          out << "nothing to export yet\n";
        } else {
          std::ofstream f(arg, std::ios::binary);
          f << format_csv(*last, session.store());
          if (f) {
            out << "wrote " << arg << "\n";
          } else {
            out << "cannot write " << arg << "\n";
          }
        }
      } else if (cmd == ":help") {
        out << ":schema  :report  :export <file>  :quit\n";
      } else {
        out << "unknown command " << cmd << "; :help for commands\n";
      }
      continue;
    }
    QueryOutcome o = session.run(t, cfg.engine);
    out << render_outcome(o, session.store(), cfg);
    if (o.status == QueryOutcome::Ok) last = std::move(o.result);
  }
  return 0;
}

const std::vector<std::string>& bench_queries() {
  static const std::vector<std::string> queries = {
      "count Patients p, where exists p.HospitalEpisode e, where exists e.TreatmentWard t, "
      "where exists t.Manipulation m, where m.manipul.code=02078",
      "COUNT Patients, WHERE EXISTS HospitalEpisode, WHERE referringPhysician=familyDoctor",
      "COUNT HospitalEpisodes, WHERE dischargeTime-admissionTime>15d",
      "COUNT HospitalEpisodes e1, WHERE EXISTS HospitalEpisode e2, WHERE e1<>e2 AND "
      "e2.admissionTime>e1.dischargeTime AND e2.admissionTime-e1.dischargeTime<30d",
      "SELECT HospitalEpisodes x, WHERE dischargeReason=deceased, DEFINE TABLE x.surname "
      "(COLUMN Surname), x.dischargeTime.date() (COLUMN Dying_date), (COUNT x.Manipulation, "
      "WHERE manipul.code=02078) (COLUMN Count_02078), (SUM manipul.cost FROM x.Manipulation, "
      "WHERE manipul.code=02078) (COLUMN cost_02078)",
  };
  return queries;
}

int run_bench(const SessionConfig& cfg, std::string_view scale, std::uint64_t seed,
              std::ostream& out) {
  auto start = std::chrono::steady_clock::now();
  auto schema = std::make_shared<const Schema>(load_schema_file(cfg.schema));
  Store store = generate_synthetic(schema, parse_scale(scale, *schema), seed);
  double gen_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out << "synthetic store, scale " << scale << ", seed " << seed << "\n";
  for (std::size_t i = 0; i < schema->classes().size(); ++i) {
    out << "  " << schema->classes()[i].name << " " << store.size(static_cast<ClassId>(i)) << "\n";
  }
  for (std::size_t i = 0; i < schema->classifiers().size(); ++i) {
    out << "  " << schema->classifiers()[i].name << " "
        << store.classifier_size(static_cast<ClassifierId>(i)) << "\n";
  }
  out << "generated in " << ms_text(gen_ms) << " ms\n";
  Session session(schema, std::move(store), LoadReport{}, gen_ms);
  int status = 0;
  for (std::size_t i = 0; i < bench_queries().size(); ++i) {
    QueryOutcome o = session.run(bench_queries()[i], cfg.engine);
    out << "query " << i + 1 << ": " << bench_queries()[i] << "\n";
    if (o.status != QueryOutcome::Ok) {
      status = 1;
      out << caret_diagnostic(o);
      continue;
    }
    const QueryResult& r = *o.result;
    if (r.kind == QueryResult::Scalar) {
      out << "  result " << format_value(r.scalar, session.store()) << "\n";
    } else if (r.kind == QueryResult::TableResult) {
      out << "  result " << r.table.rows.size() << " row(s)\n";
    }
    out << "  elapsed " << ms_text(r.elapsed_ms) << " ms\n";
  }
  return status;
}

}  // namespace semiq
