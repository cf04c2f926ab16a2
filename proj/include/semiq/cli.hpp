#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "semiq/session.hpp"

namespace semiq {

// Query text, then the error line and a caret line under the offending span.
std::string caret_diagnostic(const QueryOutcome& o);

// One query's output in the configured format. Text echoes the parse-back and
// bindings when `cfg.echo`, and the elapsed time when `cfg.timing`.
std::string render_outcome(const QueryOutcome& o, const Store& store, const SessionConfig& cfg);

// Queries from a batch file: blank lines and lines starting with '#' are
// skipped, a line ending in '\' continues on the next one.
std::vector<std::string> read_batch(std::istream& in);

// Exit status 0 iff every query parses, resolves and evaluates.
int run_batch(const Session& session, const SessionConfig& cfg, std::istream& in,
              std::ostream& out);

// Interactive loop with the :schema, :report, :export <file>, :help and :quit
// commands. Timing is always shown.
int run_repl(const Session& session, SessionConfig cfg, std::istream& in, std::ostream& out,
             bool prompt);

// The benchmark query set run against the synthetic store.
const std::vector<std::string>& bench_queries();

// Generates a synthetic store, prints per-class cardinalities and the elapsed
// time of every benchmark query. Exit status 0 iff every query succeeds.
int run_bench(const SessionConfig& cfg, std::string_view scale, std::uint64_t seed,
              std::ostream& out);

}  // namespace semiq
