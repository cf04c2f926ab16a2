#include <unistd.h>

#include <fstream>
#include <iostream>
#include <map>
#include <thread>

#include "CLI11.hpp"
#include "httplib.h"
#include "semiq/cli.hpp"
#include "semiq/service.hpp"

using namespace semiq;

namespace {

int serve(const SessionConfig& cfg, const std::string& host, int port, std::size_t limit) {
  QueryService service(cfg.engine, limit);
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(host, port)) {
    std::cerr << "semiq: cannot bind " << host << ":" << port << "\n";
    return 1;
  }
  std::thread listener([&] { server.listen_after_bind(); });
  std::cerr << "listening on http://" << host << ":" << port << " (loading)\n";
  try {
    auto session = std::make_shared<const Session>(Session::open(cfg));
    std::cerr << session->report().render();
    service.install(std::move(session));
    std::cerr << "ready\n";
  } catch (const std::exception& e) {
    std::cerr << "semiq: " << e.what() << "\n";
    server.stop();
    listener.join();
    return 1;
  }
  listener.join();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semiq: controlled natural language queries over a semistar database"};
  SessionConfig cfg;
  std::string exec, batch, bench, format = "text", host = "127.0.0.1";
  int port = 0;
  std::uint64_t seed = 1;
  std::size_t limit = 0;
  bool no_echo = false;

  app.add_option("--schema", cfg.schema, "ontology file")->required()->check(CLI::ExistingFile);
  auto* map = app.add_option("--map", cfg.mapping, "mapping file")->check(CLI::ExistingFile);
  auto* data = app.add_option("--data", cfg.data, "data directory")->check(CLI::ExistingDirectory);
  auto* exec_opt = app.add_option("--exec", exec, "run one query and exit");
  auto* batch_opt = app.add_option("--batch", batch, "run the queries in a file")
                        ->check(CLI::ExistingFile);
  auto* serve_opt = app.add_option("--serve", port, "serve the HTTP API on a port");
  auto* bench_opt = app.add_option("--bench", bench, "benchmark on a synthetic store of this scale");
  app.add_option("--seed", seed, "synthetic store seed")->needs(bench_opt);
  exec_opt->excludes(batch_opt, serve_opt, bench_opt);
  batch_opt->excludes(serve_opt, bench_opt);
  serve_opt->excludes(bench_opt);
  app.add_option("--format", format, "output format")
      ->check(CLI::IsMember({"text", "csv", "jsonl"}));
  app.add_flag("--no-echo", no_echo, "do not print the parse-back");
  app.add_flag("--time", cfg.timing, "print elapsed time per query");
  app.add_option("--threads", cfg.engine.threads, "engine worker threads, 0 = all cores");
  app.add_option("--host", host, "address to serve on")->needs(serve_opt);
  app.add_option("--limit", limit, "default row limit for served results")->needs(serve_opt);
  CLI11_PARSE(app, argc, argv);

  static const std::map<std::string, OutputFormat> formats = {
      {"text", OutputFormat::Text}, {"csv", OutputFormat::Csv}, {"jsonl", OutputFormat::JsonLines}};
  cfg.format = formats.at(format);
  cfg.echo = !no_echo;

  try {
    if (*bench_opt) return run_bench(cfg, bench, seed, std::cout);
    if (!*map || !*data) {
      std::cerr << "semiq: --map and --data are required\n";
      return 2;
    }
    if (*serve_opt) return serve(cfg, host, port, limit);
    Session session = Session::open(cfg);
    if (*exec_opt) {
      std::cerr << session.report().render();
      QueryOutcome o = session.run(exec, cfg.engine);
      std::cout << render_outcome(o, session.store(), cfg);
      return o.status == QueryOutcome::Ok ? 0 : 1;
    }
    if (*batch_opt) {
      std::cerr << session.report().render();
      std::ifstream in(batch);
      return run_batch(session, cfg, in, std::cout);
    }
    return run_repl(session, cfg, std::cin, std::cout, isatty(STDIN_FILENO) != 0);
  } catch (const std::exception& e) {
    std::cerr << "semiq: " << e.what() << "\n";
    return 1;
  }
}
