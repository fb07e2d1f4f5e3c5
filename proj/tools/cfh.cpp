#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "cfh/cfh.hpp"
#include "cfh/net/httplib_transport.hpp"

namespace {

using cfh::pipeline::CommandContext;

struct Options {
  std::string config_path;
  std::string run_id;
  std::string runs_dir;
  bool fetch_articles = false;
  std::string format = "md";
};

CommandContext make_context(const Options& opt) {
  CommandContext ctx;
  ctx.config = cfh::pipeline::load_run_config(opt.config_path);
  if (!opt.run_id.empty()) {
    if (opt.run_id.find_first_of("/\\") != std::string::npos)
      throw cfh::Error(cfh::ErrorKind::Config, "--run-id must be a plain name");
    ctx.config.run_id = opt.run_id;
  }
  if (!opt.runs_dir.empty()) ctx.config.runs_dir = opt.runs_dir;
  ctx.network = std::make_shared<cfh::net::HttplibTransport>();
  return ctx;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflict forecasting harness: ingest, index, label, forecast and score."};
  app.set_version_flag("--version", std::string(cfh::kToolVersion));
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", opt.config_path, "Run config (JSON)")->required();
    sub->add_option("--run-id", opt.run_id, "Override the config's run_id");
    sub->add_option("--runs-dir", opt.runs_dir, "Override the config's runs directory");
  };

  auto* ingest = app.add_subcommand("ingest", "Parse GDELT and ACLED exports into the normalized corpus");
  add_common(ingest);
  ingest->add_flag("--fetch-articles", opt.fetch_articles, "Also fetch article bodies for cited URLs");
  auto* fetch = app.add_subcommand("fetch-articles", "Fetch article bodies for URLs cited by corpus events");
  add_common(fetch);
  auto* index = app.add_subcommand("build-index", "Chunk and embed articles into the flat vector index");
  add_common(index);
  auto* labels = app.add_subcommand("make-labels", "Derive truth labels and quantile bins from ACLED");
  add_common(labels);
  auto* run = app.add_subcommand("run", "Execute forecast tasks and append predictions");
  add_common(run);
  auto* evaluate = app.add_subcommand("evaluate", "Score predictions and write report.md and report.csv");
  add_common(evaluate);
  auto* report = app.add_subcommand("report", "Print the scored report to stdout");
  add_common(report);
  report->add_option("--format", opt.format, "md or csv")->check(CLI::IsMember({"md", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cfh::pipeline::kExitUsage;
  }

  try {
    auto ctx = make_context(opt);
    if (*ingest) return cfh::pipeline::cmd_ingest(ctx, opt.fetch_articles);
    if (*fetch) return cfh::pipeline::cmd_fetch_articles(ctx);
    if (*index) return cfh::pipeline::cmd_build_index(ctx);
    if (*labels) return cfh::pipeline::cmd_make_labels(ctx);
    if (*run) return cfh::pipeline::cmd_run(ctx);
    if (*evaluate) return cfh::pipeline::cmd_evaluate(ctx);
    if (*report)
      return cfh::pipeline::cmd_report(
          ctx, opt.format == "csv" ? cfh::evaluation::ReportFormat::Csv : cfh::evaluation::ReportFormat::Markdown);
  } catch (const cfh::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cfh::pipeline::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cfh::pipeline::kExitUsage;
  }
  return cfh::pipeline::kExitUsage;
}
