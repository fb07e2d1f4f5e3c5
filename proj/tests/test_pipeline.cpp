#include <gtest/gtest.h>

#include <atomic>
#include <sstream>

#include "cfh/pipeline/commands.hpp"

using namespace cfh;
using namespace cfh::pipeline;
namespace fs = std::filesystem;

namespace {

const fs::path kMini = fs::path(CFH_SOURCE_DIR) / "data" / "mini";

class CountingClient : public llm::ChatClient {
 public:
  explicit CountingClient(std::shared_ptr<llm::ChatClient> inner) : inner_(std::move(inner)) {}
  std::string complete(const llm::ChatRequest& r) override {
    ++calls;
    return inner_->complete(r);
  }
  std::atomic<int> calls{0};

 private:
  std::shared_ptr<llm::ChatClient> inner_;
};

Error config_error(const nlohmann::json& doc) {
  try {
    parse_run_config(doc);
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "accepted " << doc.dump();
  return Error(ErrorKind::InvalidArgument, "");
}

struct MiniRun {
  fs::path runs;
  CommandContext ctx;
  std::ostringstream out, err;

  explicit MiniRun(const std::string& name) : runs(fs::temp_directory_path() / name) {
    fs::remove_all(runs);
    ctx.config = load_run_config(kMini / "config.json");
    ctx.config.runs_dir = runs;
    ctx.out = &out;
    ctx.err = &err;
  }
  ~MiniRun() { fs::remove_all(runs); }

  void prepare() {
    ASSERT_EQ(cmd_ingest(ctx, false), kExitOk) << err.str();
    ASSERT_EQ(cmd_build_index(ctx), kExitOk) << err.str();
    ASSERT_EQ(cmd_make_labels(ctx), kExitOk) << err.str();
  }
};

}  // namespace

TEST(Config, DefaultsAndStrictKeys) {
  const auto c = parse_run_config(nlohmann::json::object());
  EXPECT_EQ(c.countries.size(), 5u);
  EXPECT_EQ(c.countries[1].iso3, "SDN");
  EXPECT_EQ(format_month(c.range_start), "2020-01");
  EXPECT_EQ(format_month(c.range_end), "2024-12");
  EXPECT_EQ(c.retrieval.k, 12u);
  EXPECT_EQ(run_grid(c).size(), 5u * 2u * 59u);

  auto e = config_error({{"retrieval", {{"embedder", {{"dimz", 3}}}}}});
  EXPECT_EQ(e.kind(), ErrorKind::Config);
  EXPECT_NE(std::string(e.what()).find("$.retrieval.embedder.dimz"), std::string::npos) << e.what();
  e = config_error({{"temperature", "hot"}});
  EXPECT_NE(std::string(e.what()).find("$.temperature"), std::string::npos);
  EXPECT_NE(std::string(config_error({{"countries", {"Atlantis"}}}).what()).find("$.countries[0]"), std::string::npos);
  config_error({{"date_range", {{"start", "2023-05"}, {"end", "2023-01"}}}});
  config_error({{"provider", {{"kind", "mock"}}}});
  config_error({{"cache", {{"mode", "Sometimes"}}}});
  config_error({{"run_id", "../x"}});
  config_error({{"history_start", "2019-12"}});
}

TEST(Config, RelativePathsFollowTheConfigFile) {
  const auto c = load_run_config(kMini / "config.json");
  EXPECT_EQ(c.run_id, "mini");
  ASSERT_TRUE(c.ingestion.acled_file);
  EXPECT_TRUE(fs::exists(*c.ingestion.acled_file));
  EXPECT_EQ(fs::weakly_canonical(*c.ingestion.acled_file), fs::weakly_canonical(kMini / "acled.csv"));
  EXPECT_EQ(c.ingestion.gdelt_files.size(), 2u);
  EXPECT_TRUE(c.provider.mock_script && fs::exists(*c.provider.mock_script));
  EXPECT_EQ(c.retrieval.summarizer_kind, "extractive");
  try {
    load_run_config(kMini / "missing.json");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
}

TEST(Pipeline, EndToEndResumeAndErrors) {
  MiniRun mini("cfh_pipeline_e2e");
  mini.prepare();
  const auto& cfg = mini.ctx.config;
  for (const char* f : {"corpus/manifest.json", "corpus/events.jsonl", "index/index.jsonl", "labels.jsonl", "bins.json"})
    EXPECT_TRUE(fs::exists(cfg.run_dir() / f)) << f;

  auto counting = std::make_shared<CountingClient>(pipeline::detail::make_client(mini.ctx));
  mini.ctx.client = counting;
  ASSERT_EQ(cmd_run(mini.ctx), kExitOk) << mini.err.str();
  const auto grid = run_grid(cfg);
  EXPECT_EQ(counting->calls.load(), static_cast<int>(grid.size()));
  const auto first = io::read_file(cfg.predictions_path());
  const auto records = evaluation::read_predictions(cfg.predictions_path());
  ASSERT_EQ(records.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) EXPECT_EQ(records[i].task.key(), grid[i].key());

  const auto rag_dir = cfg.run_dir() / "Sudan" / "2023-05" / "rag";
  for (const char* f : {"prompt.txt", "reply.txt", "context.json"}) EXPECT_TRUE(fs::exists(rag_dir / f)) << f;
  const auto context = nlohmann::json::parse(io::read_file(rag_dir / "context.json"));
  EXPECT_LT(parse_date(context.at("weekly_window").at(1).get<std::string>()), parse_date("2023-05-01"));

  // Drop the last five records; a second run redoes exactly those.
  std::vector<std::string> lines;
  std::istringstream in(first);
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  std::string truncated;
  for (std::size_t i = 0; i + 5 < lines.size(); ++i) truncated += lines[i] + "\n";
  io::write_file_atomic(cfg.predictions_path(), truncated);
  counting->calls = 0;
  ASSERT_EQ(cmd_run(mini.ctx), kExitOk);
  EXPECT_EQ(counting->calls.load(), 5);
  EXPECT_EQ(io::read_file(cfg.predictions_path()), first);
  counting->calls = 0;
  ASSERT_EQ(cmd_run(mini.ctx), kExitOk);
  EXPECT_EQ(counting->calls.load(), 0);

  ASSERT_EQ(cmd_evaluate(mini.ctx), kExitOk);
  const auto csv = io::read_file(cfg.run_dir() / "report.csv");
  EXPECT_EQ(csv.rfind("model,experiment,metric,Sudan,Ethiopia,Somalia\n", 0), 0u);
  std::ostringstream printed;
  mini.ctx.out = &printed;
  ASSERT_EQ(cmd_report(mini.ctx, evaluation::ReportFormat::Csv), kExitOk);
  EXPECT_EQ(printed.str(), csv);
  mini.ctx.out = &mini.out;

  io::write_file_atomic(cfg.predictions_path(), "");
  try {
    cmd_evaluate(mini.ctx);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoScorableRecords);
    EXPECT_NE(std::string(e.what()).find("no scorable records"), std::string::npos);
  }
}

TEST(Pipeline, ProviderFailuresAreRecorded) {
  MiniRun mini("cfh_pipeline_fail");
  mini.ctx.config.experiment = ExperimentSelection::Parametric;
  mini.ctx.config.countries.resize(1);
  mini.prepare();
  // An empty script matches nothing, so every task fails without aborting the run.
  mini.ctx.client = std::make_shared<llm::MockClient>(llm::MockScript{}, 0);
  EXPECT_EQ(cmd_run(mini.ctx), kExitPartial);
  const auto records = evaluation::read_predictions(mini.ctx.config.predictions_path());
  ASSERT_FALSE(records.empty());
  for (const auto& r : records) {
    EXPECT_TRUE(r.parse_failed);
    EXPECT_EQ(r.error, "NoScriptMatch");
  }
  EXPECT_TRUE(fs::exists(mini.ctx.config.run_dir() / "Sudan" / "2023-02" / "parametric" / "error.txt"));
}

TEST(Pipeline, MissingInputsAreErrors) {
  MiniRun mini("cfh_pipeline_missing");
  mini.ctx.config.ingestion.acled_file = kMini / "no-such-acled.csv";
  EXPECT_THROW(cmd_ingest(mini.ctx, false), Error);
  mini.ctx.config.ingestion.acled_file.reset();
  try {
    cmd_ingest(mini.ctx, false);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Config);
  }
  EXPECT_THROW(cmd_run(mini.ctx), Error);
  EXPECT_THROW(cmd_evaluate(mini.ctx), Error);
}
