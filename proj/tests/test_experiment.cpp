#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "hgsim/experiment.hpp"

using namespace hgsim;
namespace fs = std::filesystem;

namespace {

ExperimentConfig base_config(uint64_t seed) {
    ExperimentConfig cfg;
    cfg.synthetic.num_targets = 400;
    cfg.synthetic.feature_dim = 8;
    cfg.synthetic.seed = seed;
    cfg.synthetic.shared_sources = true;
    SyntheticRelationSpec rel;
    rel.fanout = {2.1, 3, 16};
    rel.source_pool_size = 400;
    rel.overlap_rho = 0.6;
    cfg.synthetic.relations.assign(3, rel);
    cfg.model.seed = seed;
    cfg.seed = seed;
    return cfg;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

fs::path temp_dir(const std::string& tag) {
    const auto dir = fs::temp_directory_path() / ("hgsim_test_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(HGSIM_CLI_PATH) + " " + args + " >" + log.string() +
                            " 2>&1";
    return std::system(cmd.c_str());
}

}  // namespace

TEST_CASE("config files parse into the run configuration") {
    ExperimentConfig cfg;
    std::istringstream in(R"(
# sample sweep configuration
[synthetic]
targets = 1234
relations = 2
overlap = 0.7
[model]
variant = rgat-like
d_hid = 32
d_out = 32
[hardware]
channels = 2
rpes_per_channel = 128
[run]
paradigm = per-semantic
grouping = random
seed = 99
)");
    apply_config_text(in, cfg, "<mem>");
    CHECK(cfg.synthetic.num_targets == 1234);
    CHECK(cfg.synthetic.relations.size() == 2);
    CHECK(cfg.synthetic.relations[1].overlap_rho == doctest::Approx(0.7));
    CHECK(cfg.model.variant == ModelVariant::RgatLike);
    CHECK(cfg.model.d_hid == 32);
    CHECK(cfg.hw.channels.n_channels == 2);
    CHECK(cfg.paradigm == Paradigm::PerSemantic);
    CHECK(cfg.grouping == GroupingKind::Random);
    CHECK(cfg.seed == 99);
}

TEST_CASE("unknown config keys are named in the error") {
    ExperimentConfig cfg;
    std::istringstream in("[run]\nparadgim = typo\n");
    try {
        apply_config_text(in, cfg, "<mem>");
        FAIL("expected a config error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("run.paradgim") != std::string::npos);
    }
    std::istringstream bad_value("[hardware]\nchannels = lots\n");
    CHECK_THROWS_AS(apply_config_text(bad_value, cfg, "<mem>"), ConfigError);
}

TEST_CASE("infeasible hardware configurations are rejected") {
    auto cfg = base_config(1);
    cfg.hw.channels.n_channels = 0;
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    cfg = base_config(1);
    cfg.model.d_out = 16;  // fusion is d_hid wide
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("an explicit run equals its ablation preset") {
    const auto base = base_config(5);
    const auto lg = obtain_graph(base);

    auto manual = base;
    manual.paradigm = Paradigm::SemanticsComplete;
    manual.grouping = GroupingKind::Overlap;
    manual.hw.channels.n_channels = 4;
    const auto a = run_single(manual, lg);
    const auto b = run_single(ablation_step_config(base, 'O'), lg);
    CHECK(a.sim.to_json().dump() == b.sim.to_json().dump());
}

TEST_CASE("the ablation ladder reports four runs against the -B baseline") {
    const auto base = base_config(7);
    const auto lg = obtain_graph(base);
    const auto res = run_ablation(base, lg);
    REQUIRE(res.runs.size() == 4);
    CHECK(res.runs[0].metrics.speedup == 1.0);
    CHECK(res.runs[0].sim.n_channels == 1);
    CHECK(res.runs[2].sim.n_channels == 4);
    CHECK(res.runs[1].metrics.baseline_name == "run-B");
    CHECK(res.runs[1].metrics.expansion_ratio <= res.runs[0].metrics.expansion_ratio);
    // csv: header + 4 rows
    CHECK(std::count(res.csv.begin(), res.csv.end(), '\n') == 5);
}

TEST_CASE("reports embed the resolved config and write atomically") {
    auto cfg = base_config(9);
    cfg.out_dir = temp_dir("report").string();
    cfg.name = "sample";
    const auto lg = obtain_graph(cfg);
    const auto run = run_single(cfg, lg);
    write_run_report(cfg, run);
    const auto body = slurp(fs::path(cfg.out_dir) / "sample.json");
    const auto j = nlohmann::ordered_json::parse(body);
    CHECK(j["config"]["hardware"]["channels"] == 4);
    CHECK(j["config"]["run"]["seed"] == 9);
    CHECK(j["sim"]["cycles"]["total"].get<uint64_t>() > 0);
    CHECK_FALSE(fs::exists(fs::path(cfg.out_dir) / "sample.json.tmp"));
}

TEST_CASE("oracle-check runs accept matching paradigms") {
    auto cfg = base_config(11);
    cfg.oracle_check = true;
    const auto lg = obtain_graph(cfg);
    CHECK_NOTHROW(run_single(cfg, lg));
}

TEST_CASE("library-level runs are byte-deterministic") {
    const auto cfg = base_config(13);
    const auto lg = obtain_graph(cfg);
    const auto a = run_single(cfg, lg);
    const auto b = run_single(cfg, lg);
    CHECK(report_json(cfg, a).dump() == report_json(cfg, b).dump());
}

TEST_CASE("cli: generated graph files are deterministic and loadable") {
    const auto dir = temp_dir("cli_gen");
    const std::string flags =
        "gen --targets 200 --relations 3 --alpha 2.1 --overlap 0.6 --pool 150 "
        "--feature-dim 8 --seed 7 --out ";
    REQUIRE(run_cli(flags + (dir / "a.txt").string(), dir / "a.log") == 0);
    REQUIRE(run_cli(flags + (dir / "b.txt").string(), dir / "b.log") == 0);
    CHECK(slurp(dir / "a.txt") == slurp(dir / "b.txt"));

    const auto lg = load_graph((dir / "a.txt").string(), GraphFormat::EdgeListText);
    CHECK(lg.graph.target_count() == 200);
    CHECK(lg.graph.relations.size() == 3);
}

TEST_CASE("cli: run reports are byte-identical across executions") {
    const auto dir = temp_dir("cli_run");
    const std::string flags =
        "run --targets 200 --relations 2 --overlap 0.5 --pool 200 --feature-dim 8 "
        "--seed 3 --name runA --oracle-check --out-dir ";
    REQUIRE(run_cli(flags + (dir / "one").string(), dir / "one.log") == 0);
    REQUIRE(run_cli(flags + (dir / "two").string(), dir / "two.log") == 0);
    CHECK(slurp(dir / "one" / "runA.json") == slurp(dir / "two" / "runA.json"));
}

TEST_CASE("cli: unknown config keys fail with a diagnostic") {
    const auto dir = temp_dir("cli_bad");
    {
        std::ofstream out(dir / "bad.cfg");
        out << "[hardware]\nchannles = 4\n";
    }
    const int rc = run_cli("run --config " + (dir / "bad.cfg").string(), dir / "bad.log");
    CHECK(rc != 0);
    CHECK(slurp(dir / "bad.log").find("hardware.channles") != std::string::npos);
}

TEST_CASE("cli: check subcommand passes its oracle suite") {
    const auto dir = temp_dir("cli_check");
    const int rc = run_cli(
        "check --targets 150 --relations 3 --overlap 0.5 --pool 150 --feature-dim 8 --seed 2",
        dir / "check.log");
    CHECK(rc == 0);
    const auto log = slurp(dir / "check.log");
    CHECK(log.find("PASS paradigm-equivalence") != std::string::npos);
    CHECK(log.find("FAIL") == std::string::npos);
}
