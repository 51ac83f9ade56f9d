#include "test_util.hpp"

#include "report_writers.hpp"

#include "uca/config.hpp"

using namespace uca;
using nlohmann::json;
using uca::testing::TempDir;

TEST(Config, EmptyDocumentUsesDefaults)
{
    const auto config = config_from_json(json::object());
    EXPECT_EQ(config.weights, WeightProfile::defaults());
    EXPECT_FALSE(config.history_path.has_value());
    EXPECT_FALSE(config.firewall_override.has_value());
    EXPECT_EQ(configured_invocations(config).size(), 6u);
}

TEST(Config, FullDocument)
{
    const auto document = json::parse(R"({
        "weights": {"tools": {"LYNIS": 0.25, "OPENSCAP_CIS": 0.15}},
        "history": "state/history.jsonl",
        "host": "web-01",
        "firewall_override": false,
        "runner": {
            "output_dir": "/var/tmp/uca",
            "parallel": true,
            "variables": {"target": "10.0.0.9"},
            "tools": {"aide": {"command": "aide --check --config {conf}", "timeout": 30,
                               "accept_exit_codes": [0, 1], "output": "aide.txt"}},
            "integrity": {"TRIPWIRE": {"database": "db/tw.twd"}}
        }
    })");
    const auto config = config_from_json(document, "/etc/uca");
    EXPECT_DOUBLE_EQ(config.weights.weight(ToolKind::Lynis), 0.25);
    EXPECT_EQ(config.history_path, std::filesystem::path("/etc/uca/state/history.jsonl"));
    EXPECT_EQ(config.host_label, "web-01");
    EXPECT_EQ(config.firewall_override, false);
    EXPECT_TRUE(config.parallel);
    EXPECT_EQ(config.variables.at("target"), "10.0.0.9");
    EXPECT_TRUE(config.variables.contains("cis_profile"));

    const auto invocations = configured_invocations(config, {ToolKind::Aide});
    ASSERT_EQ(invocations.size(), 1u);
    EXPECT_EQ(invocations[0].command_template, "aide --check --config {conf}");
    EXPECT_EQ(invocations[0].timeout, std::chrono::seconds(30));
    EXPECT_EQ(invocations[0].accepted_exit_codes, (std::set<int>{0, 1}));
    EXPECT_EQ(invocations[0].output_path, std::filesystem::path("/var/tmp/uca/aide.txt"));

    const auto init = configured_integrity_init(config, ToolKind::Tripwire);
    EXPECT_EQ(init.database_path, std::filesystem::path("/etc/uca/db/tw.twd"));
}

TEST(Config, Rejects)
{
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"({"wieghts": {}})")), ErrorCode::ConfigInvalid);
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"([1])")), ErrorCode::ConfigInvalid);
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"({"runner": {"tools": {"ossec": {}}}})")),
                     ErrorCode::ConfigInvalid);
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"({"runner": {"integrity": {"lynis": {}}}})")),
                     ErrorCode::ConfigInvalid);
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"({"runner": {"tools": {"aide": {"timeout": -1}}}})")),
                     ErrorCode::ConfigInvalid);
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"({"weights": {"tools": {"LYNIS": 0.5}}})")),
                     ErrorCode::WeightSumInvalid);
    EXPECT_UCA_ERROR(config_from_json(json::parse(R"({"weights": {"severity": {"LOW": -1}}})")),
                     ErrorCode::WeightNegative);
}

TEST(Config, LoadFromFiles)
{
    TempDir dir;
    const auto config_path = dir.write("uca.json", R"({"history": "h.jsonl"})");
    EXPECT_EQ(load_config(config_path).history_path, dir.path() / "h.jsonl");

    const auto bare = dir.write("w.json", R"({"tools": {"AIDE": 0.10, "TRIPWIRE": 0.20}})");
    EXPECT_DOUBLE_EQ(load_weights_file(bare).weight(ToolKind::Tripwire), 0.20);
    const auto wrapped = dir.write("c.json", R"({"weights": {"tools": {"AIDE": 0.10, "TRIPWIRE": 0.20}}})");
    EXPECT_EQ(load_weights_file(wrapped), load_weights_file(bare));

    EXPECT_UCA_ERROR(load_config(dir.write("bad.json", "{")), ErrorCode::ConfigInvalid);
    EXPECT_UCA_ERROR(load_config(dir.path() / "missing.json"), ErrorCode::IoFailure);
}

TEST(Config, ShippedExamplesLoad)
{
    const auto docs = std::filesystem::path(UCA_FIXTURE_DIR) / ".." / ".." / "docs";
    EXPECT_NO_THROW(load_config(docs / "uca.example.json"));
    EXPECT_NO_THROW(load_weights_file(docs / "weights.example.json"));
}
