#include <gtest/gtest.h>

#include <sstream>

#include "support/case_image.hpp"
#include "syncscope/cli.hpp"

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "syncscope");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = syncscope::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

} // namespace

TEST(Cli, KeyReadWrite) {
    const auto r = run_cli({"key", fixtures::kSecrets[0]});
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.out, "ReadWrite\nSHA-1 ShareId: B0CAC689465C86D147595DFFA3DB1437093451F0\n");
    EXPECT_TRUE(r.err.empty());
}

TEST(Cli, KeyJson) {
    const auto r = run_cli({"key", fixtures::kSecrets[4], "--format", "json"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["class"], "ReadOnlyLegacy");
    EXPECT_EQ(j["sha1_share_id"], oracle::sha1_hex(fixtures::kSecrets[4]));
}

TEST(Cli, BadSecretFails) {
    const auto r = run_cli({"key", "short"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    auto r = run_cli({});
    EXPECT_EQ(r.code, 2);
    EXPECT_FALSE(r.err.empty());
    EXPECT_TRUE(r.out.empty());
    EXPECT_EQ(run_cli({"frobnicate"}).code, 2);
    EXPECT_EQ(run_cli({"report"}).code, 2);
    EXPECT_EQ(run_cli({"key", fixtures::kSecrets[0], "--format", "xml"}).code, 2);
}

TEST(Cli, HelpAndVersion) {
    auto r = run_cli({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("report"), std::string::npos);
    r = run_cli({"--version"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, MissingInputFile) {
    const auto r = run_cli({"pcap", "missing.pcap"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("missing.pcap"), std::string::npos);
}

TEST(Cli, BadHostAddressIsUsageError) {
    oracle::TempDir dir;
    const auto cap = dir.write("c.pcap", case_image::capture());
    EXPECT_EQ(run_cli({"pcap", cap.string(), "--tracker-ip", "300.1.1.1"}).code, 2);
}

TEST(Cli, Bencode) {
    oracle::TempDir dir;
    const auto f = dir.write("x.benc", "d1:ai42e1:bl2:hiee");
    auto r = run_cli({"bencode", f.string(), "--format", "json"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j["value"]["a"], 42);
    EXPECT_EQ(j["value"]["b"][0], "hi");
    r = run_cli({"bencode", f.string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_FALSE(r.out.empty());
    dir.write("bad.benc", "d1:a");
    EXPECT_EQ(run_cli({"bencode", (dir.path() / "bad.benc").string()}).code, 1);
}

TEST(Cli, PcapWithHostOverride) {
    oracle::TempDir dir;
    const auto cap = dir.write("c.pcap", case_image::capture());
    auto r = run_cli({"pcap", cap.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["messages"].size(), 10u);
    // Replacing the tracker list with an unrelated host loses the response
    // (the request is still caught by its get_peers key).
    r = run_cli({"pcap", cap.string(), "--tracker-ip", "10.0.0.1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(nlohmann::json::parse(r.out)["messages"].size(), 9u);
}

TEST(Cli, ReportDeterministicAndWritesFile) {
    oracle::TempDir dir;
    case_image::write(dir);
    const auto cap = dir.write("../" + dir.path().filename().string() + "-cap.pcap", case_image::capture());
    const auto reg = dir.write("../" + dir.path().filename().string() + "-sw.reg", fixtures::installed_reg());
    const std::vector<std::string> args{"report", "--artifacts", dir.path().string(), "--pcap", cap.string(),
                                        "--reg", reg.string()};
    const auto a = run_cli(args);
    const auto b = run_cli(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const auto j = nlohmann::json::parse(a.out);
    EXPECT_EQ(j["registry_verdict"], "Installed");
    EXPECT_FALSE(j.contains("annotation"));

    auto args_out = args;
    const auto out_path = dir.path() / "out" / "report.txt";
    std::filesystem::create_directories(out_path.parent_path());
    args_out.insert(args_out.end(), {"--format", "text", "--out", out_path.string()});
    const auto t = run_cli(args_out);
    ASSERT_EQ(t.code, 0) << t.err;
    EXPECT_TRUE(t.out.empty());
    EXPECT_NE(syncscope::read_file(out_path).find("Registry verdict: Installed"), std::string::npos);

    auto args_ann = args;
    args_ann.push_back("--annotate");
    const auto ann = nlohmann::json::parse(run_cli(args_ann).out);
    EXPECT_EQ(ann["annotation"]["tool"], "syncscope");
    std::filesystem::remove(cap);
    std::filesystem::remove(reg);
}
