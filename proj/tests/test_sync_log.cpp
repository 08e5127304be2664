#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "syncscope/sync_log.hpp"

using namespace syncscope;

TEST(SyncLog, PublishedLinesAllRecognised) {
    const auto events = parse_sync_log(fixtures::log_text());
    ASSERT_EQ(events.size(), fixtures::kLogLines.size());
    const LogEventKind kinds[] = {LogEventKind::ConfigLoaded,      LogEventKind::FolderLoaded,
                                  LogEventKind::FolderLoaded,      LogEventKind::FolderLoaded,
                                  LogEventKind::PingReceived,      LogEventKind::PeerFound,
                                  LogEventKind::BroadcastPingSent, LogEventKind::TrackerRequested,
                                  LogEventKind::BroadcastPingSent};
    for (std::size_t i = 0; i < events.size(); ++i) {
        EXPECT_EQ(events[i].kind, kinds[i]) << fixtures::kLogLines[i];
        EXPECT_EQ(events[i].line_number, i + 1);
        ASSERT_TRUE(events[i].timestamp);
    }
}

TEST(SyncLog, PingReceivedFields) {
    const auto e = parse_sync_log_line(fixtures::kLogLines[4]);
    ASSERT_EQ(e.kind, LogEventKind::PingReceived);
    EXPECT_EQ(e.endpoint->to_string(), "192.168.0.11:27900");
    EXPECT_EQ(e.peer->hex(), "00DC0AC2F0F91921AE29FC5E8F2273828BBAC747");
    EXPECT_EQ(e.share->hex(), "35F762999B1275C0F894F3D5FBAC7059F76783ED");
    EXPECT_TRUE(*e.broadcast);
    EXPECT_EQ(e.timestamp->text(), "2013-12-01 12:43:44");
}

TEST(SyncLog, OtherFields) {
    auto e = parse_sync_log_line(fixtures::kLogLines[0]);
    EXPECT_EQ(*e.config_version, "1.1.82");
    e = parse_sync_log_line(fixtures::kLogLines[5]);
    EXPECT_EQ(*e.folder_path, R"(\\?\~User\Desktop\sharefolder)");
    EXPECT_TRUE(*e.direct);
    EXPECT_EQ(e.endpoint->port, 27900);
    e = parse_sync_log_line(fixtures::kLogLines[6]);
    EXPECT_EQ(e.share->hex(), fixtures::kOtherShareHex);
}

TEST(SyncLog, TrackerRequest) {
    EXPECT_EQ(parse_sync_log_line("[2013-12-01 12:43:45] Requesting peers from server").kind,
              LogEventKind::TrackerRequested);
}

TEST(SyncLog, UnrecognisedKeepsText) {
    auto e = parse_sync_log_line("garbage line");
    EXPECT_EQ(e.kind, LogEventKind::Unrecognised);
    EXPECT_EQ(e.raw_line, "garbage line");
    EXPECT_FALSE(e.timestamp);

    e = parse_sync_log_line("[2013-12-01 12:43:45] Something new happened");
    EXPECT_EQ(e.kind, LogEventKind::Unrecognised);
    ASSERT_TRUE(e.timestamp);

    EXPECT_EQ(parse_sync_log_line("[2013-02-30 12:43:45] Requesting peers from server").kind,
              LogEventKind::Unrecognised);
    EXPECT_EQ(parse_sync_log_line("[2013-12-01 12:43:44] Got ping (broadcast: 1) from peer 1.2.3.400:1 (" +
                                  fixtures::kPeerHex + ") for share " + fixtures::kShareHex)
                  .kind,
              LogEventKind::Unrecognised);
}

TEST(SyncLog, LosslessAndOrdered) {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 50; ++round) {
        std::string input;
        std::vector<std::string> lines;
        std::uniform_int_distribution<int> n(0, 12);
        for (int i = n(rng); i > 0; --i) {
            std::string line = rng() % 2 ? fixtures::kLogLines[rng() % fixtures::kLogLines.size()]
                                         : oracle::random_bytes(rng, 80);
            std::erase(line, '\n');
            if (rng() % 3 == 0) line += '\r';
            lines.push_back(line);
            input += line + "\n";
        }
        const auto events = parse_sync_log(input);
        ASSERT_EQ(events.size(), lines.size());
        for (std::size_t i = 0; i < lines.size(); ++i) {
            EXPECT_EQ(events[i].raw_line, lines[i]);
            EXPECT_EQ(events[i].line_number, i + 1);
        }
    }
}

TEST(SyncLog, FinalLineWithoutNewline) {
    const auto events = parse_sync_log("a\nb");
    ASSERT_EQ(events.size(), 2u);
    EXPECT_EQ(events[1].raw_line, "b");
    EXPECT_TRUE(parse_sync_log("").empty());
}

TEST(SyncLog, OverlongLine) {
    const std::string line = "[2013-12-01 12:41:33] Loaded folder " + std::string(10000, 'x');
    EXPECT_EQ(parse_sync_log_line(line).kind, LogEventKind::Unrecognised);
}

TEST(NaiveTimestamp, EpochRoundTrip) {
    const NaiveTimestamp t{2013, 12, 1, 12, 43, 44};
    EXPECT_EQ(t.epoch_seconds(), 1385901824);
    EXPECT_EQ(NaiveTimestamp::from_epoch_seconds(1385901824), t);
    EXPECT_EQ(NaiveTimestamp::from_epoch_seconds(-1).text(), "1969-12-31 23:59:59");
}
