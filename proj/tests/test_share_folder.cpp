#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "syncscope/share_folder.hpp"

using namespace syncscope;

TEST(SyncId, TwentyBytes) {
    const ShareId want = ShareId::from_hex(fixtures::kShareHex);
    EXPECT_EQ(render_share_id(parse_sync_id(want.raw())), "35F762999B1275C0F894F3D5FBAC7059F76783ED");
    EXPECT_EQ(parse_sync_id(std::string(20, '\0')).hex(), std::string(40, '0'));
}

TEST(SyncId, WrongLength) {
    try {
        parse_sync_id(std::string(19, 'x'));
        FAIL();
    } catch (const WrongLength& e) {
        EXPECT_EQ(e.actual(), 19u);
    }
    EXPECT_THROW(parse_sync_id(std::string(21, 'x')), WrongLength);
}

TEST(SyncIgnore, Lines) {
    EXPECT_TRUE(parse_sync_ignore("").empty());
    EXPECT_EQ(parse_sync_ignore("Thumbs.db\n"), std::vector<std::string>{"Thumbs.db"});
    EXPECT_EQ(parse_sync_ignore("a\r\n"), std::vector<std::string>{"a"});
    EXPECT_EQ(parse_sync_ignore("\xEF\xBB\xBF# comment\r\n\r\n  desktop.ini  \r\n.DS_Store"),
              (std::vector<std::string>{"desktop.ini", ".DS_Store"}));
}

TEST(ShareFolder, ControlFilesMakeShareRoot) {
    const auto s = scan_share_folder(std::vector<std::string>{".SyncID", ".SyncIgnore", ".SyncArchive/"});
    EXPECT_TRUE(s.is_share_root);
    EXPECT_TRUE(s.has_sync_ignore);
    EXPECT_TRUE(s.has_sync_archive);
    EXPECT_TRUE(s.in_flight.empty());
}

TEST(ShareFolder, InFlightDeltas) {
    const auto s = scan_share_folder(std::vector<std::string>{"sample3.txt.!sync.!sync1", "b.txt.!sync(2)", "plain.txt",
                                                               "sub/c.bin.!sync"});
    ASSERT_EQ(s.in_flight.size(), 3u);
    EXPECT_EQ(s.in_flight[0].target, "sample3.txt");
    EXPECT_EQ(s.in_flight[1].target, "b.txt");
    EXPECT_EQ(s.in_flight[2].target, "sub/c.bin");
    EXPECT_FALSE(s.is_share_root);
}

TEST(ShareFolder, NotDeltas) {
    const auto s = scan_share_folder(std::vector<std::string>{".!sync", "x.!syncx", "y.!sync(", "z.!sync()"});
    EXPECT_TRUE(s.in_flight.empty());
}

TEST(ShareFolder, ArchivedDeletions) {
    const auto s = scan_share_folder(std::vector<std::string>{".SyncID", ".SyncArchive/old.txt", ".syncarchive/dir/x"});
    EXPECT_EQ(s.archived, (std::vector<std::string>{"old.txt", "dir/x"}));
}

TEST(ShareFolder, Empty) {
    const auto s = scan_share_folder(std::vector<std::string>{});
    EXPECT_FALSE(s.is_share_root);
}

TEST(ShareFolder, SizesCarried) {
    const std::vector<FolderEntry> entries{{".SyncID", 20}, {"sample3.txt.!sync", 33}};
    const auto s = scan_share_folder(std::span<const FolderEntry>(entries));
    ASSERT_EQ(s.in_flight.size(), 1u);
    EXPECT_EQ(s.in_flight[0].size, 33u);
}
