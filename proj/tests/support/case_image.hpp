#ifndef SYNCSCOPE_TESTS_CASE_IMAGE_HPP
#define SYNCSCOPE_TESTS_CASE_IMAGE_HPP

// A small evidence image laid out like a Windows 7 profile with one share
// folder. The capture below goes with it.

#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "syncscope/db_wal.hpp"
#include "syncscope/sync_dat.hpp"
#include "traffic.hpp"

namespace case_image {

using namespace syncscope;

inline const std::string kAppDir = "Users/User/AppData/Roaming/BitTorrent Sync";
inline const std::string kShareDir = "Users/User/Desktop/sharefolder";

inline ShareConfig main_share() {
    ShareConfig c;
    c.path = R"(\\?\C:\Users\User\Desktop\sharefolder)";
    c.secret_raw = fixtures::kSecrets[0];
    c.secret = classify_secret(c.secret_raw);
    c.pub_key = traffic::relay_share();
    c.use_tracker = c.use_lan_broadcast = c.use_relay = true;
    c.known_hosts = {"203.0.113.7:27900"};
    c.peers = {traffic::remote_peer()};
    c.last_sync_completed = 1385901830;
    c.folder_type = 1;
    c.direct_total = 33;
    return c;
}

// No share folder on the image for this one.
inline ShareConfig second_share() {
    ShareConfig c;
    c.path = R"(\\?\C:\Users\User\Desktop\sf2)";
    c.secret_raw = fixtures::kSecrets[1];
    c.secret = classify_secret(c.secret_raw);
    return c;
}

inline std::string sync_dat() {
    BDict root;
    root["folders"] = BList{share_config_to_bencode(main_share()), share_config_to_bencode(second_share())};
    root["fileguard"] = std::string(20, '\x0f');
    return serialise_bencode(BValue(root));
}

inline FileRecord record(std::string name, bool invalidated, std::int64_t mtime) {
    FileRecord r;
    r.filename = name;
    r.rel_path = name;
    r.invalidated = invalidated;
    r.main_hash = FileHash::from_bytes(std::string(20, '\x42'));
    r.mtime = mtime;
    r.npieces = 1;
    r.owner = traffic::remote_peer();
    r.perm = 420;
    r.size = 33;
    r.state = 2;
    r.timestamp = mtime + 1;
    r.record_type = 1;
    r.pvtime = mtime + 1;
    r.sig = Signature::from_bytes(std::string(32, '\x07'));
    return r;
}

inline std::string db_wal() {
    std::string out("\x37\x7f\x06\x82\x00\x2d\xe2\x18", 8);
    out += serialise_bencode(file_record_to_bencode(record("sample3.txt", false, 1385901825)));
    out += std::string(7, '\0');
    out += serialise_bencode(file_record_to_bencode(record("deleted.txt", true, 1385901700)));
    return out;
}

inline void write(const oracle::TempDir& dir) {
    dir.write(kAppDir + "/sync.dat", sync_dat());
    dir.write(kAppDir + "/sync.dat.old", sync_dat());
    BDict settings;
    settings["device"] = "WIN7-LAB";
    settings["listening_port"] = 27900;
    settings["fileguard"] = std::string(20, '\x0e');
    dir.write(kAppDir + "/settings.dat", serialise_bencode(BValue(settings)));
    dir.write(kAppDir + "/sync.log", fixtures::log_text());
    dir.write(kAppDir + "/" + fixtures::kShareHex + ".db", "SQLite format 3");
    dir.write(kAppDir + "/" + fixtures::kShareHex + ".db-wal", db_wal());
    dir.write(kAppDir + "/sync.lng", "lang");
    dir.write(kShareDir + "/.SyncID", traffic::share().raw());
    dir.write(kShareDir + "/.SyncIgnore", "Thumbs.db\r\ndesktop.ini\r\n");
    dir.write(kShareDir + "/.SyncArchive/old.txt", "gone");
    dir.write(kShareDir + "/sample.txt", "hello");
    dir.write(kShareDir + "/sample3.txt.!sync", "partial");
    dir.write("Users/User/Documents/unrelated.txt", "nothing");
}

inline std::string capture() {
    oracle::PcapWriter w;
    for (const auto& p : traffic::scenario())
        w.add_udp(p.timestamp_us, p.src_ip.value, p.src_port, p.dst_ip.value, p.dst_port, p.payload);
    return w.bytes();
}

} // namespace case_image

#endif // SYNCSCOPE_TESTS_CASE_IMAGE_HPP
