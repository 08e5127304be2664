#ifndef SYNCSCOPE_TESTS_FIXTURES_HPP
#define SYNCSCOPE_TESTS_FIXTURES_HPP

// Sample data as published for the client under study. Registry exports
// wrap the published keys in regedit format.

#include <string>
#include <vector>

namespace fixtures {

inline const std::string kShareHex = "35F762999B1275C0F894F3D5FBAC7059F76783ED";
inline const std::string kOtherShareHex = "55045F90CA4C1A42DDB78DCD132F3ACC33E946EC";
inline const std::string kPeerHex = "00DC0AC2F0F91921AE29FC5E8F2273828BBAC747";

// Read-write, read-only, two 24-hour keys, then the legacy read-only key
// posted publicly.
inline const std::vector<std::string> kSecrets = {
    "ACHY3VFJZ3RJ3DE2CHPUGE6W7EZSRA3OR", "BY6G6B7KIBGELLXE2RL65C34CAGPV7LUJ",
    "CBJIK32CLMWF2P7JLFYRGC3JRTEZ6JLPU", "CCYGZN6R67O67QB7HGLL4F5BAVA3AJ5LC",
    "RUAM2ED5ISKYR7LVELNVX56LLHQ47GBOZ"};

inline const std::vector<std::string> kLogLines = {
    R"([2013-12-01 12:41:33] Loading config file version 1.1.82)",
    R"([2013-12-01 12:41:33] Loaded folder \\?\~User\BTSync)",
    R"([2013-12-01 12:41:33] Loaded folder \\?\~User\Desktop\sharefolder)",
    R"([2013-12-01 12:41:33] Loaded folder \\?\~User\Desktop\sf2)",
    R"([2013-12-01 12:43:44] Got ping (broadcast: 1) from peer 192.168.0.11:27900 (00DC0AC2F0F91921AE29FC5E8F2273828BBAC747) for share 35F762999B1275C0F894F3D5FBAC7059F76783ED)",
    R"([2013-12-01 12:43:44] Found peer for folder \\?\~User\Desktop\sharefolder 00DC0AC2F0F91921AE29FC5E8F2273828BBAC747 192.168.0.11:27900 direct:1)",
    R"([2013-12-01 12:43:45] Sending broadcast ping for share 55045F90CA4C1A42DDB78DCD132F3ACC33E946EC)",
    R"([2013-12-01 12:43:45] Requesting peers from server)",
    R"([2013-12-01 12:43:45] Sending broadcast ping for share 35F762999B1275C0F894F3D5FBAC7059F76783ED)",
};

inline std::string log_text() {
    std::string s;
    for (const auto& l : kLogLines) s += l + "\r\n";
    return s;
}

inline const std::string kSid = "S-1-5-21-1757981266-507921405-1957994488-1003";

inline std::string reg_header() { return "Windows Registry Editor Version 5.00\r\n\r\n"; }

// Keys present after installation.
inline std::string installed_reg() {
    const std::string exe = R"(C:\\Program Files\\BitTorrent Sync\\BTSync.exe)";
    std::string r = reg_header();
    r += "[HKEY_CLASSES_ROOT\\Applications\\BTSync.exe\\shell\\open\\command]\r\n@=\"\\\"" + exe + "\\\" /OPEN \\\"%1\\\"\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\Software\\Classes\\Applications\\BTSync.exe\\shell\\open\\command]\r\n@=\"\\\"" + exe +
         "\\\" /OPEN \\\"%1\\\"\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\CurrentVersion\\Run]\r\n\"BitTorrent Sync\"=\"\\\"" + exe +
         "\\\" /MINIMIZED\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\ShellNoRoam\\MUICache]\r\n\"" + exe + "\"=\"BitTorrent Sync\"\r\n\r\n";
    r += "[HKEY_LOCAL_MACHINE\\SOFTWARE\\Microsoft\\ESENT\\Process\\BTSync\\DEBUG]\r\n\"Trace Level\"=\"\"\r\n\r\n";
    r += "[HKEY_LOCAL_MACHINE\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion\\Uninstall\\BitTorrent Sync]\r\n"
         "\"DisplayName\"=\"BitTorrent Sync\"\r\n\"UninstallString\"=\"" + exe + " /UNINSTALL\"\r\n\r\n";
    r += "[HKEY_LOCAL_MACHINE\\SYSTEM\\ControlSet001\\Services\\SharedAccess\\Parameters\\FirewallPolicy\\StandardProfile\\"
         "AuthorizedApplications\\List]\r\n\"" + exe + "\"=\"" + exe + ":*:Enabled:BitTorrent Sync\"\r\n\r\n";
    r += "[HKEY_USERS\\" + kSid + "\\Software\\Classes\\Applications\\BTSync.exe]\r\n\r\n";
    r += "[HKEY_USERS\\" + kSid + "\\Software\\Classes\\Applications\\BTSync.exe\\shell\\open\\command]\r\n@=\"\\\"" + exe +
         "\\\" /OPEN \\\"%1\\\"\"\r\n\r\n";
    r += "[HKEY_USERS\\" + kSid + "\\Software\\Microsoft\\Windows\\CurrentVersion\\Run]\r\n\"BitTorrent Sync\"=\"\\\"" + exe +
         "\\\" /MINIMIZED\"\r\n\r\n";
    r += "[HKEY_USERS\\" + kSid + "\\Software\\Microsoft\\Windows\\ShellNoRoam\\MUICache]\r\n\"" + exe +
         "\"=\"BitTorrent Sync\"\r\n\r\n";
    r += "[HKEY_USERS\\" + kSid + "_Classes\\Applications\\BTSync.exe\\shell\\open\\command]\r\n@=\"\\\"" + exe +
         "\\\" /OPEN \\\"%1\\\"\"\r\n\r\n";
    return r;
}

inline const std::string kUserAssistName = R"(HRZR_EHACNGU:P:\\Qbphzragf naq Frggvatf\\BFv\\Qrfxgbc\\OGFlap.rkr)";
inline const std::string kUserAssistDecoded = R"(UEME_RUNPATH:C:\Documents and Settings\OSi\Desktop\BTSync.exe)";

// Keys left behind after uninstalling.
inline std::string uninstalled_reg() {
    const std::string exe = R"(C:\\Program Files\\BitTorrent Sync\\BTSync.exe)";
    const std::string ua = "Software\\Microsoft\\Windows\\CurrentVersion\\Explorer\\UserAssist\\"
                           "{75048700-EF1F-11D0-9888-006097DEACF9}\\Count";
    std::string r = reg_header();
    r += "[HKEY_CLASSES_ROOT\\Applications\\BTSync.exe\\shell\\open\\command]\r\n@=\"\\\"" + exe + "\\\" /OPEN \\\"%1\\\"\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\Software\\Classes\\Applications\\BTSync.exe\\shell\\open\\command]\r\n@=\"\\\"" + exe +
         "\\\" /OPEN \\\"%1\\\"\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\CurrentVersion\\Run]\r\n\"BitTorrent Sync\"=\"\\\"" + exe +
         "\\\" /MINIMIZED\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\ShellNoRoam\\MUICache]\r\n\"" + exe + "\"=\"BitTorrent Sync\"\r\n\r\n";
    r += "[HKEY_LOCAL_MACHINE\\SOFTWARE\\Microsoft\\ESENT\\Process\\BTSync\\DEBUG]\r\n\"Trace Level\"=\"\"\r\n\r\n";
    r += "[HKEY_CURRENT_USER\\" + ua + "]\r\n\"" + kUserAssistName +
         "\"=hex:01,00,00,00,06,00,00,00,c0,3d,6b,2d,a3,ee,ce,01\r\n\r\n";
    r += "[HKEY_USERS\\" + kSid + "\\" + ua + "]\r\n\"" + kUserAssistName +
         "\"=hex:01,00,00,00,06,00,00,00,c0,3d,6b,2d,a3,ee,ce,01\r\n\r\n";
    return r;
}

inline std::string unrelated_reg() {
    std::string r = reg_header();
    r += "[HKEY_CURRENT_USER\\Software\\Microsoft\\Windows\\CurrentVersion\\Run]\r\n"
         "\"OneDrive\"=\"C:\\\\Program Files\\\\OneDrive\\\\OneDrive.exe /background\"\r\n\r\n";
    r += "[HKEY_LOCAL_MACHINE\\SOFTWARE\\Microsoft\\Windows\\CurrentVersion\\Uninstall\\7-Zip]\r\n"
         "\"DisplayName\"=\"7-Zip 19.00\"\r\n\"VersionMajor\"=dword:00000013\r\n\r\n";
    return r;
}

} // namespace fixtures

#endif // SYNCSCOPE_TESTS_FIXTURES_HPP
