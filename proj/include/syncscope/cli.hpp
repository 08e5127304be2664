#ifndef SYNCSCOPE_CLI_HPP
#define SYNCSCOPE_CLI_HPP

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "syncscope/artifacts.hpp"
#include "syncscope/bencode.hpp"
#include "syncscope/keys.hpp"
#include "syncscope/pcap.hpp"
#include "syncscope/report.hpp"
#include "syncscope/wire.hpp"

namespace syncscope {

inline constexpr std::string_view kToolVersion = "0.1.0";

enum class ExitCode : int { Ok = 0, Failure = 1, Usage = 2 };

struct CliConfig {
    std::string subcommand;
    std::vector<std::string> inputs;
    std::string artifacts_dir;
    std::string pcap_path;
    std::string reg_path;
    std::vector<std::string> tracker_ips;
    std::vector<std::string> relay_ips;
    std::string out_path;
    std::string format = "json";
    bool annotate = false;
    int verbosity = 0;
};

namespace detail {

class Diagnostics {
public:
    Diagnostics(std::ostream& err, bool color) : err_(err), color_(color) {}

    void error(const std::string& msg) const {
        err_ << (color_ ? "\x1b[31merror:\x1b[0m " : "error: ") << msg << "\n";
    }
    void info(const std::string& msg) const { err_ << msg << "\n"; }

private:
    std::ostream& err_;
    bool color_;
};

inline bool want_color(std::ostream& err) {
    if (std::getenv("SYNCSCOPE_NO_COLOR") != nullptr) return false;
    return &err == &std::cerr && ::isatty(STDERR_FILENO) != 0;
}

inline void emit(const CliConfig& cfg, std::ostream& out, const std::string& data) {
    if (cfg.out_path.empty() || cfg.out_path == "-") {
        out << data;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    f << data;
    if (!f) throw ReadError(cfg.out_path + " (write)");
}

inline std::string utc_now_text() {
    const auto now = std::chrono::system_clock::now();
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count();
    return NaiveTimestamp::from_epoch_seconds(secs).text() + "Z";
}

inline std::set<Ipv4> parse_hosts(const std::vector<std::string>& texts, const std::set<Ipv4>& defaults) {
    if (texts.empty()) return defaults;
    std::set<Ipv4> out;
    for (const auto& t : texts) {
        auto ip = Ipv4::parse(t);
        if (!ip) throw CLI::ValidationError("--tracker-ip/--relay-ip", "not an IPv4 address: " + t);
        out.insert(*ip);
    }
    return out;
}

inline DissectorConfig dissector_config(const CliConfig& cfg) {
    DissectorConfig d;
    d.hosts.trackers = parse_hosts(cfg.tracker_ips, d.hosts.trackers);
    d.hosts.relays = parse_hosts(cfg.relay_ips, d.hosts.relays);
    return d;
}

inline std::string with_annotation(const CliConfig& cfg, Json j) {
    if (cfg.annotate) {
        j["annotation"] = {{"tool", "syncscope"}, {"version", std::string(kToolVersion)}, {"generated_at", utc_now_text()}};
    }
    return dump_json(j);
}

inline int cmd_bencode(const CliConfig& cfg, std::ostream& out) {
    const std::string data = read_file(cfg.inputs.at(0));
    const BValue v = parse_bencode_exact(data);
    if (cfg.format == "json") emit(cfg, out, with_annotation(cfg, Json{{"value", bvalue_json(v)}}));
    else emit(cfg, out, to_pretty(v) + "\n");
    return 0;
}

inline int cmd_key(const CliConfig& cfg, std::ostream& out) {
    const SecretKey k = classify_secret(cfg.inputs.at(0));
    const ShareId id = derive_share_id(k);
    if (cfg.format == "json") {
        emit(cfg, out, with_annotation(cfg, Json{{"class", std::string(to_string(k.key_class))}, {"sha1_share_id", id.hex()}}));
    } else {
        emit(cfg, out, std::string(to_string(k.key_class)) + "\nSHA-1 ShareId: " + id.hex() + "\n");
    }
    return 0;
}

inline ArtifactBundle load_bundle(const CliConfig& cfg, const std::string& dir) {
    ArtifactBundle b = dir.empty() ? ArtifactBundle{} : scan_artifacts(dir);
    if (!cfg.reg_path.empty()) add_registry_export(b, cfg.reg_path, read_file(cfg.reg_path));
    return b;
}

inline int cmd_artifacts(const CliConfig& cfg, std::ostream& out) {
    emit(cfg, out, with_annotation(cfg, bundle_json(load_bundle(cfg, cfg.inputs.at(0)))));
    return 0;
}

inline int cmd_pcap(const CliConfig& cfg, std::ostream& out) {
    const Capture cap = read_pcap(read_file(cfg.inputs.at(0)));
    const DissectionResult d = dissect_capture(cap, dissector_config(cfg));
    emit(cfg, out, with_annotation(cfg, dissection_json(cap, d)));
    return 0;
}

inline int cmd_report(const CliConfig& cfg, std::ostream& out) {
    CaseInputs in;
    in.artifacts = load_bundle(cfg, cfg.artifacts_dir);
    if (!cfg.pcap_path.empty()) {
        const Capture cap = read_pcap(read_file(cfg.pcap_path));
        in.traffic = dissect_capture(cap, dissector_config(cfg));
        in.capture_name = std::filesystem::path(cfg.pcap_path).filename().string();
    }
    const CaseReport r = correlate(in);
    if (cfg.format == "text") {
        std::string text = report_text(r);
        if (cfg.annotate) text += "\nGenerated " + utc_now_text() + " by syncscope " + std::string(kToolVersion) + "\n";
        emit(cfg, out, text);
    } else {
        emit(cfg, out, with_annotation(cfg, report_json(r)));
    }
    return 0;
}

} // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    const detail::Diagnostics diag(err, detail::want_color(err));
    CliConfig cfg;

    CLI::App app{"Forensic parser for BitTorrent Sync artifacts and traffic", "syncscope"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    app.add_flag("-v,--verbose", cfg.verbosity, "Report progress on standard error");

    auto add_output = [&](CLI::App* sub, bool text_format) {
        sub->add_option("-o,--out", cfg.out_path, "Write data here instead of standard output");
        if (text_format) {
            sub->add_option("-f,--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
        }
        sub->add_flag("--annotate", cfg.annotate, "Add run metadata (time, tool version) to the output");
    };
    auto add_hosts = [&](CLI::App* sub) {
        sub->add_option("--tracker-ip", cfg.tracker_ips, "Tracker address (repeatable; replaces the defaults)");
        sub->add_option("--relay-ip", cfg.relay_ips, "Relay address (repeatable; replaces the defaults)");
    };

    auto* bencode = app.add_subcommand("bencode", "Decode a bencoded file");
    bencode->add_option("file", cfg.inputs, "Input file")->required()->expected(1);
    add_output(bencode, true);

    auto* key = app.add_subcommand("key", "Classify a share secret and show its SHA-1 ShareId");
    key->add_option("secret", cfg.inputs, "33-character secret")->required()->expected(1);
    add_output(key, true);

    auto* artifacts = app.add_subcommand("artifacts", "Scan a mounted image directory for client artifacts");
    artifacts->add_option("dir", cfg.inputs, "Directory to scan")->required()->expected(1);
    artifacts->add_option("--reg", cfg.reg_path, "Windows .reg export to check against the key catalogue");
    add_output(artifacts, false);

    auto* pcap = app.add_subcommand("pcap", "Dissect client traffic in a pcap capture");
    pcap->add_option("file", cfg.inputs, "Capture file")->required()->expected(1);
    add_hosts(pcap);
    add_output(pcap, false);

    auto* report = app.add_subcommand("report", "Correlate all sources into a case report");
    report->add_option("--artifacts", cfg.artifacts_dir, "Directory to scan")->required();
    report->add_option("--pcap", cfg.pcap_path, "Capture file");
    report->add_option("--reg", cfg.reg_path, "Windows .reg export");
    add_hosts(report);
    add_output(report, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        diag.error(e.what());
        err << app.help();
        return static_cast<int>(ExitCode::Usage);
    }

    CLI::App* chosen = app.get_subcommands().front();
    cfg.subcommand = chosen->get_name();
    // `key` and `bencode` default to plain text, the others to JSON.
    const CLI::Option* format_opt = chosen->get_option_no_throw("--format");
    if (format_opt == nullptr || format_opt->count() == 0)
        cfg.format = (cfg.subcommand == "key" || cfg.subcommand == "bencode") ? "text" : "json";
    if (cfg.verbosity > 0) diag.info("syncscope " + cfg.subcommand);

    try {
        if (cfg.subcommand == "bencode") return detail::cmd_bencode(cfg, out);
        if (cfg.subcommand == "key") return detail::cmd_key(cfg, out);
        if (cfg.subcommand == "artifacts") return detail::cmd_artifacts(cfg, out);
        if (cfg.subcommand == "pcap") return detail::cmd_pcap(cfg, out);
        return detail::cmd_report(cfg, out);
    } catch (const CLI::ValidationError& e) {
        diag.error(e.what());
        return static_cast<int>(ExitCode::Usage);
    } catch (const std::exception& e) {
        diag.error(e.what());
        return static_cast<int>(ExitCode::Failure);
    }
}

} // namespace syncscope

#endif // SYNCSCOPE_CLI_HPP
