#include "rcprobe/manifest.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "rcprobe/digest.hpp"
#include "rcprobe/error.hpp"

namespace rcprobe::cli {

namespace fs = std::filesystem;

std::string iso8601_now() {
    std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                  tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
    return buf;
}

void manifest_add_input(RunManifest& m, const std::string& path) {
    m.inputs.emplace_back(path, digest::sha256_file_hex(path));
}

void manifest_add_output(RunManifest& m, const std::string& path) {
    m.outputs.emplace_back(path, digest::sha256_file_hex(path));
}

void write_manifest(const std::string& out_dir, RunManifest& m) {
    m.finished_at = iso8601_now();
    nlohmann::json inputs = nlohmann::json::array();
    for (const auto& [path, sha] : m.inputs) inputs.push_back({{"path", path}, {"sha256", sha}});
    nlohmann::json outputs = nlohmann::json::array();
    for (const auto& [path, sha] : m.outputs) outputs.push_back({{"path", path}, {"sha256", sha}});
    nlohmann::json j{{"command", m.command},       {"config", m.config},
                     {"tool_version", m.tool_version}, {"started_at", m.started_at},
                     {"finished_at", m.finished_at},   {"inputs", inputs},
                     {"outputs", outputs}};
    std::string path = out_dir + "/manifest_" + m.command + ".json";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot write manifest: " + path);
    out << j.dump(2) << "\n";
}

bool manifest_output_current(const std::string& artifact_path) {
    fs::path p(artifact_path);
    fs::path dir = p.parent_path();
    if (dir.empty()) dir = ".";
    std::error_code ec;
    for (const fs::directory_entry& entry : fs::directory_iterator(dir, ec)) {
        const fs::path& mp = entry.path();
        if (mp.filename().string().rfind("manifest_", 0) != 0 || mp.extension() != ".json") continue;
        std::ifstream in(mp);
        if (!in) continue;
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.contains("outputs")) continue;
        for (const nlohmann::json& o : j["outputs"]) {
            if (!o.contains("path") || !o.contains("sha256")) continue;
            fs::path recorded(o["path"].get<std::string>());
            if (recorded.filename() != p.filename()) continue;
            try {
                return digest::sha256_file_hex(artifact_path) == o["sha256"].get<std::string>();
            } catch (const ValidationError&) {
                return false;
            }
        }
    }
    return true; // no manifest covers it; nothing to compare against
}

} // namespace rcprobe::cli
