#ifndef RCPROBE_MANIFEST_HPP
#define RCPROBE_MANIFEST_HPP

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace rcprobe::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Provenance sidecar written next to each command's outputs
// (manifest_<command>.json). Outputs are digested so downstream commands can
// detect drift; timestamps make manifests the one non-reproducible artifact.
struct RunManifest {
    std::string command;
    nlohmann::json config;
    std::string tool_version = kToolVersion;
    std::string started_at;
    std::string finished_at;
    std::vector<std::pair<std::string, std::string>> inputs;  // (path, sha256)
    std::vector<std::pair<std::string, std::string>> outputs; // (path, sha256)
};

std::string iso8601_now();

void manifest_add_input(RunManifest& m, const std::string& path);
void manifest_add_output(RunManifest& m, const std::string& path);
void write_manifest(const std::string& out_dir, RunManifest& m); // sets finished_at

// Checks the digests recorded in dir's manifest for `path` (as an output of
// an earlier command). Returns false (stale) when the file changed since;
// true when it matches or no manifest covers it.
bool manifest_output_current(const std::string& artifact_path);

} // namespace rcprobe::cli

#endif
