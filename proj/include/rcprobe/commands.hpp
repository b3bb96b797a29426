#ifndef RCPROBE_COMMANDS_HPP
#define RCPROBE_COMMANDS_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "rcprobe/backend.hpp"
#include "rcprobe/cloze.hpp"
#include "rcprobe/extraction.hpp"
#include "rcprobe/pair_forge.hpp"

namespace rcprobe::cli {

// Command entry points shared by the CLI binary and the test suites. Each
// returns a process exit code (0 ok, 1 validation, 2 backend,
// 3 infeasible balance) and reports progress/warnings on `log`.

struct BuildDatasetConfig {
    std::string corpus_path;
    std::string parses_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    double test_fraction = 1.0 / 9.0;
    pairs::LabelMode label_mode = pairs::LabelMode::main_text;
    extraction::ExtractionConfig extraction;
};

int cmd_build_dataset(const BuildDatasetConfig& cfg, std::ostream& log);

struct ProbeConfig {
    std::string dataset_path;
    std::vector<std::string> backend_configs; // paths to backend JSON files
    std::vector<backends::Pooling> poolings{backends::Pooling::mean};
    std::uint64_t seed = 0;
    double l2_strength = 1.0;
    int max_iterations = 1000;
    bool include_specials = false;
    std::string out_dir;
};

int cmd_probe(const ProbeConfig& cfg, std::ostream& log);

struct DiagnoseConfig {
    std::string probe_path;
    std::string backend_config;
    std::string suite_path; // empty -> builtin suite
    bool include_specials = false;
    std::string out_dir;
};

int cmd_diagnose(const DiagnoseConfig& cfg, std::ostream& log);

struct ClozeConfig {
    std::string records_path;
    std::string backend_config;
    cloze::TargetKind target_kind = cloze::TargetKind::relativizer;
    std::string annotations_csv; // optional
    std::string out_dir;
};

int cmd_cloze(const ClozeConfig& cfg, std::ostream& log);

struct ReportConfig {
    std::string run_dir; // directory holding probe/diagnostic/cloze artifacts
    std::string out_dir;
};

int cmd_report(const ReportConfig& cfg, std::ostream& log);

} // namespace rcprobe::cli

#endif
