#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rcprobe/commands.hpp"
#include "rcprobe/error.hpp"
#include "rcprobe/manifest.hpp"

namespace {

using namespace rcprobe;

std::vector<backends::Pooling> parse_poolings(const std::vector<std::string>& names) {
    std::vector<backends::Pooling> out;
    for (const std::string& n : names) {
        std::optional<backends::Pooling> p = backends::pooling_from_string(n);
        if (!p) throw ValidationError("unknown pooling: " + n + " (expected cls or mean)");
        out.push_back(*p);
    }
    if (out.empty()) out.push_back(backends::Pooling::mean);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rcprobe - relative-clause minimal-pair datasets and MLM probing"};
    app.set_version_flag("--version", rcprobe::cli::kToolVersion);
    app.set_config("--config", "", "read options from a TOML config file");
    app.require_subcommand(1);

    // build-dataset
    cli::BuildDatasetConfig build_cfg;
    bool appendix_labels = false;
    CLI::App* build = app.add_subcommand("build-dataset",
                                         "extract relative clauses and forge the minimal-pair dataset");
    build->add_option("--corpus", build_cfg.corpus_path, "corpus file (text or JSONL)")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--parses", build_cfg.parses_path, "CoNLL-U parses aligned with the corpus")
        ->required()
        ->check(CLI::ExistingFile);
    build->add_option("--out", build_cfg.out_dir, "output directory")->required();
    build->add_option("--seed", build_cfg.seed, "RNG seed")->required();
    build->add_option("--test-fraction", build_cfg.test_fraction, "test split fraction")
        ->check(CLI::Range(1e-9, 1.0 - 1e-9))
        ->capture_default_str();
    build->add_flag("--appendix-labels", appendix_labels,
                    "label relativizer omission per the appendix paradigm table");

    // probe
    cli::ProbeConfig probe_cfg;
    std::vector<std::string> pooling_names{"mean"};
    CLI::App* probe = app.add_subcommand("probe", "train and evaluate layer-wise acceptability probes");
    probe->add_option("--dataset", probe_cfg.dataset_path, "dataset JSONL from build-dataset")
        ->required()
        ->check(CLI::ExistingFile);
    probe->add_option("--backend", probe_cfg.backend_configs, "backend config JSON (repeatable)")
        ->required()
        ->check(CLI::ExistingFile);
    probe->add_option("--pooling", pooling_names, "pooling strategies: cls, mean")
        ->capture_default_str();
    probe->add_option("--seed", probe_cfg.seed, "RNG seed")->required();
    probe->add_option("--l2", probe_cfg.l2_strength, "L2 penalty on probe weights")
        ->capture_default_str();
    probe->add_option("--max-iterations", probe_cfg.max_iterations, "optimizer iteration cap")
        ->capture_default_str();
    probe->add_flag("--include-specials", probe_cfg.include_specials,
                    "include delimiter specials in mean pooling");
    probe->add_option("--out", probe_cfg.out_dir, "output directory")->required();

    // diagnose
    cli::DiagnoseConfig diag_cfg;
    std::uint64_t diag_seed = 0;
    CLI::App* diagnose = app.add_subcommand("diagnose", "evaluate a probe on the diagnostic suite");
    diagnose->add_option("--probe", diag_cfg.probe_path, "probe JSON (or probe report)")
        ->required()
        ->check(CLI::ExistingFile);
    diagnose->add_option("--backend", diag_cfg.backend_config, "backend config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    diagnose->add_option("--suite", diag_cfg.suite_path, "suite JSONL (default: builtin)")
        ->check(CLI::ExistingFile);
    diagnose->add_option("--seed", diag_seed, "RNG seed (recorded; evaluation is deterministic)")
        ->required();
    diagnose->add_flag("--include-specials", diag_cfg.include_specials,
                       "include delimiter specials in mean pooling");
    diagnose->add_option("--out", diag_cfg.out_dir, "output directory")->required();

    // cloze
    cli::ClozeConfig cloze_cfg;
    std::string target_kind = "relativizer";
    std::uint64_t cloze_seed = 0;
    CLI::App* cloze_cmd = app.add_subcommand("cloze", "masked prediction of relativizers/antecedents");
    cloze_cmd->add_option("--records", cloze_cfg.records_path, "records JSONL from build-dataset")
        ->required()
        ->check(CLI::ExistingFile);
    cloze_cmd->add_option("--backend", cloze_cfg.backend_config, "backend config JSON")
        ->required()
        ->check(CLI::ExistingFile);
    cloze_cmd->add_option("--target", target_kind, "relativizer or antecedent")
        ->check(CLI::IsMember({"relativizer", "antecedent"}))
        ->capture_default_str();
    cloze_cmd->add_option("--annotations", cloze_cfg.annotations_csv,
                          "qualitative annotation CSV to aggregate")
        ->check(CLI::ExistingFile);
    cloze_cmd->add_option("--seed", cloze_seed, "RNG seed (recorded; evaluation is deterministic)")
        ->required();
    cloze_cmd->add_option("--out", cloze_cfg.out_dir, "output directory")->required();

    // report
    cli::ReportConfig report_cfg;
    std::uint64_t report_seed = 0;
    CLI::App* report = app.add_subcommand("report", "combined human-readable summary and plot data");
    report->add_option("--run-dir", report_cfg.run_dir, "directory with probe/diagnose/cloze outputs")
        ->required()
        ->check(CLI::ExistingDirectory);
    report->add_option("--seed", report_seed, "RNG seed (recorded; rendering is deterministic)")
        ->required();
    report->add_option("--out", report_cfg.out_dir, "output directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            build_cfg.label_mode =
                appendix_labels ? pairs::LabelMode::appendix : pairs::LabelMode::main_text;
            return cli::cmd_build_dataset(build_cfg, std::cerr);
        }
        if (probe->parsed()) {
            probe_cfg.poolings = parse_poolings(pooling_names);
            return cli::cmd_probe(probe_cfg, std::cerr);
        }
        if (diagnose->parsed()) return cli::cmd_diagnose(diag_cfg, std::cerr);
        if (cloze_cmd->parsed()) return cli::cmd_cloze(cloze_cfg, std::cerr);
        if (report->parsed()) return cli::cmd_report(report_cfg, std::cerr);
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return kExitBackend;
    } catch (const ParadigmMismatchError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    }
    return kExitOk;
}
