#include "rcprobe/commands.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>

#include "rcprobe/conllu.hpp"
#include "rcprobe/diagnostics.hpp"
#include "rcprobe/error.hpp"
#include "rcprobe/manifest.hpp"
#include "rcprobe/mlm_client.hpp"
#include "rcprobe/probe.hpp"

namespace rcprobe::cli {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create output directory: " + dir);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("cannot open for writing: " + path);
    out << content;
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

void warn_if_stale(const std::string& artifact, std::ostream& log) {
    if (!manifest_output_current(artifact)) {
        log << "warning: " << artifact
            << " changed since its manifest was written (stale inputs?)\n";
    }
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '-');
    return out;
}

} // namespace

int cmd_build_dataset(const BuildDatasetConfig& cfg, std::ostream& log) {
    RunManifest manifest;
    manifest.command = "build-dataset";
    manifest.started_at = iso8601_now();
    manifest.config = {{"corpus", cfg.corpus_path},
                       {"parses", cfg.parses_path},
                       {"out", cfg.out_dir},
                       {"seed", cfg.seed},
                       {"test_fraction", cfg.test_fraction},
                       {"label_mode",
                        cfg.label_mode == pairs::LabelMode::appendix ? "appendix" : "main_text"}};

    std::vector<std::string> texts = extraction::read_corpus_file(cfg.corpus_path);
    std::vector<extraction::ConlluSentence> parses = extraction::read_conllu_file(cfg.parses_path);
    std::vector<extraction::ParsedSentence> sentences =
        extraction::align_corpus(texts, parses, cfg.parses_path);

    extraction::ExtractionStats stats;
    extraction::AnimacyWordlists lists;
    std::vector<extraction::RCRecord> records =
        extraction::extract_records(sentences, cfg.extraction, &stats, &lists);
    log << "extracted " << records.size() << " records from " << sentences.size() << " sentences ("
        << stats.failed_pronoun_filter << " failed pronoun filter, " << stats.no_relative_clause
        << " without RC, " << stats.role_discarded << " role-discarded, " << stats.animacy_discarded
        << " animacy-discarded)\n";

    std::vector<pairs::Bag> bags;
    bags.reserve(records.size());
    for (const extraction::RCRecord& r : records) bags.push_back(pairs::make_bag(r, cfg.label_mode));

    int exit_code = kExitOk;
    std::vector<pairs::DatasetSample> samples;
    if (!bags.empty()) {
        pairs::SampledDataset sampled = pairs::sample_balanced(bags, cfg.seed);
        if (sampled.infeasible_balance) {
            log << "warning: label balance infeasible for this corpus\n";
            exit_code = kExitInfeasibleBalance;
        }
        samples = std::move(sampled.samples);
        pairs::split_samples(samples, cfg.test_fraction, cfg.seed);
    }

    ensure_dir(cfg.out_dir);
    std::string records_path = cfg.out_dir + "/records.jsonl";
    std::string dataset_path = cfg.out_dir + "/dataset.jsonl";
    std::string stats_path = cfg.out_dir + "/stats.json";
    std::string wordlists_path = cfg.out_dir + "/wordlists.json";
    extraction::write_records_jsonl(records_path, records);
    pairs::write_samples_jsonl(dataset_path, samples);
    nlohmann::json stats_json = pairs::dataset_stats(samples);
    stats_json["extraction"] = {{"sentences", stats.sentences},
                                {"failed_pronoun_filter", stats.failed_pronoun_filter},
                                {"no_relative_clause", stats.no_relative_clause},
                                {"role_discarded", stats.role_discarded},
                                {"animacy_discarded", stats.animacy_discarded},
                                {"emitted_records", stats.emitted}};
    write_json_file(stats_path, stats_json);
    write_json_file(wordlists_path,
                    {{"who_exclusive", lists.who_exclusive}, {"which_exclusive", lists.which_exclusive}});

    manifest_add_input(manifest, cfg.corpus_path);
    manifest_add_input(manifest, cfg.parses_path);
    manifest_add_output(manifest, records_path);
    manifest_add_output(manifest, dataset_path);
    manifest_add_output(manifest, stats_path);
    manifest_add_output(manifest, wordlists_path);
    write_manifest(cfg.out_dir, manifest);

    log << "dataset: " << samples.size() << " samples -> " << dataset_path << "\n";
    return exit_code;
}

int cmd_probe(const ProbeConfig& cfg, std::ostream& log) {
    RunManifest manifest;
    manifest.command = "probe";
    manifest.started_at = iso8601_now();
    nlohmann::json pool_names = nlohmann::json::array();
    for (backends::Pooling p : cfg.poolings) pool_names.push_back(backends::to_string(p));
    manifest.config = {{"dataset", cfg.dataset_path}, {"backends", cfg.backend_configs},
                       {"poolings", pool_names},      {"seed", cfg.seed},
                       {"l2_strength", cfg.l2_strength}, {"max_iterations", cfg.max_iterations},
                       {"include_specials", cfg.include_specials}, {"out", cfg.out_dir}};

    warn_if_stale(cfg.dataset_path, log);
    std::vector<pairs::DatasetSample> all = pairs::read_samples_jsonl(cfg.dataset_path);
    std::vector<pairs::DatasetSample> train, test;
    for (pairs::DatasetSample& s : all) {
        (s.split == pairs::Split::test ? test : train).push_back(std::move(s));
    }
    if (train.empty() || test.empty()) {
        throw ValidationError("dataset must contain both train and test samples");
    }

    ensure_dir(cfg.out_dir);
    manifest_add_input(manifest, cfg.dataset_path);

    probing::SweepOptions opts;
    opts.train.seed = cfg.seed;
    opts.train.l2_strength = cfg.l2_strength;
    opts.train.max_iterations = cfg.max_iterations;
    opts.pooling_opts.include_specials = cfg.include_specials;

    std::string curves = "backend,pooling,layer,accuracy\n";
    std::size_t succeeded = 0, failed = 0;
    for (const std::string& backend_path : cfg.backend_configs) {
        std::unique_ptr<backends::Backend> backend;
        try {
            backend = backends::load_backend_file(backend_path);
        } catch (const std::exception& e) {
            log << "backend error (" << backend_path << "): " << e.what() << "; skipping\n";
            ++failed;
            continue;
        }
        manifest_add_input(manifest, backend_path);
        bool is_rule = backend->caps().rule;
        for (backends::Pooling pooling : cfg.poolings) {
            if (is_rule && pooling != cfg.poolings.front()) continue; // pooling-independent
            try {
                probing::ProbeReport report = probing::layer_sweep(*backend, train, test, pooling, opts);
                std::string stem = cfg.out_dir + "/probe_" + sanitize(report.backend.name) + "_" +
                                   backends::to_string(report.pooling);
                write_json_file(stem + ".json", probing::report_to_json(report));
                write_text_file(stem + ".csv", probing::report_to_csv(report));
                std::string curve = probing::layer_curve_csv(report);
                curves += curve.substr(curve.find('\n') + 1); // drop per-report header
                manifest_add_output(manifest, stem + ".json");
                manifest_add_output(manifest, stem + ".csv");
                log << report.backend.name << " (" << backends::to_string(report.pooling)
                    << "): best layer " << report.best_layer << ", accuracy "
                    << report.per_layer_accuracy.at(report.best_layer) << "\n";
                ++succeeded;
            } catch (const std::exception& e) {
                log << "backend error (" << backend->info().name << ", "
                    << backends::to_string(pooling) << "): " << e.what() << "; continuing\n";
                ++failed;
            }
        }
    }
    std::string curves_path = cfg.out_dir + "/layer_curves.csv";
    write_text_file(curves_path, curves);
    manifest_add_output(manifest, curves_path);
    write_manifest(cfg.out_dir, manifest);

    if (succeeded == 0) {
        log << "all backends failed\n";
        return kExitBackend;
    }
    return kExitOk;
}

int cmd_diagnose(const DiagnoseConfig& cfg, std::ostream& log) {
    RunManifest manifest;
    manifest.command = "diagnose";
    manifest.started_at = iso8601_now();
    manifest.config = {{"probe", cfg.probe_path},
                       {"backend", cfg.backend_config},
                       {"suite", cfg.suite_path.empty() ? "builtin" : cfg.suite_path},
                       {"include_specials", cfg.include_specials},
                       {"out", cfg.out_dir}};

    warn_if_stale(cfg.probe_path, log);
    std::ifstream probe_in(cfg.probe_path);
    if (!probe_in) throw ValidationError("cannot open probe file: " + cfg.probe_path);
    nlohmann::json probe_json = nlohmann::json::parse(probe_in, nullptr, false);
    if (probe_json.is_discarded()) throw ValidationError("invalid JSON in " + cfg.probe_path);
    if (probe_json.contains("probe")) probe_json = probe_json["probe"]; // accept a report file too
    probing::LinearProbe probe = probing::probe_from_json(probe_json);

    std::unique_ptr<backends::Backend> backend;
    try {
        backend = backends::load_backend_file(cfg.backend_config);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(e.what());
    }

    std::vector<diagnostics::DiagnosticSentence> suite =
        cfg.suite_path.empty() ? diagnostics::load_builtin_suite()
                               : diagnostics::read_suite_jsonl(cfg.suite_path);

    backends::PoolingOptions popts;
    popts.include_specials = cfg.include_specials;
    diagnostics::DiagnosticReport report = diagnostics::evaluate_suite(probe, *backend, suite, popts);

    ensure_dir(cfg.out_dir);
    std::string stem = cfg.out_dir + "/diagnostics_" + sanitize(backend->info().name);
    write_json_file(stem + ".json", diagnostics::diagnostic_report_to_json(report));
    write_text_file(stem + ".csv", diagnostics::diagnostic_report_to_csv(report));

    manifest_add_input(manifest, cfg.probe_path);
    manifest_add_input(manifest, cfg.backend_config);
    if (!cfg.suite_path.empty()) manifest_add_input(manifest, cfg.suite_path);
    manifest_add_output(manifest, stem + ".json");
    manifest_add_output(manifest, stem + ".csv");
    write_manifest(cfg.out_dir, manifest);

    log << "diagnostics over " << suite.size() << " sentences -> " << stem << ".json\n";
    return kExitOk;
}

int cmd_cloze(const ClozeConfig& cfg, std::ostream& log) {
    RunManifest manifest;
    manifest.command = "cloze";
    manifest.started_at = iso8601_now();
    manifest.config = {{"records", cfg.records_path},
                       {"backend", cfg.backend_config},
                       {"target_kind", cloze::to_string(cfg.target_kind)},
                       {"annotations", cfg.annotations_csv},
                       {"out", cfg.out_dir}};

    warn_if_stale(cfg.records_path, log);
    std::vector<extraction::RCRecord> records = extraction::read_records_jsonl(cfg.records_path);

    std::unique_ptr<backends::Backend> backend;
    try {
        backend = backends::load_backend_file(cfg.backend_config);
    } catch (const ValidationError&) {
        throw;
    } catch (const std::exception& e) {
        throw BackendError(e.what());
    }
    if (!backend->caps().mlm_head) {
        throw BackendError("backend \"" + backend->info().name + "\" has no MLM head");
    }

    cloze::ClozeReport report;
    report.target_kind = cfg.target_kind;
    report.backend = backend->info();

    std::vector<cloze::ClozeInstance> instances;
    std::map<std::pair<bool, extraction::RelativizerForm>, std::size_t> skipped_by_cell;
    std::size_t skipped_total = 0;
    for (const extraction::RCRecord& r : records) {
        std::size_t before = skipped_total;
        std::optional<cloze::ClozeInstance> inst = cloze::make_cloze(
            r, cfg.target_kind, *backend, &skipped_total, &report.excluded_nonrestrictive);
        if (inst) {
            instances.push_back(std::move(*inst));
        } else if (skipped_total > before) {
            ++skipped_by_cell[{r.subjrc, r.relativizer_form}];
        }
    }

    std::map<std::pair<bool, extraction::RelativizerForm>, std::vector<cloze::ClozeResult>> by_cell;
    std::vector<cloze::ClozeResult> all;
    for (const cloze::ClozeInstance& inst : instances) {
        backends::TokenizedSentence tok = backend->tokenize(inst.text_with_mask);
        cloze::ClozeResult res;
        res.distribution = backend->predict_masked(tok);
        res.target = inst.target;
        res.target_kind = inst.target_kind;
        by_cell[{inst.subjrc, inst.relativizer_form}].push_back(res);
        all.push_back(std::move(res));
    }
    if (all.empty()) throw ValidationError("no cloze instances could be built from the records");

    auto compute = [&](const std::vector<cloze::ClozeResult>& rs, std::size_t skipped) {
        cloze::ClozeMetrics m;
        m.mp_at_1 = cloze::mp_at_1(rs);
        m.mtr = cloze::mtr(rs);
        m.nme = cloze::nme(rs);
        if (cfg.target_kind == cloze::TargetKind::relativizer) {
            m.relativizer_ratio = cloze::relativizer_ratio(rs);
        }
        m.n_evaluated = rs.size();
        m.n_skipped = skipped;
        return m;
    };
    for (const auto& [cell, rs] : by_cell) {
        std::size_t skipped = skipped_by_cell.count(cell) ? skipped_by_cell.at(cell) : 0;
        report.by_cell[cell] = compute(rs, skipped);
    }
    report.overall = compute(all, skipped_total);

    ensure_dir(cfg.out_dir);
    std::string kind_tag = cloze::to_string(cfg.target_kind);
    std::string instances_path = cfg.out_dir + "/cloze_instances_" + kind_tag + ".jsonl";
    std::string stem = cfg.out_dir + "/cloze_metrics_" + kind_tag + "_" +
                       sanitize(backend->info().name);
    cloze::write_instances_jsonl(instances_path, instances);
    write_json_file(stem + ".json", cloze::cloze_report_to_json(report));
    write_text_file(stem + ".csv", cloze::cloze_report_to_csv(report));
    manifest_add_input(manifest, cfg.records_path);
    manifest_add_input(manifest, cfg.backend_config);
    manifest_add_output(manifest, instances_path);
    manifest_add_output(manifest, stem + ".json");
    manifest_add_output(manifest, stem + ".csv");

    if (!cfg.annotations_csv.empty()) {
        std::vector<cloze::QualitativeRecord> annotations =
            cloze::read_qualitative_csv(cfg.annotations_csv);
        auto cells = cloze::aggregate_qualitative(annotations, instances);
        std::string qual_path = cfg.out_dir + "/cloze_qualitative_" + kind_tag + "_" +
                                sanitize(backend->info().name) + ".json";
        write_json_file(qual_path, cloze::qualitative_to_json(cells));
        manifest_add_input(manifest, cfg.annotations_csv);
        manifest_add_output(manifest, qual_path);
    }
    write_manifest(cfg.out_dir, manifest);

    log << "cloze (" << kind_tag << "): " << instances.size() << " instances, " << skipped_total
        << " skipped multi-piece, " << report.excluded_nonrestrictive
        << " non-restrictive excluded\n";
    return kExitOk;
}

int cmd_report(const ReportConfig& cfg, std::ostream& log) {
    RunManifest manifest;
    manifest.command = "report";
    manifest.started_at = iso8601_now();
    manifest.config = {{"run_dir", cfg.run_dir}, {"out", cfg.out_dir}};

    if (!fs::is_directory(cfg.run_dir)) {
        throw ValidationError("run directory does not exist: " + cfg.run_dir);
    }

    std::vector<std::string> probe_reports, diag_reports, cloze_reports;
    for (const fs::directory_entry& entry : fs::recursive_directory_iterator(cfg.run_dir)) {
        if (!entry.is_regular_file()) continue;
        std::string name = entry.path().filename().string();
        if (entry.path().extension() != ".json") continue;
        if (name.rfind("probe_", 0) == 0) probe_reports.push_back(entry.path().string());
        if (name.rfind("diagnostics_", 0) == 0) diag_reports.push_back(entry.path().string());
        if (name.rfind("cloze_metrics_", 0) == 0) cloze_reports.push_back(entry.path().string());
    }
    std::sort(probe_reports.begin(), probe_reports.end());
    std::sort(diag_reports.begin(), diag_reports.end());
    std::sort(cloze_reports.begin(), cloze_reports.end());

    auto read_json = [&](const std::string& path) {
        warn_if_stale(path, log);
        std::ifstream in(path);
        nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
        if (j.is_discarded()) throw ValidationError("invalid JSON in " + path);
        manifest_add_input(manifest, path);
        return j;
    };

    std::string md = "# Run summary\n";
    std::string curves = "backend,pooling,layer,accuracy\n";
    for (const std::string& path : probe_reports) {
        nlohmann::json j = read_json(path);
        md += "\n## Probe: " + j["backend"]["name"].get<std::string>() + " (" +
              j["pooling"].get<std::string>() + " pooling)\n\n";
        md += "- checkpoint: " + j["backend"]["checkpoint"].get<std::string>() + "\n";
        md += "- train/test: " + std::to_string(j["n_train"].get<std::size_t>()) + "/" +
              std::to_string(j["n_test"].get<std::size_t>()) + "\n";
        md += "- best layer: " + std::to_string(j["best_layer"].get<int>()) +
              " (selected on test accuracy; optimistic)\n";
        md += "- overall accuracy: " + std::to_string(j["overall_accuracy"].get<double>()) + "\n";
        md += "- layer-0 baseline (mean pooling): " +
              std::to_string(j["baseline_layer0"].get<double>()) + "\n";
        md += "\n| modification | accuracy | layer-0 baseline |\n|---|---|---|\n";
        for (const auto& [kind, acc] : j["per_modification_accuracy"].items()) {
            std::string base;
            if (j["baseline_per_modification"].contains(kind)) {
                base = std::to_string(j["baseline_per_modification"][kind].get<double>());
            }
            md += "| " + kind + " | " + std::to_string(acc.get<double>()) + " | " + base + " |\n";
        }
        for (const auto& [layer, acc] : j["per_layer_accuracy"].items()) {
            curves += j["backend"]["name"].get<std::string>() + "," +
                      j["pooling"].get<std::string>() + "," + layer + "," +
                      std::to_string(acc.get<double>()) + "\n";
        }
    }
    for (const std::string& path : diag_reports) {
        nlohmann::json j = read_json(path);
        md += "\n## Diagnostics: " + j["backend"]["name"].get<std::string>() + "\n\n";
        md += "- suite sha256: " + j["suite_sha256"].get<std::string>() + "\n";
        md += "- probe layer " + std::to_string(j["probe_layer"].get<int>()) + ", " +
              j["pooling"].get<std::string>() + " pooling\n";
        md += "\n| case | factor | restrictive | non-restrictive |\n|---|---|---|---|\n";
        std::map<std::pair<int, std::string>, std::pair<std::string, std::string>> rows;
        for (const nlohmann::json& c : j["cells"]) {
            auto& row = rows[{c["case"].get<int>(), c["factor"].get<std::string>()}];
            std::string val = std::to_string(c["mean_logit"].get<double>());
            (c["restrictive"].get<bool>() ? row.first : row.second) = val;
        }
        for (const auto& [key, row] : rows) {
            md += "| " + std::to_string(key.first) + " | " + key.second + " | " + row.first +
                  " | " + row.second + " |\n";
        }
        md += "\nAccuracy by case:";
        for (const auto& [case_id, acc] : j["accuracy_by_case"].items()) {
            md += " " + case_id + ": " + std::to_string(acc.get<double>());
        }
        md += "\n";
    }
    for (const std::string& path : cloze_reports) {
        nlohmann::json j = read_json(path);
        md += "\n## Cloze (" + j["target_kind"].get<std::string>() + "): " +
              j["backend"]["name"].get<std::string>() + "\n\n";
        md += "| cell | MP@1 | MTR | NME | n |\n|---|---|---|---|---|\n";
        for (const auto& [cell, m] : j["by_cell"].items()) {
            md += "| " + cell + " | " + std::to_string(m["mp_at_1"].get<double>()) + " | " +
                  std::to_string(m["mtr"].get<double>()) + " | " +
                  std::to_string(m["nme"].get<double>()) + " | " +
                  std::to_string(m["n_evaluated"].get<std::size_t>()) + " |\n";
        }
        const nlohmann::json& o = j["overall"];
        md += "| overall | " + std::to_string(o["mp_at_1"].get<double>()) + " | " +
              std::to_string(o["mtr"].get<double>()) + " | " +
              std::to_string(o["nme"].get<double>()) + " | " +
              std::to_string(o["n_evaluated"].get<std::size_t>()) + " |\n";
    }

    ensure_dir(cfg.out_dir);
    std::string summary_path = cfg.out_dir + "/summary.md";
    std::string curves_path = cfg.out_dir + "/layer_curves_all.csv";
    write_text_file(summary_path, md);
    write_text_file(curves_path, curves);
    manifest_add_output(manifest, summary_path);
    manifest_add_output(manifest, curves_path);
    write_manifest(cfg.out_dir, manifest);

    log << "summary -> " << summary_path << "\n";
    return kExitOk;
}

} // namespace rcprobe::cli
