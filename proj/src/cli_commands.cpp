#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "convtrace/attacks.hpp"
#include "convtrace/classify.hpp"
#include "convtrace/cli.hpp"
#include "convtrace/error.hpp"
#include "convtrace/evaluation.hpp"
#include "convtrace/features_csv.hpp"
#include "convtrace/image_io.hpp"
#include "convtrace/log.hpp"
#include "convtrace/manifest.hpp"
#include "convtrace/model_io.hpp"
#include "convtrace/rng.hpp"
#include "convtrace/synth.hpp"
#include "convtrace/trace.hpp"

namespace convtrace::cli {
namespace {

std::string read_text(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << text;
    if (!out) throw IoError("write failed for " + path.string());
}

void require_file(const std::filesystem::path& path, const char* what)
{
    if (!std::filesystem::is_regular_file(path)) throw IoError(std::string(what) + " not found: " + path.string());
}

void require_writable_parent(const std::filesystem::path& path)
{
    const auto parent = path.parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent)) {
        throw IoError("output directory does not exist: " + parent.string());
    }
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) throw IoError("cannot create directory " + dir.string());
}

int clamp_jobs(int jobs)
{
    if (jobs < 1) throw UsageError("--jobs must be >= 1");
    return jobs;
}

// Concatenates feature files in argument order; ids follow that order.
std::vector<FeatureRow> load_feature_rows(const std::vector<std::filesystem::path>& files)
{
    if (files.empty()) throw UsageError("at least one --features file is required");
    std::vector<FeatureRow> rows;
    for (const auto& f : files) {
        require_file(f, "feature file");
        auto part = read_feature_csv(f);
        rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return rows;
}

void report_failed_rows(const std::vector<FeatureRow>& rows)
{
    std::size_t failed = 0;
    for (const auto& r : rows) failed += r.failed ? 1 : 0;
    if (failed) log::warn("skipping " + std::to_string(failed) + " failed feature rows");
}

}  // namespace

int exit_code_for_current_exception()
{
    try {
        throw;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    } catch (...) {
        std::cerr << "internal error\n";
        return kExitInternal;
    }
}

int cmd_synth(const SynthArgs& args)
{
    require_file(args.spec_file, "spec file");
    const auto specs = synth::parse_spec_json(read_text(args.spec_file));
    ensure_dir(args.out_dir);
    const DatasetManifest manifest = synth::gen_dataset(specs, args.out_dir);
    const auto manifest_path = args.out_dir / "manifest.csv";
    write_manifest(manifest, manifest_path);
    log::info("wrote " + manifest_path.string());
    return kExitOk;
}

int cmd_extract(const ExtractArgs& args)
{
    require_file(args.manifest, "manifest");
    require_writable_parent(args.out_csv);
    const int jobs = clamp_jobs(args.jobs);
    em::EmConfig config = args.em;
    config.alpha = args.alpha;
    config.validate();
    const DatasetManifest manifest = read_manifest(args.manifest);

    const auto n = static_cast<std::ptrdiff_t>(manifest.entries.size());
    std::vector<FeatureRow> rows(manifest.entries.size());
    std::vector<std::string> errors(manifest.entries.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const ManifestEntry& entry = manifest.entries[idx];
        FeatureRow& row = rows[idx];
        row.path = entry.path.generic_string();
        row.label = entry.label;
        row.source = entry.source;
        row.alpha = config.alpha;
        try {
            RgbImage image = load_image(manifest.resolve(entry));
            if (args.crop) image = center_crop(image, *args.crop, *args.crop);
            row = make_feature_row(row.path, entry.label, entry.source, extract_ct(image, config));
        } catch (const std::exception& e) {
            row.failed = true;
            errors[idx] = e.what();
        }
    }

    write_feature_csv(rows, config.alpha, args.out_csv);
    std::size_t failures = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].failed) continue;
        ++failures;
        std::cerr << "failed: " << rows[i].path << ": " << errors[i] << "\n";
    }
    if (failures) {
        std::cerr << failures << " of " << rows.size() << " images failed\n";
        return kExitPartial;
    }
    return kExitOk;
}

int cmd_attack(const AttackArgs& args)
{
    const attacks::AttackSpec base = attacks::AttackSpec::parse(args.attack, args.seed);
    require_file(args.manifest, "manifest");
    const int jobs = clamp_jobs(args.jobs);
    const DatasetManifest manifest = read_manifest(args.manifest);
    ensure_dir(args.out_dir);

    // Output names: input stem, disambiguated by row index on collision.
    std::vector<std::string> names(manifest.entries.size());
    std::set<std::string> used;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::string name = manifest.entries[i].path.stem().string() + ".png";
        if (!used.insert(name).second) {
            name = manifest.entries[i].path.stem().string() + "_" + std::to_string(i) + ".png";
            used.insert(name);
        }
        names[i] = name;
    }

    const auto n = static_cast<std::ptrdiff_t>(manifest.entries.size());
    std::vector<std::string> errors(manifest.entries.size());
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        try {
            attacks::AttackSpec spec = base;
            spec.seed = derive_seed(args.seed, idx);
            const RgbImage image = load_image(manifest.resolve(manifest.entries[idx]));
            save_png(attacks::apply_attack(image, spec), args.out_dir / names[idx]);
        } catch (const std::exception& e) {
            errors[idx] = e.what();
            if (errors[idx].empty()) errors[idx] = "unknown error";
        }
    }

    DatasetManifest derived;
    std::size_t failures = 0;
    for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
        if (!errors[i].empty()) {
            ++failures;
            std::cerr << "failed: " << manifest.entries[i].path.string() << ": " << errors[i] << "\n";
            continue;
        }
        const auto& e = manifest.entries[i];
        derived.entries.push_back({names[i], e.label, e.source, base.token()});
    }
    write_manifest(derived, args.out_dir / "manifest.csv");
    log::info("wrote " + (args.out_dir / "manifest.csv").string());
    return failures ? kExitPartial : kExitOk;
}

int cmd_train(const TrainArgs& args)
{
    const auto spec = classify::ClassifierSpec::parse(args.classifier);
    require_writable_parent(args.out_model);
    const auto rows = load_feature_rows(args.features);
    report_failed_rows(rows);
    const auto model = classify::train(spec, to_records(rows), args.seed);
    classify::save_model(model, args.out_model);
    return kExitOk;
}

int cmd_eval(const EvalArgs& args)
{
    if (args.mode != "split70" && args.mode != "cv5") throw UsageError("--mode must be split70 or cv5");
    if (args.pairing != "pooled" && args.pairing != "pairwise") throw UsageError("--pairing must be pooled or pairwise");
    std::vector<classify::ClassifierSpec> bank;
    for (const auto& c : args.classifiers) bank.push_back(classify::ClassifierSpec::parse(c));
    if (bank.empty()) bank = classify::default_bank();

    const auto rows = load_feature_rows(args.features);
    report_failed_rows(rows);

    // Columns of the grid: one record set per alpha.
    std::map<int, std::vector<classify::FeatureRecord>> by_alpha;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.failed) continue;
        if (r.features.size() != trace_length(r.alpha)) {
            throw ValidationError("feature dimension " + std::to_string(r.features.size()) + " does not match alpha " +
                                  std::to_string(r.alpha) + " for " + r.path);
        }
        by_alpha[r.alpha].push_back({r.features, r.label, r.source, i});
    }
    if (by_alpha.empty()) throw ValidationError("no usable feature rows");
    ensure_dir(args.out_dir);

    // Comparisons: pooled real vs every fake source, or one per fake source.
    std::vector<std::string> fake_sources;
    for (const auto& [alpha, recs] : by_alpha) {
        for (const auto& r : recs) {
            if (r.label != kLabelReal &&
                std::find(fake_sources.begin(), fake_sources.end(), r.source) == fake_sources.end()) {
                fake_sources.push_back(r.source);
            }
        }
    }
    std::vector<std::pair<std::string, std::optional<std::string>>> comparisons;
    if (args.pairing == "pooled") comparisons.push_back({"real_vs_all", std::nullopt});
    else
        for (const auto& s : fake_sources) comparisons.push_back({"real_vs_" + s, s});

    for (const auto& [name, source] : comparisons) {
        std::vector<GridEntry> grid;
        for (const auto& spec : bank) {
            for (const auto& [alpha, recs] : by_alpha) {
                std::vector<classify::FeatureRecord> subset;
                for (const auto& r : recs) {
                    if (r.label == kLabelReal || !source || r.source == *source) subset.push_back(r);
                }
                const auto report = args.mode == "cv5" ? classify::kfold_cv(spec, subset, 5, args.seed)
                                                       : classify::split_eval(spec, subset, 0.7, args.seed);
                grid.push_back({name, spec.name(), alpha, args.mode, report});
            }
        }
        write_text(args.out_dir / ("report_" + name + ".csv"), format_report_csv(grid));
        write_text(args.out_dir / ("report_" + name + ".txt"), format_report_table(grid));
        std::cout << format_report_table(grid);
    }
    return kExitOk;
}

int cmd_report(const ReportArgs& args)
{
    if (args.inputs.empty()) throw UsageError("at least one report CSV is required");
    std::vector<GridEntry> all;
    for (const auto& p : args.inputs) {
        require_file(p, "report");
        auto part = parse_report_csv(read_text(p));
        all.insert(all.end(), part.begin(), part.end());
    }
    const std::string table = format_report_table(all);
    if (args.out) write_text(*args.out, table);
    else std::cout << table;
    return kExitOk;
}

int cmd_predict(const PredictArgs& args)
{
    require_file(args.model, "model");
    require_writable_parent(args.out_csv);
    const auto model = classify::load_model(args.model);
    const auto rows = load_feature_rows(args.features);
    std::string out = "path,label,predicted\n";
    for (const auto& r : rows) {
        out += r.path + "," + std::to_string(r.label) + ",";
        out += r.failed ? std::string("failed") : std::to_string(classify::predict(model, r.features));
        out += "\n";
    }
    write_text(args.out_csv, out);
    return kExitOk;
}

}  // namespace convtrace::cli
