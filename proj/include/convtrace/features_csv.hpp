#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "convtrace/classify.hpp"
#include "convtrace/trace.hpp"

namespace convtrace {

/// One row of a feature file. `failed` rows carry no features and the
/// literal `failed` in the degenerate_channels column.
struct FeatureRow {
    std::string path;
    int label = 0;
    std::string source;
    int alpha = 1;
    std::string degenerate_channels = "none";
    std::vector<double> features;
    bool failed = false;
};

FeatureRow make_feature_row(const std::string& path, int label, const std::string& source,
                            const ConvolutionalTrace& trace);

/// `path,label,source,alpha,degenerate_channels,f_0,...,f_{D-1}`, floats
/// printed with 17 significant digits.
std::string feature_csv_header(int alpha);
std::string format_feature_row(const FeatureRow& row);

void write_feature_csv(const std::vector<FeatureRow>& rows, int alpha, const std::filesystem::path& path);
std::vector<FeatureRow> parse_feature_csv(const std::string& text);
std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path);

/// Successful rows as classifier records; `id` is the row position.
/// ValidationError when rows disagree on alpha or feature length.
std::vector<classify::FeatureRecord> to_records(const std::vector<FeatureRow>& rows);

}  // namespace convtrace
