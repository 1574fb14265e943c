#pragma once

#include <string>
#include <vector>

#include "convtrace/classify.hpp"

namespace convtrace {

/// One cell of the classifier x kernel-size accuracy grid.
struct GridEntry {
    std::string comparison;  // e.g. "real_vs_all", "real_vs_transpose_conv"
    std::string classifier;  // ClassifierSpec::name()
    int alpha = 1;
    std::string mode;  // "split70" or "cv5"
    classify::EvalReport report;
};

/// Columns: comparison,classifier,kernel,mode,accuracy,mean_accuracy,
/// fold_accuracies,classes,confusion. Lists are ';'-separated and confusion
/// rows are '|'-separated.
std::string format_report_csv(const std::vector<GridEntry>& entries);
std::vector<GridEntry> parse_report_csv(const std::string& text);

/// Plain-text table per comparison: one row per classifier, one column per
/// kernel size, cells are mean accuracy in percent.
std::string format_report_table(const std::vector<GridEntry>& entries);

}  // namespace convtrace
