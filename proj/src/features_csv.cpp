#include "convtrace/features_csv.hpp"

#include <fstream>
#include <sstream>

#include "convtrace/error.hpp"
#include "text_util.hpp"

namespace convtrace {

FeatureRow make_feature_row(const std::string& path, int label, const std::string& source,
                            const ConvolutionalTrace& trace)
{
    return {path, label, source, trace.alpha, trace.degenerate_label(), trace.features, false};
}

std::string feature_csv_header(int alpha)
{
    std::string h = "path,label,source,alpha,degenerate_channels";
    for (std::size_t i = 0; i < trace_length(alpha); ++i) h += ",f_" + std::to_string(i);
    return h;
}

std::string format_feature_row(const FeatureRow& row)
{
    std::string line = row.path + "," + std::to_string(row.label) + "," + row.source + "," +
                       std::to_string(row.alpha) + "," + (row.failed ? std::string("failed") : row.degenerate_channels);
    if (row.failed) {
        for (std::size_t i = 0; i < trace_length(row.alpha); ++i) line += ",nan";
    } else {
        for (double f : row.features) line += "," + detail::format_double(f);
    }
    return line;
}

void write_feature_csv(const std::vector<FeatureRow>& rows, int alpha, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << feature_csv_header(alpha) << "\n";
    for (const auto& r : rows) out << format_feature_row(r) << "\n";
    if (!out) throw IoError("write failed for " + path.string());
}

std::vector<FeatureRow> parse_feature_csv(const std::string& text)
{
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw ParseError("feature CSV is missing its header");
    const auto header = detail::split(lines.front(), ',');
    if (header.size() < 5 || header[0] != "path" || header[3] != "alpha" || header[4] != "degenerate_channels") {
        throw ParseError("feature CSV header must start with path,label,source,alpha,degenerate_channels");
    }
    const std::size_t dim = header.size() - 5;

    std::vector<FeatureRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        const auto fields = detail::split(lines[i], ',');
        if (fields.size() < header.size()) {
            throw ParseError("feature CSV line " + std::to_string(i + 1) + " has too few fields");
        }
        // Surplus fields belong to a path containing commas.
        const std::size_t extra = fields.size() - header.size();
        FeatureRow row;
        row.path = fields[0];
        for (std::size_t f = 1; f <= extra; ++f) row.path += "," + fields[f];
        const auto label = detail::parse_int(fields[1 + extra]);
        const auto alpha = detail::parse_int(fields[3 + extra]);
        if (!label || !alpha) throw ParseError("feature CSV line " + std::to_string(i + 1) + ": bad label or alpha");
        row.label = static_cast<int>(*label);
        row.source = fields[2 + extra];
        row.alpha = static_cast<int>(*alpha);
        row.degenerate_channels = fields[4 + extra];
        row.failed = row.degenerate_channels == "failed";
        if (!row.failed) {
            row.features.reserve(dim);
            for (std::size_t f = 5 + extra; f < fields.size(); ++f) {
                const auto v = detail::parse_double(fields[f]);
                if (!v) throw ParseError("feature CSV line " + std::to_string(i + 1) + ": bad number '" + fields[f] + "'");
                row.features.push_back(*v);
            }
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<FeatureRow> read_feature_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_feature_csv(buf.str());
}

std::vector<classify::FeatureRecord> to_records(const std::vector<FeatureRow>& rows)
{
    std::vector<classify::FeatureRecord> out;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.failed) continue;
        if (!out.empty() && (r.features.size() != out.front().features.size() || r.alpha != rows[0].alpha)) {
            throw ValidationError("feature rows disagree on alpha or dimension");
        }
        out.push_back({r.features, r.label, r.source, i});
    }
    return out;
}

}  // namespace convtrace
