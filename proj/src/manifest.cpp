#include "convtrace/manifest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "convtrace/error.hpp"
#include "text_util.hpp"

namespace convtrace {

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& entry) const
{
    if (entry.path.is_absolute() || base_dir.empty()) return entry.path;
    return base_dir / entry.path;
}

bool DatasetManifest::has_attack_column() const
{
    for (const auto& e : entries) {
        if (e.attack) return true;
    }
    return false;
}

const std::set<int>& default_label_set()
{
    static const std::set<int> labels{kLabelReal, kLabelFake};
    return labels;
}

DatasetManifest parse_manifest(const std::string& text, const std::set<int>& labels)
{
    const auto lines = detail::split_lines(text);
    if (lines.empty()) throw ParseError("manifest is missing its header row");

    const auto header = detail::split(lines.front(), ',');
    std::vector<std::string> columns;
    for (const auto& h : header) columns.emplace_back(detail::trim(h));
    const bool with_attack = columns == std::vector<std::string>{"path", "label", "source", "attack"};
    if (!with_attack && columns != std::vector<std::string>{"path", "label", "source"}) {
        throw ParseError("manifest header must be 'path,label,source' (optionally ',attack')");
    }
    const std::size_t tail = with_attack ? 3 : 2;

    DatasetManifest manifest;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (detail::trim(lines[i]).empty()) continue;
        auto fields = detail::split(lines[i], ',');
        if (fields.size() < tail + 1) {
            throw ParseError("manifest line " + std::to_string(i + 1) + ": expected " +
                             std::to_string(tail + 1) + " fields");
        }
        // Everything left of the fixed trailing columns is the path.
        std::string path = fields[0];
        for (std::size_t f = 1; f + tail < fields.size(); ++f) path += "," + fields[f];
        const std::size_t base = fields.size() - tail;

        const auto label = detail::parse_int(fields[base]);
        if (!label || !labels.contains(static_cast<int>(*label))) {
            throw ParseError("manifest line " + std::to_string(i + 1) + ": unknown label '" +
                             fields[base] + "'");
        }
        path = std::string(detail::trim(path));
        if (path.empty()) throw ParseError("manifest line " + std::to_string(i + 1) + ": empty path");
        if (!seen.insert(path).second) throw ValidationError("duplicate manifest path: " + path);

        ManifestEntry entry;
        entry.path = path;
        entry.label = static_cast<int>(*label);
        entry.source = std::string(detail::trim(fields[base + 1]));
        if (with_attack) entry.attack = std::string(detail::trim(fields[base + 2]));
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

DatasetManifest read_manifest(const std::filesystem::path& path, const std::set<int>& labels)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    DatasetManifest manifest = parse_manifest(buf.str(), labels);
    manifest.base_dir = path.parent_path();
    return manifest;
}

std::string format_manifest(const DatasetManifest& manifest)
{
    const bool with_attack = manifest.has_attack_column();
    std::string out = with_attack ? "path,label,source,attack\n" : "path,label,source\n";
    for (const auto& e : manifest.entries) {
        out += e.path.generic_string() + "," + std::to_string(e.label) + "," + e.source;
        if (with_attack) out += "," + e.attack.value_or("");
        out += "\n";
    }
    return out;
}

void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << format_manifest(manifest);
    if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace convtrace
