#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace convtrace {

inline constexpr int kLabelReal = 0;
inline constexpr int kLabelFake = 1;

struct ManifestEntry {
    std::filesystem::path path;
    int label = kLabelReal;
    std::string source;
    /// Present only in manifests written by the attack command.
    std::optional<std::string> attack;

    bool operator==(const ManifestEntry&) const = default;
};

/// Ordered list of labelled images. Paths are stored as written in the file;
/// `base_dir` resolves relative ones.
struct DatasetManifest {
    std::vector<ManifestEntry> entries;
    std::filesystem::path base_dir;

    std::filesystem::path resolve(const ManifestEntry& entry) const;
    bool has_attack_column() const;
};

/// Labels accepted by read_manifest unless a caller supplies its own set.
const std::set<int>& default_label_set();

/// Reads a `path,label,source[,attack]` CSV with a header row. Fields are
/// split from the right; any surplus commas stay in the path.
///
/// Throws ParseError (bad header, bad or undeclared label) and
/// ValidationError (duplicate path).
DatasetManifest read_manifest(const std::filesystem::path& path,
                              const std::set<int>& labels = default_label_set());
DatasetManifest parse_manifest(const std::string& text, const std::set<int>& labels = default_label_set());

std::string format_manifest(const DatasetManifest& manifest);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace convtrace
