#include "convtrace/evaluation.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "convtrace/error.hpp"
#include "text_util.hpp"

namespace convtrace {
namespace {

constexpr const char* kReportHeader =
    "comparison,classifier,kernel,mode,accuracy,mean_accuracy,fold_accuracies,classes,confusion";

std::string kernel_label(int alpha)
{
    const int n = 2 * alpha + 1;
    return std::to_string(n) + "x" + std::to_string(n);
}

int alpha_from_label(const std::string& label)
{
    const auto x = label.find('x');
    const auto n = detail::parse_int(label.substr(0, x));
    if (x == std::string::npos || !n || *n < 3 || *n % 2 == 0) throw ParseError("bad kernel label '" + label + "'");
    return static_cast<int>((*n - 1) / 2);
}

template <typename T, typename F>
std::string join(const std::vector<T>& items, char sep, F&& fmt)
{
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += fmt(items[i]);
    }
    return out;
}

std::string percent(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
    return buf;
}

}  // namespace

std::string format_report_csv(const std::vector<GridEntry>& entries)
{
    std::string out = std::string(kReportHeader) + "\n";
    for (const auto& e : entries) {
        const auto& r = e.report;
        out += e.comparison + "," + e.classifier + "," + kernel_label(e.alpha) + "," + e.mode + "," +
               detail::format_double(r.accuracy) + "," + detail::format_double(r.mean_accuracy) + "," +
               join(r.fold_accuracies, ';', [](double v) { return detail::format_double(v); }) + "," +
               join(r.classes, ';', [](int c) { return std::to_string(c); }) + "," +
               join(r.confusion, '|', [](const std::vector<std::size_t>& row) {
                   return join(row, ';', [](std::size_t v) { return std::to_string(v); });
               }) +
               "\n";
    }
    return out;
}

std::vector<GridEntry> parse_report_csv(const std::string& text)
{
    const auto lines = detail::split_lines(text);
    if (lines.empty() || lines.front() != kReportHeader) throw ParseError("not an evaluation report CSV");
    std::vector<GridEntry> entries;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        const auto f = detail::split(lines[i], ',');
        if (f.size() != 9) throw ParseError("report line " + std::to_string(i + 1) + ": expected 9 fields");
        GridEntry e;
        e.comparison = f[0];
        e.classifier = f[1];
        e.alpha = alpha_from_label(f[2]);
        e.mode = f[3];
        auto num = [&](const std::string& s) {
            const auto v = detail::parse_double(s);
            if (!v) throw ParseError("report line " + std::to_string(i + 1) + ": bad number '" + s + "'");
            return *v;
        };
        e.report.accuracy = num(f[4]);
        e.report.mean_accuracy = num(f[5]);
        if (!f[6].empty()) {
            for (const auto& s : detail::split(f[6], ';')) e.report.fold_accuracies.push_back(num(s));
        }
        for (const auto& s : detail::split(f[7], ';')) e.report.classes.push_back(static_cast<int>(num(s)));
        for (const auto& row : detail::split(f[8], '|')) {
            std::vector<std::size_t> r;
            for (const auto& s : detail::split(row, ';')) r.push_back(static_cast<std::size_t>(num(s)));
            e.report.confusion.push_back(std::move(r));
        }
        entries.push_back(std::move(e));
    }
    return entries;
}

std::string format_report_table(const std::vector<GridEntry>& entries)
{
    // Preserve first-seen order of comparisons and classifiers.
    std::vector<std::string> comparisons;
    for (const auto& e : entries) {
        if (std::find(comparisons.begin(), comparisons.end(), e.comparison) == comparisons.end()) {
            comparisons.push_back(e.comparison);
        }
    }

    std::string out;
    for (const auto& comp : comparisons) {
        std::vector<std::string> classifiers;
        std::set<int> alphas;
        std::map<std::pair<std::string, int>, const GridEntry*> cells;
        std::string mode;
        for (const auto& e : entries) {
            if (e.comparison != comp) continue;
            if (std::find(classifiers.begin(), classifiers.end(), e.classifier) == classifiers.end()) {
                classifiers.push_back(e.classifier);
            }
            alphas.insert(e.alpha);
            cells[{e.classifier, e.alpha}] = &e;
            mode = e.mode;
        }
        char line[256];
        out += comp + " (" + mode + ", accuracy %)\n";
        std::snprintf(line, sizeof line, "%-14s", "classifier");
        out += line;
        for (int a : alphas) {
            std::snprintf(line, sizeof line, " %9s", kernel_label(a).c_str());
            out += line;
        }
        out += "\n";
        for (const auto& c : classifiers) {
            std::snprintf(line, sizeof line, "%-14s", c.c_str());
            out += line;
            for (int a : alphas) {
                const auto it = cells.find({c, a});
                const std::string v = it == cells.end() ? "-" : percent(it->second->report.mean_accuracy);
                std::snprintf(line, sizeof line, " %9s", v.c_str());
                out += line;
            }
            out += "\n";
        }
        out += "\n";
    }
    return out;
}

}  // namespace convtrace
