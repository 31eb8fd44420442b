#include "wearclass/dataset.hpp"

#include "wearclass/image.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

namespace wearclass {

namespace fs = std::filesystem;

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(std::move(cur));
    return out;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char ch : text) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

void write_file_atomic(const fs::path& path, std::string_view content) {
    const fs::path dir = path.has_parent_path() ? path.parent_path() : fs::path(".");
    const fs::path tmp = dir / ("." + path.filename().string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw DataError("write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("cannot replace " + path.string());
    }
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

namespace {

// Lines without trailing CR; blank lines and '#' comments are reported as empty.
std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        out.push_back(std::move(line));
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

[[noreturn]] void fail(std::string_view source, int line, const std::string& what) {
    throw DataError(std::string(source) + ": line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& s, std::string_view source, int line) {
    if (s.empty()) fail(source, line, "empty numeric field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) fail(source, line, "not a number: '" + s + "'");
    // Underflow to a subnormal also sets ERANGE; only overflow is an error.
    if (errno == ERANGE && std::isinf(v)) fail(source, line, "number out of range: '" + s + "'");
    return v;
}

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

fs::path Manifest::resolve(const fs::path& p) const {
    return p.is_absolute() ? p : base_dir / p;
}

bool Manifest::fully_labeled() const {
    for (const auto& r : records)
        if (r.label.empty()) return false;
    return true;
}

Manifest parse_manifest(std::string_view text, const fs::path& base_dir, std::string_view source, bool check_files) {
    Manifest m;
    m.base_dir = base_dir;
    const auto lines = lines_of(text);
    std::vector<std::string> header;
    std::set<std::string> ids;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int ln = static_cast<int>(i) + 1;
        const auto& line = lines[i];
        if (line.empty() || line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (header.empty()) {
            header = fields;
            if (line != kManifestHeader)
                fail(source, ln, "expected header '" + std::string(kManifestHeader) + "'");
            continue;
        }
        if (fields.size() != 6) fail(source, ln, "expected 6 fields, found " + std::to_string(fields.size()));
        ManifestRecord r;
        r.line = ln;
        r.id = fields[0];
        if (r.id.empty()) fail(source, ln, "empty id");
        if (!ids.insert(r.id).second) fail(source, ln, "duplicate id '" + r.id + "'");
        r.mask = fields[1];
        r.image = fields[2];
        if (r.mask.empty() == r.image.empty()) fail(source, ln, "exactly one of mask and image must be set");
        try {
            if (!fields[3].empty()) r.side = parse_side(fields[3]);
            if (!fields[4].empty()) r.completeness = parse_completeness(fields[4]);
        } catch (const std::exception& e) {
            fail(source, ln, e.what());
        }
        if (!r.image.empty() && !r.side) fail(source, ln, "image rows need a side (north, east, south or west)");
        r.label = fields[5];
        if (check_files) {
            const auto p = m.resolve(r.mask.empty() ? r.image : r.mask);
            if (!fs::is_regular_file(p)) fail(source, ln, "file not found: " + p.string());
        }
        m.records.push_back(std::move(r));
    }
    if (header.empty()) throw DataError(std::string(source) + ": empty manifest");
    return m;
}

Manifest read_manifest(const fs::path& path, bool check_files) {
    return parse_manifest(read_text_file(path), path.parent_path(), path.string(), check_files);
}

std::string manifest_csv(const std::vector<ManifestRecord>& records) {
    std::string out(kManifestHeader);
    out += '\n';
    for (const auto& r : records) {
        out += csv_field(r.id) + ',' + csv_field(r.mask.generic_string()) + ',' + csv_field(r.image.generic_string()) +
               ',' + (r.side ? std::string(side_name(*r.side)) : "") + ',' +
               (r.completeness ? std::string(completeness_name(*r.completeness)) : "") + ',' + csv_field(r.label) + '\n';
    }
    return out;
}

std::string descriptor_csv(const DescriptorTable& t) {
    std::string out;
    if (!t.config_hash.empty()) out += "# config_hash=" + t.config_hash + "\n";
    out += "id";
    for (const auto& n : t.names) out += ',' + csv_field(n);
    out += ",label\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        out += csv_field(t.ids[i]);
        for (double v : t.rows[i]) out += ',' + number(v);
        out += ',' + csv_field(i < t.labels.size() ? t.labels[i] : std::string()) + '\n';
    }
    return out;
}

DescriptorTable parse_descriptor_csv(std::string_view text, std::string_view source) {
    DescriptorTable t;
    bool have_header = false;
    std::set<std::string> ids;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int ln = static_cast<int>(i) + 1;
        const auto& line = lines[i];
        if (line.empty()) continue;
        if (line[0] == '#') {
            constexpr std::string_view key = "# config_hash=";
            if (line.rfind(key, 0) == 0) t.config_hash = line.substr(key.size());
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            if (fields.size() < 3 || fields.front() != "id" || fields.back() != "label")
                fail(source, ln, "expected header 'id,<feature names...>,label'");
            t.names.assign(fields.begin() + 1, fields.end() - 1);
            have_header = true;
            continue;
        }
        if (fields.size() != t.names.size() + 2)
            fail(source, ln, "expected " + std::to_string(t.names.size() + 2) + " fields, found " + std::to_string(fields.size()));
        if (!ids.insert(fields.front()).second) fail(source, ln, "duplicate id '" + fields.front() + "'");
        std::vector<double> row;
        row.reserve(t.names.size());
        for (std::size_t j = 1; j + 1 < fields.size(); ++j) row.push_back(parse_double(fields[j], source, ln));
        t.ids.push_back(fields.front());
        t.rows.push_back(std::move(row));
        t.labels.push_back(fields.back());
    }
    if (!have_header) throw DataError(std::string(source) + ": no header row");
    return t;
}

DescriptorTable read_descriptor_csv(const fs::path& path) {
    return parse_descriptor_csv(read_text_file(path), path.string());
}

std::string similarity_csv(const SimilarityMatrix& s) {
    std::string out = "id";
    for (const auto& id : s.ids) out += ',' + csv_field(id);
    out += '\n';
    for (std::size_t i = 0; i < s.size(); ++i) {
        out += csv_field(s.ids[i]);
        for (std::size_t j = 0; j < s.size(); ++j) out += ',' + number(s(i, j));
        out += '\n';
    }
    return out;
}

SimilarityMatrix parse_similarity_csv(std::string_view text, std::string_view source) {
    SimilarityMatrix s;
    bool have_header = false;
    std::size_t row = 0;
    const auto lines = lines_of(text);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const int ln = static_cast<int>(i) + 1;
        if (lines[i].empty() || lines[i][0] == '#') continue;
        auto fields = split_csv_line(lines[i]);
        if (!have_header) {
            if (fields.size() < 2 || fields.front() != "id") fail(source, ln, "expected header 'id,<ids...>'");
            s.ids.assign(fields.begin() + 1, fields.end());
            s.values.assign(s.ids.size() * s.ids.size(), 0.0);
            have_header = true;
            continue;
        }
        if (row >= s.ids.size()) fail(source, ln, "more rows than ids");
        if (fields.size() != s.ids.size() + 1) fail(source, ln, "row length differs from header");
        if (fields.front() != s.ids[row]) fail(source, ln, "row id '" + fields.front() + "' out of order");
        for (std::size_t j = 0; j < s.ids.size(); ++j) {
            const double v = parse_double(fields[j + 1], source, ln);
            if (v < 0.0) fail(source, ln, "negative similarity");
            s.values[row * s.ids.size() + j] = v;
        }
        ++row;
    }
    if (!have_header || row != s.ids.size()) throw DataError(std::string(source) + ": similarity matrix is not square");
    return s;
}

}  // namespace wearclass
