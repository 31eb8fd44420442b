/**
 * @file dataset.hpp
 * @brief Manifest and descriptor tables (CSV), similarity CSV, atomic file writes.
 */
#pragma once

#include "wearclass/classify.hpp"
#include "wearclass/fusion.hpp"
#include "wearclass/preprocess.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace wearclass {

/// One CSV record, quotes honoured ("" inside quotes is a literal quote).
std::vector<std::string> split_csv_line(std::string_view line);
/// Quotes the field when it holds a comma, quote or newline.
std::string csv_field(std::string_view text);

/// Writes to a sibling temporary file, then renames over @p path. Throws DataError on IO failure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_text_file(const std::filesystem::path& path);

/**
 * Manifest row. Exactly one of `mask` (an already segmented wear region) or `image` (an
 * insert photograph to preprocess) is set; image rows name the cutting edge in `side`.
 * Relative paths are resolved against the manifest's directory.
 */
struct ManifestRecord {
    std::string id;
    std::filesystem::path mask;
    std::filesystem::path image;
    std::optional<EdgeSide> side;
    std::optional<Completeness> completeness;
    std::string label;  ///< empty when unlabeled
    int line = 0;       ///< 1-based line in the manifest file
};

struct Manifest {
    std::filesystem::path base_dir;
    std::vector<ManifestRecord> records;

    std::filesystem::path resolve(const std::filesystem::path& p) const;
    bool fully_labeled() const;
};

inline constexpr std::string_view kManifestHeader = "id,mask,image,side,completeness,label";

/// Throws DataError "<file>: line N: ..." on malformed rows, duplicate ids or missing files
/// (file existence is checked only when @p check_files).
Manifest parse_manifest(std::string_view text, const std::filesystem::path& base_dir, std::string_view source,
                        bool check_files = true);
Manifest read_manifest(const std::filesystem::path& path, bool check_files = true);
std::string manifest_csv(const std::vector<ManifestRecord>& records);

/// Descriptor rows with canonical column names. Labels may be empty.
struct DescriptorTable {
    std::vector<std::string> names;
    std::vector<std::string> ids;
    FeatureMatrix rows;
    std::vector<std::string> labels;
    std::string config_hash;  ///< from the "# config_hash=" line, if present
};

/// "# config_hash=<hash>" (when set), then "id,<names...>,label", values printed with %.17g.
std::string descriptor_csv(const DescriptorTable& table);
DescriptorTable parse_descriptor_csv(std::string_view text, std::string_view source);
DescriptorTable read_descriptor_csv(const std::filesystem::path& path);

/// Header "id,<ids...>", then one row per item starting with its id.
std::string similarity_csv(const SimilarityMatrix& s);
SimilarityMatrix parse_similarity_csv(std::string_view text, std::string_view source);

}  // namespace wearclass
