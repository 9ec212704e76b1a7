// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "isac/cir_tensor.hpp"
#include "isac/config.hpp"
#include "isac/harness.hpp"

namespace isac::io {

/// CIR file layout (all integers and floats little-endian):
///
///   offset  size        field
///   0       8           magic "ISACCIR1"
///   8       4           u32 version (1)
///   12      4           u32 dtype (1 = complex128)
///   16      4           u32 ndims (4)
///   20      4 * 8       u64 dims: rx, tx, path, time
///   52      8           u64 path count (equals dims[2])
///   60      8 * paths   f64 path delays [s]
///   ...     16 * size   interleaved f64 (re, im), row-major [rx][tx][path][time]
inline constexpr char kCirMagic[8] = {'I', 'S', 'A', 'C', 'C', 'I', 'R', '1'};
inline constexpr std::uint32_t kCirVersion = 1;
inline constexpr std::uint32_t kDtypeComplex128 = 1;

std::vector<char> encode_cir(const CirTensor& cir);
CirTensor decode_cir(const std::vector<char>& bytes);

void write_cir(const std::filesystem::path& path, const CirTensor& cir);
CirTensor read_cir(const std::filesystem::path& path);

/// Sidecar describing a CIR file: dims, index order, dtype, units.
nlohmann::json cir_sidecar(const CirTensor& cir, const std::string& data_file);

enum class ExportFormat { json_records, csv_tables };

struct Manifest {
    std::filesystem::path root;
    std::vector<std::string> files; // relative to root, in write order

    nlohmann::json to_json() const;
};

/// Per-drop record: config hash, sharing state, clusters, path records and SD values.
nlohmann::json drop_record(const DropResult& result, const ScenarioConfig& config);

/// Path geometry table: one row per communication ray and per sensing path.
/// Powers include path loss (and shadowing on the communication link).
std::string paths_csv(const DropResult& result);

/// Writes drops under `out_dir/drop_<id>/`. JSON records come with the CIR
/// binaries and sidecars; CSV tables hold the path geometry. A manifest.json
/// listing every file is written last.
Manifest export_results(const std::vector<DropResult>& results, const ScenarioConfig& config,
                        const std::filesystem::path& out_dir,
                        const std::vector<ExportFormat>& formats = {ExportFormat::json_records,
                                                                    ExportFormat::csv_tables});

/// Writes `sd_cdf_n<count>.csv` per sweep point, `sd_summary.csv` and a manifest.
Manifest export_campaign(const CampaignResult& campaign, const ScenarioConfig& config,
                         const std::filesystem::path& out_dir);

/// Shortest round-trip decimal form of `x`.
std::string format_double(double x);

} // namespace isac::io
