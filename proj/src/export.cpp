// SPDX-License-Identifier: Apache-2.0
#include "isac/export.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "isac/errors.hpp"
#include "isac/stats.hpp"

namespace isac::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class U> void put_le(std::vector<char>& out, U value) {
    for (std::size_t i = 0; i < sizeof(U); ++i)
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
}

void put_f64(std::vector<char>& out, double v) { put_le(out, std::bit_cast<std::uint64_t>(v)); }

class Reader {
public:
    explicit Reader(const std::vector<char>& bytes) : bytes_(bytes) {}

    template <class U> U get() {
        need(sizeof(U));
        U value = 0;
        for (std::size_t i = 0; i < sizeof(U); ++i)
            value |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
        pos_ += sizeof(U);
        return value;
    }
    double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    void expect_magic() {
        need(sizeof(kCirMagic));
        if (std::memcmp(bytes_.data(), kCirMagic, sizeof(kCirMagic)) != 0)
            throw IoError("not a CIR file (bad magic)");
        pos_ += sizeof(kCirMagic);
    }
    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) const {
        if (pos_ + n > bytes_.size())
            throw IoError("truncated CIR data");
    }
    const std::vector<char>& bytes_;
    std::size_t pos_{0};
};

void write_bytes(const fs::path& path, const char* data, std::size_t size) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out.write(data, static_cast<std::streamsize>(size));
    if (!out)
        throw IoError("write failed: " + path.string());
}

void write_text(const fs::path& path, const std::string& text) { write_bytes(path, text.data(), text.size()); }

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

double deg(double rad) { return rad2deg(rad); }

json angles_json(const SphericalAngles& a) {
    return {{"azimuth_deg", deg(a.azimuth)}, {"zenith_deg", deg(a.zenith)}};
}

std::string hex64(std::uint64_t v) {
    std::ostringstream s;
    s << std::hex;
    s.width(16);
    s.fill('0');
    s << v;
    return s.str();
}

const char* to_string(LinkKind k) { return k == LinkKind::communication ? "communication" : "sensing"; }

const char* to_string(Component c) {
    switch (c) {
    case Component::total: return "total";
    case Component::shared: return "shared";
    case Component::non_shared: return "non_shared";
    }
    return "?";
}

} // namespace

std::string format_double(double x) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, end);
}

std::vector<char> encode_cir(const CirTensor& cir) {
    std::vector<char> out;
    out.reserve(60 + 8 * cir.path_count() + 16 * cir.size());
    for (char c : kCirMagic)
        out.push_back(c);
    put_le<std::uint32_t>(out, kCirVersion);
    put_le<std::uint32_t>(out, kDtypeComplex128);
    put_le<std::uint32_t>(out, 4);
    for (std::size_t d : cir.dims())
        put_le<std::uint64_t>(out, d);
    put_le<std::uint64_t>(out, cir.path_delays().size());
    for (double t : cir.path_delays())
        put_f64(out, t);
    for (Eigen::Index i = 0; i < cir.data().size(); ++i) {
        put_f64(out, cir.data()(i).real());
        put_f64(out, cir.data()(i).imag());
    }
    return out;
}

CirTensor decode_cir(const std::vector<char>& bytes) {
    Reader r(bytes);
    r.expect_magic();
    if (r.get<std::uint32_t>() != kCirVersion)
        throw IoError("unsupported CIR version");
    if (r.get<std::uint32_t>() != kDtypeComplex128)
        throw IoError("unsupported CIR dtype");
    if (r.get<std::uint32_t>() != 4)
        throw IoError("CIR must have 4 dimensions");
    std::array<std::size_t, 4> dims{};
    for (auto& d : dims)
        d = static_cast<std::size_t>(r.get<std::uint64_t>());
    const auto n_paths = r.get<std::uint64_t>();
    if (n_paths != dims[2])
        throw IoError("CIR path count disagrees with dims");
    CirTensor cir(dims[0], dims[1], dims[2], dims[3]);
    for (auto& t : cir.path_delays())
        t = r.get_f64();
    for (Eigen::Index i = 0; i < cir.data().size(); ++i) {
        const double re = r.get_f64();
        const double im = r.get_f64();
        cir.data()(i) = {re, im};
    }
    if (!r.done())
        throw IoError("trailing bytes after CIR data");
    return cir;
}

void write_cir(const fs::path& path, const CirTensor& cir) {
    const auto bytes = encode_cir(cir);
    write_bytes(path, bytes.data(), bytes.size());
}

CirTensor read_cir(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + path.string());
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return decode_cir(bytes);
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

json cir_sidecar(const CirTensor& cir, const std::string& data_file) {
    const auto& d = cir.dims();
    return {
        {"data_file", data_file},
        {"format", std::string(kCirMagic, sizeof(kCirMagic))},
        {"version", kCirVersion},
        {"dtype", "complex128"},
        {"byte_order", "little"},
        {"index_order", {"rx", "tx", "path", "time"}},
        {"dims", {d[0], d[1], d[2], d[3]}},
        {"data_offset_bytes", 60 + 8 * d[2]},
        {"units", {{"coefficient", "linear amplitude"}, {"path_delay", "s"}}},
        {"kind", to_string(cir.kind)},
        {"component", to_string(cir.component)},
        {"drop_id", cir.drop_id},
    };
}

json Manifest::to_json() const { return {{"files", files}}; }

json drop_record(const DropResult& r, const ScenarioConfig& config) {
    json pairs = json::array();
    for (const auto& p : r.sharing.pairs)
        pairs.push_back({{"target_index", p.target_index},
                         {"target_id", config.targets.at(p.target_index).id},
                         {"cluster_index", p.cluster_index},
                         {"score", p.score}});

    json clusters = json::array();
    for (std::size_t n = 0; n < r.comm_clusters.clusters.size(); ++n) {
        const Cluster& c = r.comm_clusters.clusters[n];
        clusters.push_back({{"index", c.index},
                            {"power", c.power},
                            {"delay_s", c.delay},
                            {"aod_deg", deg(c.aod)},
                            {"zod_deg", deg(c.zod)},
                            {"aoa_deg", deg(c.aoa)},
                            {"zoa_deg", deg(c.zoa)},
                            {"rays", c.rays.size()},
                            {"shared", static_cast<bool>(r.comm_shared_flags.at(n))}});
    }

    json targets = json::array();
    for (const auto& t : r.targets)
        targets.push_back({{"id", t.id},
                           {"shared", t.shared},
                           {"los_departure", angles_json(t.los.departure)},
                           {"los_arrival", angles_json(t.los.arrival)},
                           {"los_delay_s", t.los.delay},
                           {"tx_leg_clusters", t.tx_leg_clusters},
                           {"rx_leg_clusters", t.rx_leg_clusters},
                           {"paths", t.paths.size()}});

    const auto& lsp = r.comm_lsp;
    return {
        {"drop_id", r.drop_id},
        {"config_hash", hex64(config_hash(config))},
        {"root_seed", config.root_seed},
        {"sharing",
         {{"s", r.sharing.vector.s},
          {"pairs", pairs},
          {"target_ratio", r.sharing.target_ratio},
          {"requested_count", r.sharing.requested_count}}},
        {"sd_c", r.sd_c},
        {"sd_s", r.sd_s},
        {"communication",
         {{"condition", to_string(lsp.los ? LinkCondition::los : LinkCondition::nlos)},
          {"pathloss_db", r.comm_pathloss_db},
          {"lsp",
           {{"ds_s", lsp.ds},
            {"asa_deg", deg(lsp.asa)},
            {"asd_deg", deg(lsp.asd)},
            {"zsa_deg", deg(lsp.zsa)},
            {"zsd_deg", deg(lsp.zsd)},
            {"sf_db", lsp.sf_db},
            {"k_db", lsp.k_db}}},
          {"clusters_before_feedback", r.comm_clusters_stochastic.clusters.size()},
          {"clusters", clusters}}},
        {"sensing", {{"targets", targets}, {"paths", r.sensing_total.path_count()}}},
    };
}

std::string paths_csv(const DropResult& r) {
    std::ostringstream out;
    out << "channel,component,group,ray,aod_deg,zod_deg,aoa_deg,zoa_deg,delay_s,power\n";
    auto row = [&](const char* channel, bool shared, long long group, std::size_t ray, const SphericalAngles& dep,
                   const SphericalAngles& arr, double delay, double power) {
        out << channel << ',' << (shared ? "shared" : "non_shared") << ',' << group << ',' << ray << ','
            << format_double(deg(dep.azimuth)) << ',' << format_double(deg(dep.zenith)) << ','
            << format_double(deg(arr.azimuth)) << ',' << format_double(deg(arr.zenith)) << ','
            << format_double(delay) << ',' << format_double(power) << '\n';
    };
    const double comm_gain = std::pow(10.0, -(r.comm_pathloss_db + r.comm_lsp.sf_db) / 10.0);
    for (std::size_t n = 0; n < r.comm_clusters.clusters.size(); ++n) {
        const Cluster& c = r.comm_clusters.clusters[n];
        for (std::size_t m = 0; m < c.rays.size(); ++m) {
            const Ray& ray = c.rays[m];
            row("communication", r.comm_shared_flags.at(n), static_cast<long long>(n), m, ray.departure(),
                ray.arrival(), ray.delay, comm_gain * ray.amplitude * ray.amplitude);
        }
    }
    for (const auto& t : r.targets)
        for (std::size_t k = 0; k < t.paths.size(); ++k) {
            const CascadePath& p = t.paths[k];
            row("sensing", t.shared, t.id, k, p.departure, p.arrival, p.delay, p.amplitude * p.amplitude);
        }
    return out.str();
}

Manifest export_results(const std::vector<DropResult>& results, const ScenarioConfig& config,
                        const fs::path& out_dir, const std::vector<ExportFormat>& formats) {
    auto wants = [&](ExportFormat f) { return std::find(formats.begin(), formats.end(), f) != formats.end(); };
    Manifest manifest{out_dir, {}};
    make_dir(out_dir);

    write_text(out_dir / "config.json", serialize_config(config).dump(2) + "\n");
    manifest.files.push_back("config.json");

    for (const auto& r : results) {
        const std::string dir = "drop_" + std::to_string(r.drop_id);
        make_dir(out_dir / dir);
        if (wants(ExportFormat::json_records)) {
            json record = drop_record(r, config);
            json cir_files = json::object();
            const std::pair<const char*, const CirTensor*> tensors[] = {
                {"comm_total", &r.comm.total},         {"comm_shared", &r.comm.shared},
                {"comm_non_shared", &r.comm.non_shared}, {"sensing_total", &r.sensing_total},
                {"sensing_shared", &r.sensing_shared},   {"sensing_non_shared", &r.sensing_non_shared},
            };
            for (const auto& [name, cir] : tensors) {
                const std::string bin = dir + "/" + name + ".cir";
                write_cir(out_dir / bin, *cir);
                write_text(out_dir / (bin + ".json"), cir_sidecar(*cir, std::string(name) + ".cir").dump(2) + "\n");
                manifest.files.push_back(bin);
                manifest.files.push_back(bin + ".json");
                cir_files[name] = std::string(name) + ".cir";
            }
            record["cir_files"] = cir_files;
            write_text(out_dir / dir / "record.json", record.dump(2) + "\n");
            manifest.files.push_back(dir + "/record.json");
        }
        if (wants(ExportFormat::csv_tables)) {
            write_text(out_dir / dir / "paths.csv", paths_csv(r));
            manifest.files.push_back(dir + "/paths.csv");
        }
    }

    json m = manifest.to_json();
    m["config_hash"] = hex64(config_hash(config));
    m["drops"] = results.size();
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
    manifest.files.push_back("manifest.json");
    return manifest;
}

Manifest export_campaign(const CampaignResult& campaign, const ScenarioConfig& config, const fs::path& out_dir) {
    Manifest manifest{out_dir, {}};
    make_dir(out_dir);
    write_text(out_dir / "config.json", serialize_config(config).dump(2) + "\n");
    manifest.files.push_back("config.json");

    std::ostringstream summary;
    summary << "shared_count,n_drops,mean_sd_c,std_sd_c,mean_sd_s,std_sd_s\n";
    for (const auto& p : campaign.points) {
        const auto cdf_c = stats::ecdf(p.sd_c);
        const auto cdf_s = stats::ecdf(p.sd_s);
        std::ostringstream csv;
        csv << "rank,sd_c,cdf_c,sd_s,cdf_s\n";
        for (std::size_t i = 0; i < cdf_c.size(); ++i)
            csv << i + 1 << ',' << format_double(cdf_c[i].first) << ',' << format_double(cdf_c[i].second) << ','
                << format_double(cdf_s[i].first) << ',' << format_double(cdf_s[i].second) << '\n';
        const std::string name = "sd_cdf_n" + std::to_string(p.shared_count) + ".csv";
        write_text(out_dir / name, csv.str());
        manifest.files.push_back(name);

        summary << p.shared_count << ',' << p.sd_c.size() << ',' << format_double(p.mean_sd_c) << ','
                << format_double(p.std_sd_c) << ',' << format_double(p.mean_sd_s) << ','
                << format_double(p.std_sd_s) << '\n';
    }
    write_text(out_dir / "sd_summary.csv", summary.str());
    manifest.files.push_back("sd_summary.csv");

    json m = manifest.to_json();
    m["config_hash"] = hex64(config_hash(config));
    m["drops"] = campaign.n_drops;
    write_text(out_dir / "manifest.json", m.dump(2) + "\n");
    manifest.files.push_back("manifest.json");
    return manifest;
}

} // namespace isac::io
