#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gpcert/attack.hpp"
#include "gpcert/dataset.hpp"
#include "gpcert/errors.hpp"

namespace gpcert {

/// Shortest text form that reloads to the identical double (17 significant
/// digits covers every binary64 value).
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

inline double parse_double_field(const std::string& text, long line_no) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(text, &pos);
        if (pos != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ParseError("cannot parse number '" + text + "'", line_no);
    }
}

inline int parse_label_field(const std::string& text, long line_no) {
    if (text == "1" || text == "+1") return 1;
    if (text == "-1") return -1;
    throw ParseError("label must be +1 or -1, got '" + text + "'", line_no);
}

} // namespace detail

inline std::string dataset_to_csv(const LabeledDataset& dataset) {
    std::ostringstream out;
    for (Eigen::Index d = 0; d < dataset.dim(); ++d) out << 'f' << d << ',';
    out << "label\n";
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        for (Eigen::Index d = 0; d < dataset.dim(); ++d)
            out << format_double(dataset.points(i, d)) << ',';
        out << dataset.labels[i] << '\n';
    }
    return out.str();
}

inline void save_dataset_csv(const LabeledDataset& dataset, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path.string() + "' for writing");
    file << dataset_to_csv(dataset);
}

inline LabeledDataset load_dataset_csv(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open dataset file '" + path.string() + "'");
    std::string line;
    long line_no = 0;

    if (!std::getline(file, line)) throw ParseError("missing header row", 1);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    const std::vector<std::string> header = detail::split_csv_line(line);
    if (header.size() < 2 || header.back() != "label")
        throw ParseError("header must be f0..f{D-1},label", line_no);
    const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 1;
    for (Eigen::Index d = 0; d < dim; ++d)
        if (header[static_cast<std::size_t>(d)] != "f" + std::to_string(d))
            throw ParseError("feature column " + std::to_string(d) + " must be named f" +
                                 std::to_string(d),
                             line_no);

    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    while (std::getline(file, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> fields = detail::split_csv_line(line);
        if (static_cast<Eigen::Index>(fields.size()) != dim + 1)
            throw ParseError("expected " + std::to_string(dim + 1) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        std::vector<double> row(static_cast<std::size_t>(dim));
        for (Eigen::Index d = 0; d < dim; ++d)
            row[static_cast<std::size_t>(d)] =
                detail::parse_double_field(fields[static_cast<std::size_t>(d)], line_no);
        labels.push_back(detail::parse_label_field(fields.back(), line_no));
        rows.push_back(std::move(row));
    }

    LabeledDataset dataset;
    dataset.points.resize(static_cast<Eigen::Index>(rows.size()), dim);
    dataset.labels.resize(static_cast<Eigen::Index>(labels.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (Eigen::Index d = 0; d < dim; ++d)
            dataset.points(static_cast<Eigen::Index>(i), d) = rows[i][static_cast<std::size_t>(d)];
        dataset.labels[static_cast<Eigen::Index>(i)] = labels[i];
    }
    dataset.validate();
    return dataset;
}

/// Binary layout referenced by the JSON manifest: n*d little-endian f64
/// features in row-major order followed by n f64 labels (+1.0 / -1.0).
inline void save_dataset_binary(const LabeledDataset& dataset,
                                const std::filesystem::path& manifest_path) {
    std::filesystem::path data_path = manifest_path;
    data_path.replace_extension(".bin");

    std::ofstream data(data_path, std::ios::binary);
    if (!data) throw ConfigError("cannot open '" + data_path.string() + "' for writing");
    for (Eigen::Index i = 0; i < dataset.size(); ++i)
        for (Eigen::Index d = 0; d < dataset.dim(); ++d) {
            const double v = dataset.points(i, d);
            data.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
    for (Eigen::Index i = 0; i < dataset.size(); ++i) {
        const double v = static_cast<double>(dataset.labels[i]);
        data.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    data.close();

    nlohmann::json manifest{{"n", dataset.size()},
                            {"d", dataset.dim()},
                            {"dtype", "f64"},
                            {"order", "row-major"},
                            {"data_path", data_path.filename().string()}};
    std::ofstream file(manifest_path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + manifest_path.string() + "' for writing");
    file << manifest.dump(2) << '\n';
}

inline LabeledDataset load_dataset_binary(const std::filesystem::path& manifest_path) {
    std::ifstream file(manifest_path, std::ios::binary);
    if (!file) throw ConfigError("cannot open manifest '" + manifest_path.string() + "'");
    nlohmann::json manifest;
    try {
        file >> manifest;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("manifest is not valid JSON: ") + e.what(), 1);
    }
    for (const char* key : {"n", "d", "dtype", "order", "data_path"})
        if (!manifest.contains(key))
            throw ParseError(std::string("manifest missing field '") + key + "'", 1);
    if (manifest["dtype"] != "f64") throw ParseError("manifest dtype must be f64", 1);
    if (manifest["order"] != "row-major") throw ParseError("manifest order must be row-major", 1);
    const Eigen::Index n = manifest["n"].get<Eigen::Index>();
    const Eigen::Index d = manifest["d"].get<Eigen::Index>();

    const std::filesystem::path data_path =
        manifest_path.parent_path() / manifest["data_path"].get<std::string>();
    std::ifstream data(data_path, std::ios::binary);
    if (!data) throw ConfigError("cannot open data file '" + data_path.string() + "'");
    data.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::uint64_t>(data.tellg());
    const std::uint64_t expected = static_cast<std::uint64_t>(n) *
                                   (static_cast<std::uint64_t>(d) + 1) * sizeof(double);
    if (bytes != expected)
        throw ParseError("data file holds " + std::to_string(bytes) + " bytes, expected " +
                             std::to_string(expected),
                         1);
    data.seekg(0);

    LabeledDataset dataset;
    dataset.points.resize(n, d);
    dataset.labels.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) {
            double v;
            data.read(reinterpret_cast<char*>(&v), sizeof(v));
            dataset.points(i, j) = v;
        }
    for (Eigen::Index i = 0; i < n; ++i) {
        double v;
        data.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (v != 1.0 && v != -1.0)
            throw ParseError("binary label " + std::to_string(i) + " must be +1 or -1", 1);
        dataset.labels[i] = static_cast<int>(v);
    }
    dataset.validate();
    return dataset;
}

/// Loads either format, chosen by extension: .json manifests are binary
/// datasets, anything else parses as CSV.
inline LabeledDataset load_dataset(const std::filesystem::path& path) {
    if (path.extension() == ".json") return load_dataset_binary(path);
    return load_dataset_csv(path);
}

inline std::string records_to_csv(const std::vector<AttackRecord>& records) {
    std::ostringstream out;
    out << "origin_index,origin_label,nearest_enemy_index,distance_to_enemy,norm,"
           "empirical_prob,theoretical_exact,theoretical_phi,valid,follows_theorem\n";
    for (const AttackRecord& r : records) {
        out << r.origin_index << ',' << r.origin_label << ',' << r.nearest_enemy_index << ','
            << format_double(r.distance_to_enemy) << ',' << format_double(r.perturbation_norm)
            << ',' << format_double(r.empirical_prob) << ','
            << format_double(r.theoretical_exact) << ',' << format_double(r.theoretical_phi)
            << ',' << (r.valid ? 1 : 0) << ',' << (r.follows_theorem ? 1 : 0) << '\n';
    }
    return out.str();
}

inline void write_records_csv(const std::vector<AttackRecord>& records,
                              const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path.string() + "' for writing");
    file << records_to_csv(records);
}

/// Scatter-ready triples: nearest-enemy distance against the empirical and
/// certified misclassification probabilities.
inline void emit_plot_data(const std::vector<AttackRecord>& records,
                           const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path.string() + "' for writing");
    file << "distance_to_enemy,empirical_prob,theoretical_exact\n";
    for (const AttackRecord& r : records)
        file << format_double(r.distance_to_enemy) << ',' << format_double(r.empirical_prob)
             << ',' << format_double(r.theoretical_exact) << '\n';
}

/// Full certificate record, sufficient to re-verify every number by hand.
inline nlohmann::json certificate_to_json(const DatasetCertificate& dataset_cert,
                                          const KernelSpec& kernel, double jitter) {
    const MspCertificate& c = dataset_cert.certificate;
    nlohmann::json scan_table = nlohmann::json::array();
    for (const ScanRow& row : dataset_cert.scan.table)
        scan_table.push_back({{"s", row.s},
                              {"theta_r2", row.theta_r2},
                              {"mu", row.mu},
                              {"sigma2", row.sigma2},
                              {"phi_bound", row.phi_bound}});
    return nlohmann::json{
        {"kernel", {{"family", "gaussian"}, {"theta1", kernel.theta1}, {"theta2", kernel.theta2}}},
        {"jitter", jitter},
        {"epsilon", c.epsilon},
        {"r", c.r},
        {"pair",
         {{"index_plus", c.index_plus},
          {"index_minus", c.index_minus},
          {"distance", c.pair_distance},
          {"s", c.theta_s}}},
        {"theta1", c.theta1},
        {"theta_s", c.theta_s},
        {"theta_r1", c.theta_r1},
        {"theta_r2", c.theta_r2},
        {"mu", c.mu},
        {"sigma2", c.sigma2},
        {"sigma_floored", c.sigma_floored},
        {"exact_tail", c.exact_tail},
        {"phi_bound", c.phi_bound},
        {"valid", c.valid},
        {"monotonicity_scan",
         {{"passed", dataset_cert.scan.passed},
          {"s_lo", dataset_cert.scan_lo},
          {"s_hi", dataset_cert.scan_hi},
          {"points", dataset_cert.scan.table.size()},
          {"table", std::move(scan_table)}}}};
}

struct HistogramBin {
    double lo{0.0};
    double hi{0.0};
    std::size_t count{0};
};

struct Histogram {
    double bin_width{0.0};
    std::vector<HistogramBin> bins;
};

/// Freedman-Diaconis binning: width = 2 IQR / n^(1/3). Falls back to a
/// single bin when the data have no spread.
inline Histogram build_histogram(std::vector<double> values) {
    if (values.empty()) throw DomainError("histogram needs at least one value");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double lo = values.front();
    const double hi = values.back();

    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(n - 1);
        const std::size_t idx = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(idx);
        if (idx + 1 >= n) return values[idx];
        return values[idx] * (1.0 - frac) + values[idx + 1] * frac;
    };
    const double iqr = quantile(0.75) - quantile(0.25);
    const double width = 2.0 * iqr / std::cbrt(static_cast<double>(n));

    Histogram hist;
    if (!(width > 0.0) || !(hi > lo)) {
        hist.bin_width = hi - lo;
        hist.bins.push_back({lo, hi, n});
        return hist;
    }
    hist.bin_width = width;
    const std::size_t bin_count =
        static_cast<std::size_t>(std::ceil((hi - lo) / width));
    hist.bins.resize(bin_count);
    for (std::size_t b = 0; b < bin_count; ++b) {
        hist.bins[b].lo = lo + width * static_cast<double>(b);
        hist.bins[b].hi = lo + width * static_cast<double>(b + 1);
    }
    for (double v : values) {
        std::size_t b = static_cast<std::size_t>((v - lo) / width);
        if (b >= bin_count) b = bin_count - 1;
        ++hist.bins[b].count;
    }
    return hist;
}

inline void write_histogram_csv(const Histogram& hist, std::size_t n,
                                const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot open '" + path.string() + "' for writing");
    file << "# bin_width=" << format_double(hist.bin_width) << "\n# n=" << n << '\n';
    file << "bin_lo,bin_hi,count\n";
    for (const HistogramBin& b : hist.bins)
        file << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count << '\n';
}

} // namespace gpcert
