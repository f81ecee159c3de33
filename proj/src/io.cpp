#include "sompca/io.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sompca/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace sompca {

namespace {

constexpr char kMagic[4] = {'T', 'E', 'N', '1'};
constexpr int kModelVersion = 1;

void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_f64(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

class Reader {
public:
    Reader(const std::string& bytes, const std::string& path) : bytes_(bytes), path_(path) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        const char* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }

    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }

    double f64() {
        const char* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return std::bit_cast<double>(v);
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

    [[noreturn]] void fail(const std::string& what) const {
        throw FileFormatError(path_ + ": " + what);
    }

private:
    const char* take(std::size_t n) {
        if (remaining() < n) fail("truncated file");
        const char* p = bytes_.data() + pos_;
        pos_ += n;
        return p;
    }

    const std::string& bytes_;
    std::string path_;
    std::size_t pos_ = 0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw FileFormatError(path + ": cannot open for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (!in.good() && !in.eof())
        throw FileFormatError(path + ": read error");
    return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw FileFormatError(path + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out.good())
        throw FileFormatError(path + ": write error");
}

} // namespace

LabeledDataset load_dataset(const std::string& path) {
    const std::string bytes = read_file(path);
    Reader r(bytes, path);
    if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0)
        r.fail("missing TEN1 magic");
    (void)r.u32(); // consume magic

    const int order = static_cast<int>(r.u8());
    if (order < 1) r.fail("tensor order must be >= 1");
    Shape shape(static_cast<std::size_t>(order));
    std::size_t per_sample = 1;
    for (int n = 0; n < order; ++n) {
        const std::uint32_t d = r.u32();
        if (d < 1) r.fail("dimension of mode " + std::to_string(n + 1) + " must be >= 1");
        if (d > static_cast<std::uint32_t>(std::numeric_limits<int>::max()))
            r.fail("dimension of mode " + std::to_string(n + 1) + " is out of range");
        shape[static_cast<std::size_t>(n)] = static_cast<int>(d);
        per_sample *= d;
    }
    const std::uint32_t m = r.u32();

    const std::size_t expected = static_cast<std::size_t>(m) * 4 +
                                 static_cast<std::size_t>(m) * per_sample * 8;
    if (r.remaining() != expected)
        r.fail("file length does not match header: expected " + std::to_string(expected) +
               " payload bytes, found " + std::to_string(r.remaining()));

    LabeledDataset out;
    out.labels.resize(m);
    for (std::uint32_t i = 0; i < m; ++i) out.labels[i] = r.i32();
    out.samples.reserve(m);
    for (std::uint32_t i = 0; i < m; ++i) {
        std::vector<double> data(per_sample);
        for (std::size_t j = 0; j < per_sample; ++j) data[j] = r.f64();
        out.samples.emplace_back(shape, std::move(data));
    }
    return out;
}

void save_dataset(const std::string& path, const LabeledDataset& data) {
    if (data.samples.size() != data.labels.size())
        throw ArgumentError("sample and label counts differ");
    if (data.samples.empty())
        throw ArgumentError("cannot save an empty dataset");
    const Shape& shape = data.samples[0].shape();
    if (shape.size() > 255)
        throw ArgumentError("tensor order exceeds the format limit of 255");
    for (const auto& s : data.samples)
        if (s.shape() != shape)
            throw ShapeError("dataset samples must share one shape");

    std::string bytes;
    bytes.append(kMagic, 4);
    bytes.push_back(static_cast<char>(shape.size()));
    for (int d : shape) put_u32(bytes, static_cast<std::uint32_t>(d));
    put_u32(bytes, static_cast<std::uint32_t>(data.samples.size()));
    for (int label : data.labels) put_u32(bytes, static_cast<std::uint32_t>(label));
    for (const auto& s : data.samples)
        for (double v : s.values()) put_f64(bytes, v);
    write_file(path, bytes);
}

void save_model(const std::string& path, const TvpModel& model) {
    json doc;
    doc["format"] = "sompca-model";
    doc["version"] = kModelVersion;
    doc["variant"] = variant_name(model.variant);
    doc["shape"] = model.shape;
    doc["nu"] = model.nu;
    doc["iterations"] = model.iterations;
    json emps = json::array();
    for (const auto& emp : model.emps) {
        json vectors = json::array();
        for (const auto& u : emp.vectors)
            vectors.push_back(std::vector<double>(u.data(), u.data() + u.size()));
        emps.push_back({{"scatter", emp.scatter}, {"vectors", std::move(vectors)}});
    }
    doc["emps"] = std::move(emps);
    write_file(path, doc.dump(2) + "\n");
}

TvpModel load_model(const std::string& path) {
    const std::string bytes = read_file(path);
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::exception& e) {
        throw FileFormatError(path + ": invalid JSON: " + e.what());
    }

    try {
        if (doc.at("format").get<std::string>() != "sompca-model")
            throw FileFormatError(path + ": not a sompca model file");
        if (doc.at("version").get<int>() != kModelVersion)
            throw FileFormatError(path + ": unsupported model version");

        TvpModel model;
        const auto variant = variant_from_name(doc.at("variant").get<std::string>());
        if (!variant)
            throw FileFormatError(path + ": unknown variant");
        model.variant = *variant;
        model.shape = doc.at("shape").get<Shape>();
        if (!valid_shape(model.shape))
            throw FileFormatError(path + ": invalid shape");
        model.nu = doc.at("nu").get<int>();
        if (model.variant == Variant::Pca) {
            if (model.nu != 0)
                throw FileFormatError(path + ": the vector baseline stores nu = 0");
        } else if (model.nu < 1 || model.nu > model.order()) {
            throw FileFormatError(path + ": nu out of range");
        }
        model.iterations = doc.at("iterations").get<int>();

        for (const auto& emp_doc : doc.at("emps")) {
            Emp emp;
            emp.scatter = emp_doc.at("scatter").get<double>();
            if (!std::isfinite(emp.scatter))
                throw FileFormatError(path + ": non-finite scatter");
            const auto& vectors = emp_doc.at("vectors");
            if (vectors.size() != model.shape.size())
                throw FileFormatError(path + ": EMP vector count does not match tensor order");
            for (std::size_t n = 0; n < vectors.size(); ++n) {
                const auto values = vectors[n].get<std::vector<double>>();
                if (static_cast<int>(values.size()) != model.shape[n])
                    throw FileFormatError(path + ": EMP vector length does not match mode " +
                                          std::to_string(n + 1));
                Eigen::VectorXd u(static_cast<Eigen::Index>(values.size()));
                for (std::size_t i = 0; i < values.size(); ++i) {
                    if (!std::isfinite(values[i]))
                        throw FileFormatError(path + ": non-finite vector entry");
                    u[static_cast<Eigen::Index>(i)] = values[i];
                }
                if (std::abs(u.norm() - 1.0) > 1e-6)
                    throw FileFormatError(path + ": EMP vector is not unit length");
                emp.vectors.push_back(std::move(u));
            }
            model.emps.push_back(std::move(emp));
        }

        // feature count and orthogonality sanity in the constrained mode(s)
        if (model.variant != Variant::Pca) {
            const int bound = model.variant == Variant::FoMpca
                                  ? *std::min_element(model.shape.begin(), model.shape.end())
                                  : model.shape[static_cast<std::size_t>(model.nu - 1)];
            if (model.num_features() > bound)
                throw FileFormatError(path + ": more features than the variant's bound of " +
                                      std::to_string(bound));
        }
        std::vector<int> constrained_modes;
        if (model.variant == Variant::FoMpca)
            for (int n = 1; n <= model.order(); ++n) constrained_modes.push_back(n);
        else
            constrained_modes.push_back(model.variant == Variant::Pca ? 1 : model.nu);
        for (int mode : constrained_modes)
            for (int i = 0; i < model.num_features(); ++i)
                for (int j = i + 1; j < model.num_features(); ++j) {
                    const double dot =
                        model.emps[static_cast<std::size_t>(i)].vectors[static_cast<std::size_t>(mode - 1)].dot(
                            model.emps[static_cast<std::size_t>(j)].vectors[static_cast<std::size_t>(mode - 1)]);
                    if (std::abs(dot) > 1e-6)
                        throw FileFormatError(path + ": mode-" + std::to_string(mode) +
                                              " vectors are not pairwise orthogonal");
                }
        return model;
    } catch (const json::exception& e) {
        throw FileFormatError(path + ": malformed model document: " + e.what());
    }
}

namespace {

double parse_double(std::string_view text, const std::string& context) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    while (first != last && (*first == ' ' || *first == '\t')) ++first;
    while (last != first && (*(last - 1) == ' ' || *(last - 1) == '\t' || *(last - 1) == '\r')) --last;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last)
        throw FileFormatError(context + ": cannot parse number '" + std::string(text) + "'");
    return value;
}

int label_from_name(const std::string& stem) {
    std::size_t digits = 0;
    while (digits < stem.size() && stem[digits] >= '0' && stem[digits] <= '9') ++digits;
    if (digits == 0) return -1;
    int label = -1;
    const auto [ptr, ec] = std::from_chars(stem.data(), stem.data() + digits, label);
    if (ec != std::errc())
        throw FileFormatError(stem + ": label prefix out of range");
    (void)ptr;
    return label;
}

} // namespace

LabeledDataset import_csv_dir(const std::string& dir) {
    if (!fs::is_directory(dir))
        throw FileFormatError(dir + ": not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".csv")
            files.push_back(entry.path());
    if (files.empty())
        throw FileFormatError(dir + ": no .csv files found");
    std::sort(files.begin(), files.end());

    LabeledDataset out;
    Shape shape;
    for (const auto& file : files) {
        std::ifstream in(file);
        if (!in)
            throw FileFormatError(file.string() + ": cannot open for reading");
        std::vector<double> values;
        int rows = 0, cols = -1;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty() || line == "\r") continue;
            int count = 0;
            std::size_t start = 0;
            while (true) {
                const std::size_t comma = line.find(',', start);
                const std::string_view cell(line.data() + start,
                                            (comma == std::string::npos ? line.size() : comma) - start);
                values.push_back(parse_double(cell, file.string()));
                ++count;
                if (comma == std::string::npos) break;
                start = comma + 1;
            }
            if (cols == -1) cols = count;
            else if (count != cols)
                throw FileFormatError(file.string() + ": ragged rows (" + std::to_string(count) +
                                      " vs " + std::to_string(cols) + " columns)");
            ++rows;
        }
        if (rows == 0)
            throw FileFormatError(file.string() + ": empty matrix");
        const Shape file_shape = {rows, cols};
        if (shape.empty()) shape = file_shape;
        else if (file_shape != shape)
            throw ShapeError(file.string() + ": matrix is " + shape_to_string(file_shape) +
                             " but earlier files are " + shape_to_string(shape));
        out.samples.emplace_back(file_shape, std::move(values));
        out.labels.push_back(label_from_name(file.stem().string()));
    }
    return out;
}

} // namespace sompca
