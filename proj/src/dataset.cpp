#include "plth/dataset.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "plth/rng.hpp"

namespace plth {

namespace {

std::uint32_t read_be_u32(std::ifstream& in, const std::string& path, const char* field) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw std::runtime_error(path + ": truncated while reading " + field);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

std::vector<unsigned char> read_payload(std::ifstream& in, const std::string& path,
                                        std::size_t expected, const char* what) {
    std::vector<unsigned char> data(expected);
    in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(expected));
    std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got != expected)
        throw std::runtime_error(path + ": expected " + std::to_string(expected) + " bytes of " +
                                 what + ", found " + std::to_string(got));
    return data;
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

}  // namespace

Dataset mnist_load(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error(images_path + ": cannot open image file");
    std::uint32_t magic = read_be_u32(img, images_path, "image magic");
    if (magic != 0x00000803u)
        throw std::runtime_error(images_path + ": image file magic mismatch: expected 0x00000803, got " +
                                 hex32(magic));
    std::uint32_t count = read_be_u32(img, images_path, "image count");
    std::uint32_t rows = read_be_u32(img, images_path, "image rows");
    std::uint32_t cols = read_be_u32(img, images_path, "image cols");
    std::size_t pixels = std::size_t(count) * rows * cols;
    std::vector<unsigned char> raw = read_payload(img, images_path, pixels, "pixel data");

    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error(labels_path + ": cannot open label file");
    std::uint32_t lmagic = read_be_u32(lab, labels_path, "label magic");
    if (lmagic != 0x00000801u)
        throw std::runtime_error(labels_path + ": label file magic mismatch: expected 0x00000801, got " +
                                 hex32(lmagic));
    std::uint32_t lcount = read_be_u32(lab, labels_path, "label count");
    if (lcount != count)
        throw std::runtime_error(labels_path + ": label count " + std::to_string(lcount) +
                                 " does not match image count " + std::to_string(count));
    std::vector<unsigned char> labels = read_payload(lab, labels_path, lcount, "label data");

    Dataset ds;
    ds.dim = std::size_t(rows) * cols;
    ds.classes = 10;
    ds.xs.resize(pixels);
    for (std::size_t i = 0; i < pixels; ++i) ds.xs[i] = raw[i] / 255.0;
    ds.ys.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        if (labels[i] > 9)
            throw std::runtime_error(labels_path + ": label value " + std::to_string(labels[i]) +
                                     " out of range at index " + std::to_string(i));
        ds.ys[i] = labels[i];
    }
    return ds;
}

Dataset synthetic_dataset(int classes, std::size_t dim, int n_per_class, std::uint64_t seed) {
    if (classes < 2) throw std::invalid_argument("synthetic_dataset: need at least two classes");
    if (dim == 0) throw std::invalid_argument("synthetic_dataset: dim must be >= 1");
    if (n_per_class < 1) throw std::invalid_argument("synthetic_dataset: n_per_class must be >= 1");

    std::vector<std::vector<double>> means(classes, std::vector<double>(dim, 0.0));
    constexpr double kRadius = 2.0;
    if (static_cast<std::size_t>(classes) <= 2 * dim) {
        for (int c = 0; c < classes; ++c)
            means[c][c / 2] = (c % 2 == 0) ? kRadius : -kRadius;
    } else {
        if (dim < 2)
            throw std::invalid_argument("synthetic_dataset: too many classes for a 1-d layout");
        for (int c = 0; c < classes; ++c) {
            double angle = 2.0 * 3.14159265358979323846 * c / classes;
            means[c][0] = kRadius * std::cos(angle);
            means[c][1] = kRadius * std::sin(angle);
        }
    }

    Dataset ds;
    ds.dim = dim;
    ds.classes = classes;
    ds.xs.reserve(std::size_t(classes) * n_per_class * dim);
    ds.ys.reserve(std::size_t(classes) * n_per_class);
    Rng rng(seed);
    // Interleave classes so any prefix of the dataset stays roughly balanced.
    for (int s = 0; s < n_per_class; ++s)
        for (int c = 0; c < classes; ++c) {
            for (std::size_t j = 0; j < dim; ++j) ds.xs.push_back(means[c][j] + rng.gauss());
            ds.ys.push_back(c);
        }
    return ds;
}

}  // namespace plth
