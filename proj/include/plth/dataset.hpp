#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace plth {

// Flat classification dataset: xs holds size()*dim doubles, row per sample.
struct Dataset {
    std::size_t dim = 0;
    int classes = 0;
    std::vector<double> xs;
    std::vector<int> ys;

    std::size_t size() const { return ys.size(); }
    const double* x(std::size_t i) const { return xs.data() + i * dim; }
};

// Reads an IDX image/label file pair (big-endian headers, magic 0x00000803
// for images and 0x00000801 for labels).  Pixels are scaled to [0, 1].
// Throws std::runtime_error naming the offending field on malformed input.
Dataset mnist_load(const std::string& images_path, const std::string& labels_path);

// Gaussian blobs, one per class, sigma = 1, exactly n_per_class samples per
// class.  Means sit at +-2 along coordinate axes when classes <= 2*dim
// (classes 2c and 2c+1 share axis c with opposite signs, so a two-class set
// is separated by 4 sigma), otherwise at radius 2 on a circle in the first
// two coordinates.
Dataset synthetic_dataset(int classes, std::size_t dim, int n_per_class, std::uint64_t seed);

}  // namespace plth
