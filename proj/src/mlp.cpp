#include "plth/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "plth/rng.hpp"

namespace plth {

void check_shapes(const Mlp& net) {
    if (net.dims.size() != net.weights.size() + 1)
        throw std::invalid_argument("mlp: dims must have one more entry than weights");
    if (net.weights.empty()) throw std::invalid_argument("mlp: no layers");
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        if (net.weights[l].rows != net.dims[l + 1] || net.weights[l].cols != net.dims[l])
            throw std::invalid_argument("mlp: layer " + std::to_string(l) + " has shape " +
                                        std::to_string(net.weights[l].rows) + "x" +
                                        std::to_string(net.weights[l].cols) + ", expected " +
                                        std::to_string(net.dims[l + 1]) + "x" +
                                        std::to_string(net.dims[l]));
    }
}

double spectral_norm(const Matrix& m, int iters, double tol) {
    if (m.rows == 0 || m.cols == 0) return 0.0;
    // Power iteration on M^T M with a fixed pseudorandom start so repeated
    // calls agree bit for bit.
    Rng rng(0x5eed5eedULL);
    std::vector<double> v(m.cols);
    double norm = 0.0;
    for (double& vi : v) vi = rng.uniform(-1.0, 1.0);
    std::vector<double> mv(m.rows), mtmv(m.cols);
    double prev = 0.0;
    for (int it = 0; it < iters; ++it) {
        matvec(m, v.data(), mv.data());
        matvec_t(m, mv.data(), mtmv.data());
        double len = 0.0;
        for (double c : mtmv) len += c * c;
        len = std::sqrt(len);
        if (len == 0.0) return 0.0;  // v fell in the null space; norm-0 matrix in practice
        for (std::size_t j = 0; j < m.cols; ++j) v[j] = mtmv[j] / len;
        matvec(m, v.data(), mv.data());
        double s = 0.0;
        for (double c : mv) s += c * c;
        norm = std::sqrt(s);
        if (it > 0 && std::abs(norm - prev) <= tol * std::max(1.0, norm)) break;
        prev = norm;
    }
    return norm;
}

TargetReport validate_target(const Mlp& net) {
    check_shapes(net);
    TargetReport report;
    report.pass = true;
    for (const Matrix& w : net.weights) {
        LayerNorms ln;
        ln.spectral = spectral_norm(w);
        ln.max_abs = 0.0;
        for (double v : w.a) ln.max_abs = std::max(ln.max_abs, std::abs(v));
        ln.spectral_ok = ln.spectral <= 1.0 + 1e-9;
        ln.max_abs_ok = ln.max_abs <= 0.5 + 1e-12;
        report.pass = report.pass && ln.spectral_ok && ln.max_abs_ok;
        report.layers.push_back(ln);
    }
    return report;
}

std::vector<double> forward(const Mlp& net, const std::vector<double>& x) {
    check_shapes(net);
    if (x.size() != net.dims.front())
        throw std::invalid_argument("mlp forward: input has " + std::to_string(x.size()) +
                                    " entries, expected " + std::to_string(net.dims.front()));
    std::vector<double> cur = x;
    for (std::size_t l = 0; l < net.weights.size(); ++l) {
        cur = matvec(net.weights[l], cur);
        if (l + 1 < net.weights.size())
            for (double& v : cur) v = relu(v);
    }
    return cur;
}

Mlp random_target(const std::vector<std::size_t>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw std::invalid_argument("random_target: need at least two dims");
    Mlp net;
    net.dims = dims;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Matrix w(dims[l + 1], dims[l]);
        for (double& v : w.a) v = rng.uniform(-0.5, 0.5);
        // Shrink until the layer passes both norm caps; keeps entries well
        // inside [-1/2, 1/2].
        double s = spectral_norm(w);
        if (s > 1.0) {
            double scale = 0.95 / s;
            for (double& v : w.a) v *= scale;
        }
        net.weights.push_back(std::move(w));
    }
    return net;
}

std::vector<double> forward(const CandidateNet& net, const std::vector<double>& x) {
    if (x.size() != net.target_dims.front())
        throw std::invalid_argument("candidate forward: input dimension mismatch");
    std::vector<double> cur = x;
    for (std::size_t l = 0; l < net.pairs(); ++l) {
        cur = matvec(net.inner(l), cur);
        for (double& v : cur) v = relu(v);
        cur = matvec(net.outer(l), cur);
        if (l + 1 < net.pairs())
            for (double& v : cur) v = relu(v);
    }
    return cur;
}

void check_feasible(const PrunedPerturbedNet& net) {
    if (net.masks.size() != net.base.weights.size() ||
        net.perturbations.size() != net.base.weights.size())
        throw std::invalid_argument("pruned net: mask/perturbation layer count mismatch");
    if (!(net.eps >= 0.0)) throw std::invalid_argument("pruned net: eps must be >= 0");
    for (std::size_t l = 0; l < net.base.weights.size(); ++l) {
        const Matrix& w = net.base.weights[l];
        const Matrix& s = net.masks[l];
        const Matrix& y = net.perturbations[l];
        if (!w.same_shape(s) || !w.same_shape(y))
            throw std::invalid_argument("pruned net: shape mismatch at layer " + std::to_string(l));
        bool sign_layer = (l % 2 == 0);
        for (std::size_t i = 0; i < w.count(); ++i) {
            if (s.a[i] != 0.0 && s.a[i] != 1.0)
                throw std::invalid_argument("pruned net: mask entry not 0/1 at layer " +
                                            std::to_string(l));
            if (sign_layer && y.a[i] != 0.0)
                throw std::invalid_argument("pruned net: sign layer carries a perturbation");
            if (s.a[i] == 0.0 && y.a[i] != 0.0)
                throw std::invalid_argument("pruned net: perturbation on masked-out weight");
            if (std::abs(y.a[i]) > net.eps)
                throw std::invalid_argument("pruned net: perturbation exceeds eps");
        }
    }
}

std::vector<double> forward(const PrunedPerturbedNet& net, const std::vector<double>& x) {
    if (x.size() != net.base.target_dims.front())
        throw std::invalid_argument("pruned forward: input dimension mismatch");
    std::vector<double> cur = x;
    std::vector<double> next;
    for (std::size_t l = 0; l < net.base.weights.size(); ++l) {
        const Matrix& w = net.base.weights[l];
        const Matrix& s = net.masks[l];
        const Matrix& y = net.perturbations[l];
        next.assign(w.rows, 0.0);
        for (std::size_t i = 0; i < w.rows; ++i) {
            const double* wr = w.row(i);
            const double* sr = s.row(i);
            const double* yr = y.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < w.cols; ++j)
                if (sr[j] != 0.0) acc += (wr[j] + yr[j]) * cur[j];
            next[i] = acc;
        }
        if (l + 1 < net.base.weights.size())
            for (double& v : next) v = relu(v);
        cur = next;
    }
    return cur;
}

}  // namespace plth
