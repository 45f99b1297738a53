#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace ptlearn {

// Symmetric real matrix stored as the packed upper triangle (diagonal included).
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(int n, double fill = 0.0)
        : n_(n), data_(static_cast<std::size_t>(n) * (n + 1) / 2, fill) {}

    int size() const { return n_; }

    double operator()(int u, int v) const { return data_[index(u, v)]; }
    double& operator()(int u, int v) { return data_[index(u, v)]; }

    const std::vector<double>& packed() const { return data_; }

private:
    std::size_t index(int u, int v) const {
        if (u > v) std::swap(u, v);
        return static_cast<std::size_t>(u) * n_ - static_cast<std::size_t>(u) * (u - 1) / 2
               + static_cast<std::size_t>(v - u);
    }

    int n_ = 0;
    std::vector<double> data_;
};

}  // namespace ptlearn
