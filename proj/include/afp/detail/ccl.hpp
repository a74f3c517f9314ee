#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

#include "afp/raster.hpp"

namespace afp::detail {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t add() {
        parent_.push_back(parent_.size());
        return parent_.size() - 1;
    }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // The smaller index becomes the root.
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

/// Two-pass 8-connected labeling of the cells equal to `value`. Components are
/// returned in raster-scan discovery order, each pixel list in raster order.
template <typename T>
std::vector<std::vector<Pixel>> connected_components(const Raster<T>& grid, const T& value) {
    const int w = grid.width();
    const int h = grid.height();
    constexpr std::size_t kUnlabeled = 0;
    Raster<std::size_t> provisional(w, h, kUnlabeled);
    DisjointSet sets(1);

    // Previously scanned neighbours: W, NW, N, NE.
    constexpr int kBack[4][2] = {{-1, 0}, {-1, -1}, {0, -1}, {1, -1}};
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            if (!(grid.at(col, row) == value)) continue;
            std::size_t label = kUnlabeled;
            for (const auto& d : kBack) {
                const int c = col + d[0];
                const int r = row + d[1];
                if (!provisional.contains(c, r)) continue;
                const std::size_t other = provisional.at(c, r);
                if (other == kUnlabeled) continue;
                if (label == kUnlabeled) {
                    label = other;
                } else {
                    sets.unite(label, other);
                }
            }
            provisional.at(col, row) = label == kUnlabeled ? sets.add() : label;
        }
    }

    std::map<std::size_t, std::size_t> root_to_index;
    std::vector<std::vector<Pixel>> components;
    for (int row = 0; row < h; ++row) {
        for (int col = 0; col < w; ++col) {
            const std::size_t label = provisional.at(col, row);
            if (label == kUnlabeled) continue;
            const auto [it, inserted] = root_to_index.try_emplace(sets.find(label), components.size());
            if (inserted) components.emplace_back();
            components[it->second].push_back({col, row});
        }
    }
    return components;
}

}  // namespace afp::detail
