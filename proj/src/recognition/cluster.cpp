#include "mcc/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcc::recognition {

double patch_distance(const PatchCandidate& a, const PatchCandidate& b)
{
    const double w = std::abs(a.area - b.area) / (a.area + b.area);
    return (1.0 + w) * distance(a.center, b.center);
}

namespace {

struct DisjointSets {
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t i)
    {
        while (parent[i] != i) {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        return i;
    }

    void unite(std::size_t a, std::size_t b)
    {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[std::max(a, b)] = std::min(a, b);
    }

    std::vector<std::size_t> parent;
};

}  // namespace

std::vector<int> similarity_components(const std::vector<PatchCandidate>& patches,
                                       double b0_factor)
{
    const std::size_t n = patches.size();
    std::vector<std::size_t> by_x(n);
    std::iota(by_x.begin(), by_x.end(), 0);
    std::sort(by_x.begin(), by_x.end(), [&](std::size_t a, std::size_t b) {
        return patches[a].center.x < patches[b].center.x;
    });
    double reach = 0.0;
    for (const auto& p : patches)
        reach = std::max(reach, p.axis_max * b0_factor);

    // d_ij >= |X_i - X_j| >= |x_i - x_j|, so the sweep stops once the x gap
    // exceeds the largest radius.
    DisjointSets sets(n);
    for (std::size_t a = 0; a < n; ++a) {
        const auto& pi = patches[by_x[a]];
        for (std::size_t b = a + 1; b < n; ++b) {
            const auto& pj = patches[by_x[b]];
            if (pj.center.x - pi.center.x >= reach)
                break;
            const double d = patch_distance(pi, pj);
            if (d < pi.axis_max * b0_factor || d < pj.axis_max * b0_factor)
                sets.unite(by_x[a], by_x[b]);
        }
    }

    std::vector<int> ids(n, -1);
    std::vector<int> id_of_root(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t r = sets.find(i);
        if (id_of_root[r] < 0)
            id_of_root[r] = next++;
        ids[i] = id_of_root[r];
    }
    return ids;
}

std::vector<PatchGroup> cluster_patches(const std::vector<PatchCandidate>& patches,
                                        const RecognitionConfig& cfg)
{
    const auto ids = similarity_components(patches, cfg.b0_factor);
    const int count = ids.empty() ? 0 : *std::max_element(ids.begin(), ids.end()) + 1;
    std::vector<PatchGroup> groups(static_cast<std::size_t>(count));
    for (std::size_t i = 0; i < patches.size(); ++i)
        groups[ids[i]].push_back(patches[i]);
    std::erase_if(groups, [&](const PatchGroup& g) {
        return static_cast<int>(g.size()) < cfg.min_group_size;
    });
    return groups;
}

}  // namespace mcc::recognition
