#pragma once

#include "sigemb/interp.hpp"

// Shared generator for random admissible site sets: coarse-lattice patches
// separated by more than r0, each with a random fine offset.
namespace test_support {

using namespace sigemb;

inline SeqOnSet random_admissible_values(const InterpContext& ctx, Rng& rng, int n_patches,
                                         int patch_span, double value_scale = 1.0) {
    const LatticePair& lat = ctx.lattice;
    int k = lat.dim();
    SeqOnSet out;
    double spacing = 0.0;
    for (int i = 0; i < k; ++i)
        spacing = std::max(spacing, static_cast<double>(lat.coarse_factor(i)) * lat.fine_step(i));
    double stride = patch_span * spacing + ctx.r0 + 1.0;
    for (int pch = 0; pch < n_patches; ++pch) {
        GridPt base(k, 0, 0);
        base.k = k;
        for (int i = 0; i < k; ++i) {
            double center = (pch - n_patches / 2.0) * stride * (i == 0 ? 1.0 : 0.37) +
                            rng.uniform(0, spacing);
            base[i] = static_cast<long long>(std::llround(center / lat.fine_step(i)));
            // random fine offset shared by the whole patch
            base[i] += rng.uniform_int(0, static_cast<int>(lat.coarse_factor(i)) - 1);
        }
        int taken = 0;
        for (int a = 0; a < patch_span && taken < patch_span; ++a) {
            GridPt p = base;
            p[0] += a * lat.coarse_factor(0);
            if (k == 2) p[1] += rng.uniform_int(0, patch_span - 1) * lat.coarse_factor(1);
            out.sites.push_back(p);
            out.values.push_back(rng.uniform(-value_scale, value_scale));
            ++taken;
        }
    }
    // dedupe (k=2 offsets may repeat)
    std::vector<std::pair<GridPt, double>> uniq;
    for (std::size_t i = 0; i < out.sites.size(); ++i) {
        bool seen = false;
        for (auto& u : uniq)
            if (u.first == out.sites[i]) seen = true;
        if (!seen) uniq.emplace_back(out.sites[i], out.values[i]);
    }
    out.sites.clear();
    out.values.clear();
    for (auto& u : uniq) {
        out.sites.push_back(u.first);
        out.values.push_back(u.second);
    }
    return out;
}

}  // namespace test_support
