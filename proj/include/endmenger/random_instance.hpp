#pragma once

#include <random>
#include <string>

#include "presentation.hpp"

namespace endmenger {

/// Bounds for the seeded instance generator.
struct GenParams {
    int max_rays = 6;
    int max_cores = 6;
    int max_rules = 10;
    int max_period = 2;
    int max_offset = 3;
    int max_core_bundles = 2;
    int max_ray_bundles = 2;
    int max_exceptional = 2;
    bool symmetric = false;  // pair every rule/arc with its reverse
};

namespace gendetail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}
    // modulo keeps the stream identical across standard libraries
    int below(int n) { return n <= 1 ? 0 : static_cast<int>(eng_() % n); }
    int between(int lo, int hi) { return lo + below(hi - lo + 1); }
    bool chance(int percent) { return below(100) < percent; }

private:
    std::mt19937_64 eng_;
};

}  // namespace gendetail

/// Deterministic in the seed. Generation is biased toward presentations
/// with at least two ends and a nontrivial order between them: each piece
/// is kept only when the presentation stays valid.
inline Presentation random_instance(std::uint64_t seed, const GenParams& params = {}) {
    gendetail::Rng rng(seed);
    Presentation p;
    int n_rays = rng.between(1, params.max_rays);
    for (int i = 0; i < n_rays; ++i)
        p.rays.push_back({"r" + std::to_string(i), rng.chance(50) ? RayDir::Out : RayDir::In});
    int n_cores = rng.between(0, params.max_cores);
    for (int i = 0; i < n_cores; ++i) p.cores.push_back("c" + std::to_string(i));

    auto try_add = [&](auto&& mutate) {
        Presentation backup = p;
        mutate();
        if (!validate(p).empty()) p = backup;
    };
    auto ray_name = [&](int i) { return "r" + std::to_string(i); };
    auto core_name = [&](int i) { return "c" + std::to_string(i); };
    auto add_rule = [&](int i, int j) {
        try_add([&] {
            // equal periods keep every rule arc a constant index shift, so
            // end widths stay finite and the stabilization sweeps converge
            Index period = rng.between(1, params.max_period);
            RayRule r{ray_name(i), period, rng.between(1, params.max_offset),
                      ray_name(j), period, rng.between(1, params.max_offset)};
            p.rules.push_back(r);
            if (params.symmetric)
                p.rules.push_back({r.to_ray, r.to_period, r.to_offset, r.from_ray, r.from_period,
                                   r.from_offset});
        });
    };

    // chain bias: an order-related pair of ends
    if (n_rays >= 2 && rng.chance(70)) add_rule(rng.below(n_rays / 2), n_rays / 2 + rng.below(n_rays - n_rays / 2));
    // occasional two-ray component
    if (n_rays >= 2 && rng.chance(35)) {
        int i = rng.below(n_rays), j = rng.below(n_rays);
        if (i != j) {
            add_rule(i, j);
            add_rule(j, i);
        }
    }
    int extra_rules = rng.between(0, params.max_rules);
    for (int k = 0; k < extra_rules; ++k) add_rule(rng.below(n_rays), rng.below(n_rays));

    for (int k = rng.between(0, params.max_core_bundles); k > 0 && n_cores > 0; --k)
        try_add([&] {
            CoreToRayBundle b{core_name(rng.below(n_cores)), ray_name(rng.below(n_rays)),
                              rng.between(1, params.max_period), rng.between(1, params.max_offset)};
            p.core_bundles.push_back(b);
            if (params.symmetric)
                p.ray_bundles.push_back({b.ray, b.period, b.offset, b.core});
        });
    for (int k = rng.between(0, params.max_ray_bundles); k > 0 && n_cores > 0; --k)
        try_add([&] {
            RayToCoreBundle b{ray_name(rng.below(n_rays)), rng.between(1, params.max_period),
                              rng.between(1, params.max_offset), core_name(rng.below(n_cores))};
            p.ray_bundles.push_back(b);
            if (params.symmetric)
                p.core_bundles.push_back({b.core, b.ray, b.period, b.offset});
        });
    for (int k = 0; k + 1 < n_cores; ++k)
        if (rng.chance(40))
            try_add([&] {
                p.core_arcs.push_back({core_name(k), core_name(k + 1)});
                if (params.symmetric) p.core_arcs.push_back({core_name(k + 1), core_name(k)});
            });
    for (int k = rng.between(0, params.max_exceptional); k > 0; --k)
        try_add([&] {
            VertexRef a = VertexRef::ray(ray_name(rng.below(n_rays)), rng.between(1, 3));
            VertexRef b = n_cores > 0 && rng.chance(50)
                              ? VertexRef::core(core_name(rng.below(n_cores)))
                              : VertexRef::ray(ray_name(rng.below(n_rays)), rng.between(1, 3));
            p.exceptional_arcs.push_back({a, b});
            if (params.symmetric) p.exceptional_arcs.push_back({b, a});
        });

    p.sort_canonical();
    return p;
}

}  // namespace endmenger
