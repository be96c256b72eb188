#pragma once
/**
 * @file   synth.hpp
 * @brief  Random ground-truth models and datasets sampled from them.
 */

#include "bisector.hpp"
#include "energy.hpp"
#include "optimizer.hpp"

#include <cstdint>
#include <random>

namespace blf
{
    /// Model with each coefficient half drawn uniformly on its sphere; evaluated on plane = normalized coordinates.
    [[nodiscard]] inline BisectorModel random_model (int degree_x, int degree_y, std::mt19937_64 &rng)
    {
        auto cx = uniform_on_sphere (coeff_count (degree_x), rng);
        auto cy = uniform_on_sphere (coeff_count (degree_y), rng);
        return BisectorModel (PolyVectorField (degree_x, std::move (cx)), PolyVectorField (degree_y, std::move (cy)));
    }

    /**
     * @p count samples at uniform positions in @p domain, with θ = L(p) + N(0, σ²) reduced mod π.
     * Positions where the model is singular are redrawn.
     */
    [[nodiscard]] inline OrientationDataset sample_model (const BisectorModel &model, std::size_t count, double noise, const Rect &domain,
                                                          std::mt19937_64 &rng)
    {
        if (count == 0)
            throw InputError ("sample count must be at least 1");
        if (!(noise >= 0.0))
            throw InputError ("noise must be non-negative");
        std::uniform_real_distribution<double> ux (domain.x0, domain.x1), uy (domain.y0, domain.y1);
        std::normal_distribution<double> gauss (0.0, 1.0);
        OrientationDataset data;
        data.samples.reserve (count);
        while (data.samples.size () < count)
        {
            const Point p{ux (rng), uy (rng)};
            const auto L = model.try_orientation_at (p);
            if (!L)
                continue;
            const double theta = noise > 0.0 ? L->value () + noise * gauss (rng) : L->value ();
            data.samples.push_back (Sample{p.x, p.y, Orientation (theta), 1.0});
        }
        return data;
    }
} // namespace blf
