#pragma once
/**
 * @file   render.hpp
 * @brief  Phase maps, line-field overlays, and singularity markers.
 */

#include "bisector.hpp"
#include "core.hpp"
#include "image.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <vector>

namespace blf
{
    struct RenderSpec
    {
        int width = 256;
        int height = 256;
        Rect domain;              ///< plane-unit rectangle covered by the image
        int line_stride = 8;      ///< pixels between overlay segments
        double line_length = 6.0; ///< pixels
        bool mark_singularities = false;

        void validate () const
        {
            if (width <= 0 || height <= 0 || line_stride <= 0 || !(line_length > 0.0))
                throw InputError ("render dimensions must be positive");
            if (!(domain.width () > 0.0) || !(domain.height () > 0.0))
                throw InputError ("render domain must have positive extent");
        }

        /// Plane point under the continuous pixel coordinate (px, py); pixel (i, j) spans [i, i+1) × [j, j+1).
        [[nodiscard]] Point to_plane (double px, double py) const noexcept
        {
            return {domain.x0 + px * domain.width () / width, domain.y0 + py * domain.height () / height};
        }

        [[nodiscard]] Point to_pixel (Point p) const noexcept
        {
            return {(p.x - domain.x0) * width / domain.width (), (p.y - domain.y0) * height / domain.height ()};
        }
    };

    /// Gray level of the pixels where the field cannot be evaluated.
    inline constexpr std::uint8_t singular_gray = 128;

    template <typename F>
    concept PartialOrientationFieldFn = std::regular_invocable<const F &, Point> &&
                                        std::convertible_to<std::invoke_result_t<const F &, Point>, std::optional<Orientation>>;

    /// Field adaptor for models: nothing at zeros of X or Y.
    [[nodiscard]] inline auto partial_field (const BisectorModel &model)
    {
        return [&model] (Point p) { return model.try_orientation_at (p); };
    }

    [[nodiscard]] inline std::uint8_t phase_gray (Orientation theta) noexcept
    {
        return static_cast<std::uint8_t> (std::lround (255.0 * theta.value () / pi));
    }

    /// Gray level round(255·θ/π) at each pixel center: black at 0, white towards π.
    template <PartialOrientationFieldFn F>
    [[nodiscard]] GrayImage phase_map (const F &field, const RenderSpec &spec)
    {
        spec.validate ();
        GrayImage img (spec.width, spec.height);
        for (int j = 0; j < spec.height; ++j)
            for (int i = 0; i < spec.width; ++i)
            {
                const std::optional<Orientation> theta = field (spec.to_plane (i + 0.5, j + 0.5));
                img.at (i, j) = theta ? phase_gray (*theta) : singular_gray;
            }
        return img;
    }

    /// Ring markers at singularities: white for positive index, black otherwise.
    inline void mark_singularities (GrayImage &img, const std::vector<Singularity> &sings, const RenderSpec &spec, double radius = 3.0)
    {
        for (const Singularity &s : sings)
        {
            const Point c = spec.to_pixel (s.location);
            const std::uint8_t ink = s.index.numerator > 0 ? 255 : 0;
            const int r = static_cast<int> (std::ceil (radius)) + 1;
            for (int j = static_cast<int> (c.y) - r; j <= static_cast<int> (c.y) + r; ++j)
                for (int i = static_cast<int> (c.x) - r; i <= static_cast<int> (c.x) + r; ++i)
                {
                    if (i < 0 || j < 0 || i >= img.width || j >= img.height)
                        continue;
                    const double d = std::hypot (i + 0.5 - c.x, j + 0.5 - c.y);
                    if (std::abs (d - radius) <= 0.75)
                        img.at (i, j) = ink;
                }
        }
    }

    namespace detail
    {
        inline double segment_distance (Point q, Point a, Point b) noexcept
        {
            const double vx = b.x - a.x, vy = b.y - a.y;
            const double len2 = vx * vx + vy * vy;
            double t = len2 > 0.0 ? ((q.x - a.x) * vx + (q.y - a.y) * vy) / len2 : 0.0;
            t = std::clamp (t, 0.0, 1.0);
            return std::hypot (q.x - (a.x + t * vx), q.y - (a.y + t * vy));
        }

        /// One-pixel-wide black segment, coverage from distance to the pixel center.
        inline void draw_segment (GrayImage &img, Point a, Point b)
        {
            const int x0 = std::max (0, static_cast<int> (std::floor (std::min (a.x, b.x) - 2.0)));
            const int x1 = std::min (img.width - 1, static_cast<int> (std::ceil (std::max (a.x, b.x) + 2.0)));
            const int y0 = std::max (0, static_cast<int> (std::floor (std::min (a.y, b.y) - 2.0)));
            const int y1 = std::min (img.height - 1, static_cast<int> (std::ceil (std::max (a.y, b.y) + 2.0)));
            for (int j = y0; j <= y1; ++j)
                for (int i = x0; i <= x1; ++i)
                {
                    const double cover = std::clamp (1.0 - segment_distance ({i + 0.5, j + 0.5}, a, b), 0.0, 1.0);
                    if (cover > 0.0)
                        img.at (i, j) = static_cast<std::uint8_t> (std::lround (img.at (i, j) * (1.0 - cover)));
                }
        }
    } // namespace detail

    /**
     * Short anti-aliased segments along the field on a stride grid, over the
     * background (white when none). The background must match the spec size.
     */
    template <PartialOrientationFieldFn F>
    [[nodiscard]] GrayImage line_overlay (const F &field, const RenderSpec &spec, const GrayImage *background = nullptr)
    {
        spec.validate ();
        GrayImage img = background ? *background : GrayImage (spec.width, spec.height, 255);
        if (img.width != spec.width || img.height != spec.height)
            throw InputError ("overlay background size does not match the render size");

        const double sx = spec.width / spec.domain.width ();
        const double sy = spec.height / spec.domain.height ();
        const double half = 0.5 * spec.line_length;
        for (int cy = spec.line_stride / 2; cy < spec.height; cy += spec.line_stride)
            for (int cx = spec.line_stride / 2; cx < spec.width; cx += spec.line_stride)
            {
                const Point c{cx + 0.5, cy + 0.5};
                const std::optional<Orientation> theta = field (spec.to_plane (c.x, c.y));
                if (!theta)
                    continue;
                // plane direction mapped to pixel space
                double dx = std::cos (theta->value ()) * sx;
                double dy = std::sin (theta->value ()) * sy;
                const double n = std::hypot (dx, dy);
                dx *= half / n;
                dy *= half / n;
                detail::draw_segment (img, {c.x - dx, c.y - dy}, {c.x + dx, c.y + dy});
            }
        return img;
    }
} // namespace blf
