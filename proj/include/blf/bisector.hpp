#pragma once
/**
 * @file   bisector.hpp
 * @brief  Bisector line field B(X, Y) of two polynomial vector fields,
 *         winding indices, and singularity extraction.
 */

#include "core.hpp"
#include "polyfield.hpp"

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace blf
{
    /// Relative guard below which a field value counts as a zero.
    inline constexpr double zero_guard = 1e-12;

    /**
     * An evaluable orientation field L = B(X, Y).
     *
     * Both fields are kept on their unit spheres; since λX and X give the same
     * direction for λ > 0, normalizing does not change the orientation field.
     * Points are given in plane units and mapped through the domain transform
     * before the polynomials are evaluated.
     */
    class BisectorModel
    {
      public:
        BisectorModel () : params_{PolyVectorField (0).set (0, 0, 1.0, 0.0), PolyVectorField (0).set (0, 0, 1.0, 0.0)} {}

        BisectorModel (PolyVectorField x_field, PolyVectorField y_field, DomainTransform transform = {})
            : params_{on_sphere (std::move (x_field)), on_sphere (std::move (y_field))}, transform_ (transform)
        {
        }

        BisectorModel (const ParamPoint &omega, DomainTransform transform) : BisectorModel (omega.x, omega.y, transform) {}

        [[nodiscard]] const PolyVectorField &x_field () const noexcept { return params_.x; }
        [[nodiscard]] const PolyVectorField &y_field () const noexcept { return params_.y; }
        [[nodiscard]] const ParamPoint &params () const noexcept { return params_; }
        [[nodiscard]] const DomainTransform &transform () const noexcept { return transform_; }

        /// Both field values at a point in plane units.
        [[nodiscard]] std::pair<Vec2, Vec2> fields_at (Point p) const
        {
            const int deg = std::max (params_.x.degree (), params_.y.degree ());
            std::vector<double> table (monomial_count (deg));
            monomials (deg, transform_.apply (p), table);
            return {params_.x.evaluate_with (table), params_.y.evaluate_with (table)};
        }

        /// B(X, Y)(p), or nothing where either field vanishes.
        [[nodiscard]] std::optional<Orientation> try_orientation_at (Point p) const
        {
            const auto [vx, vy] = fields_at (p);
            if (!(norm (vx) > zero_guard * params_.x.norm ()) || !(norm (vy) > zero_guard * params_.y.norm ()))
                return std::nullopt;
            return bisect_directions (Direction::of_vector (vx.x, vx.y), Direction::of_vector (vy.x, vy.y));
        }

        /// B(X, Y)(p). Throws SingularPointError where either field vanishes.
        [[nodiscard]] Orientation orientation_at (Point p) const
        {
            if (auto o = try_orientation_at (p))
                return *o;
            throw SingularPointError ("singular evaluation point (" + std::to_string (p.x) + ", " + std::to_string (p.y) + ")");
        }

        [[nodiscard]] Orientation operator() (Point p) const { return orientation_at (p); }

      private:
        // Already-unit vectors are kept bit-exact so stored models reload unchanged.
        static PolyVectorField on_sphere (PolyVectorField f)
        {
            if (std::abs (f.norm () - 1.0) > 1e-12)
                f.normalize ();
            return f;
        }

        ParamPoint params_;
        DomainTransform transform_;
    };

    /// A half-integer index stored as its numerator over 2.
    struct HalfIndex
    {
        int numerator = 0;

        [[nodiscard]] constexpr double value () const noexcept { return 0.5 * numerator; }
        friend constexpr bool operator== (HalfIndex, HalfIndex) noexcept = default;
    };

    template <typename F>
    concept OrientationFieldFn = std::regular_invocable<const F &, Point> && std::convertible_to<std::invoke_result_t<const F &, Point>, Orientation>;

    template <typename F>
    concept VectorFieldFn = std::regular_invocable<const F &, Point> && std::convertible_to<std::invoke_result_t<const F &, Point>, Vec2>;

    inline constexpr int default_winding_samples = 256;
    inline constexpr double winding_step_limit = 0.25 * pi;

    /**
     * Index of an orientation field around the circle of given center and radius.
     *
     * Sums d(θ_{k+1}, θ_k) over the closed loop; the total is π times twice the
     * index. Throws NumericalError("under-resolved loop") when one step reaches
     * π/4, and SingularPointError when a sample cannot be evaluated.
     */
    template <OrientationFieldFn F>
    [[nodiscard]] HalfIndex winding_index (const F &field, Point center, double radius, int samples = default_winding_samples)
    {
        if (samples < 64)
            throw InputError ("winding loop needs at least 64 samples, got " + std::to_string (samples));
        if (!(radius > 0.0))
            throw InputError ("winding loop radius must be positive");

        auto sample_at = [&] (int k) -> Orientation {
            const double t = two_pi * k / samples;
            const Point q{center.x + radius * std::cos (t), center.y + radius * std::sin (t)};
            try
            {
                return field (q);
            }
            catch (const SingularPointError &)
            {
                throw SingularPointError ("singular sample on loop");
            }
        };

        const Orientation first = sample_at (0);
        Orientation prev = first;
        double total = 0.0;
        for (int k = 1; k <= samples; ++k)
        {
            const Orientation cur = k == samples ? first : sample_at (k);
            const double step = signed_distance (cur, prev);
            if (std::abs (step) >= winding_step_limit)
                throw NumericalError ("under-resolved loop");
            total += step;
            prev = cur;
        }
        return HalfIndex{static_cast<int> (std::lround (total / pi))};
    }

    /// Poincaré index of a vector field around a circle, as a HalfIndex (numerator = 2·index).
    template <VectorFieldFn F>
    [[nodiscard]] HalfIndex vector_winding_index (const F &field, Point center, double radius, int samples = default_winding_samples)
    {
        if (samples < 64)
            throw InputError ("winding loop needs at least 64 samples, got " + std::to_string (samples));
        auto dir_at = [&] (int k) {
            const double t = two_pi * k / samples;
            const Vec2 v = field (Point{center.x + radius * std::cos (t), center.y + radius * std::sin (t)});
            if (!(norm (v) > 0.0))
                throw SingularPointError ("singular sample on loop");
            return Direction::of_vector (v.x, v.y);
        };
        const Direction first = dir_at (0);
        Direction prev = first;
        double total = 0.0;
        for (int k = 1; k <= samples; ++k)
        {
            const Direction cur = k == samples ? first : dir_at (k);
            const double step = direction_difference (cur, prev);
            if (std::abs (step) >= 2.0 * winding_step_limit)
                throw NumericalError ("under-resolved loop");
            total += step;
            prev = cur;
        }
        return HalfIndex{2 * static_cast<int> (std::lround (total / two_pi))};
    }

    enum class FieldSource
    {
        X,
        Y
    };

    [[nodiscard]] inline const char *to_string (FieldSource s) noexcept { return s == FieldSource::X ? "X" : "Y"; }

    enum class SingularityFlag
    {
        none,
        near_degenerate,  ///< |det D_p| below the threshold; index not derived from the linearization.
        coincident_zeros, ///< a zero of X and a zero of Y within merge distance.
    };

    [[nodiscard]] inline const char *to_string (SingularityFlag f) noexcept
    {
        switch (f)
        {
        case SingularityFlag::near_degenerate:
            return "near_degenerate";
        case SingularityFlag::coincident_zeros:
            return "coincident_zeros";
        default:
            return "none";
        }
    }

    struct Singularity
    {
        Point location;            ///< plane units
        HalfIndex index;           ///< ½·sign(det D_p) of the vanishing field
        FieldSource source = FieldSource::X;
        int det_sign = 0;          ///< sign of det D_p in plane units
        bool verified_by_winding = false;
        SingularityFlag flag = SingularityFlag::none;
    };

    struct SingularitySearch
    {
        int seed_grid = 32;
        int max_iterations = 50;
        double tolerance = 1e-10;   ///< Newton step size, normalized coordinates
        double merge_radius = 1e-6; ///< normalized coordinates
        double det_epsilon = 1e-10;
        bool verify_winding = false;
    };

    namespace detail
    {
        /// Newton iteration for X(u) = 0 in normalized coordinates.
        inline std::optional<Point> newton_zero (const PolyVectorField &f, Point u, const SingularitySearch &opt)
        {
            for (int it = 0; it < opt.max_iterations; ++it)
            {
                const Vec2 v = f.evaluate (u);
                const Mat2 J = f.jacobian (u);
                const double det = J.det ();
                if (det == 0.0 || !std::isfinite (det))
                    return std::nullopt;
                const double dx = (J.a22 * v.x - J.a12 * v.y) / det;
                const double dy = (-J.a21 * v.x + J.a11 * v.y) / det;
                u.x -= dx;
                u.y -= dy;
                if (!std::isfinite (u.x) || !std::isfinite (u.y) || std::abs (u.x) > 1e6 || std::abs (u.y) > 1e6)
                    return std::nullopt;
                if (std::hypot (dx, dy) < opt.tolerance)
                {
                    const Vec2 r = f.evaluate (u);
                    if (norm (r) <= 1e-8 * std::max (1.0, f.norm ()))
                        return u;
                    return std::nullopt;
                }
            }
            return std::nullopt;
        }

        inline std::vector<Point> field_zeros (const PolyVectorField &f, const Rect &seed_box, const SingularitySearch &opt)
        {
            std::vector<Point> roots;
            if (f.degree () == 0)
                return roots;
            const int n = std::max (opt.seed_grid, 1);
            for (int iy = 0; iy < n; ++iy)
            {
                for (int ix = 0; ix < n; ++ix)
                {
                    const Point seed{seed_box.x0 + (ix + 0.5) * seed_box.width () / n, seed_box.y0 + (iy + 0.5) * seed_box.height () / n};
                    const auto root = newton_zero (f, seed, opt);
                    if (!root)
                        continue;
                    const bool dup = std::any_of (roots.begin (), roots.end (),
                                                  [&] (const Point &r) { return std::hypot (r.x - root->x, r.y - root->y) <= opt.merge_radius; });
                    if (!dup)
                        roots.push_back (*root);
                }
            }
            std::sort (roots.begin (), roots.end (), [] (const Point &a, const Point &b) { return a.x != b.x ? a.x < b.x : a.y < b.y; });
            return roots;
        }

        inline int sign_of (double v) noexcept { return (v > 0.0) - (v < 0.0); }
    } // namespace detail

    /**
     * Zeros of X and of Y inside @p domain (plane units), each with its index.
     *
     * Seeds a grid of Newton iterations per field, merges duplicates, and reads
     * the index off the linearization: ½·sign(det D_p) of the vanishing field.
     * Non-generic cases are flagged rather than resolved. Output is sorted by
     * location, then source.
     */
    [[nodiscard]] inline std::vector<Singularity> find_singularities (const BisectorModel &model, const Rect &domain,
                                                                      const SingularitySearch &opt = {})
    {
        const DomainTransform &t = model.transform ();
        const Point a = t.apply ({domain.x0, domain.y0});
        const Point b = t.apply ({domain.x1, domain.y1});
        const Rect box{std::min (a.x, b.x), std::min (a.y, b.y), std::max (a.x, b.x), std::max (a.y, b.y)};
        const int orientation_sign = detail::sign_of (t.scale[0] * t.scale[1]);

        const auto zx = detail::field_zeros (model.x_field (), box, opt);
        const auto zy = detail::field_zeros (model.y_field (), box, opt);

        auto nearest_other = [&] (const Point &u) {
            double best = std::numeric_limits<double>::infinity ();
            for (const auto *set : {&zx, &zy})
                for (const Point &q : *set)
                {
                    // the point itself, and a coincident zero of the other field, are not neighbours
                    const double d = std::hypot (q.x - u.x, q.y - u.y);
                    if (d > opt.merge_radius)
                        best = std::min (best, d);
                }
            return best;
        };

        std::vector<Singularity> out;
        auto collect = [&] (const PolyVectorField &f, const PolyVectorField &other, const std::vector<Point> &roots, FieldSource src) {
            for (const Point &u : roots)
            {
                // Newton may converge just outside the seeding box.
                if (!box.contains (u))
                    continue;
                Singularity s;
                s.source = src;
                s.location = t.inverse (u);
                const double det = f.jacobian (u).det ();
                const double scale = std::max (1.0, f.norm ());
                if (std::abs (det) < opt.det_epsilon * scale)
                {
                    s.flag = SingularityFlag::near_degenerate;
                    s.det_sign = 0;
                }
                else
                {
                    s.det_sign = detail::sign_of (det) * orientation_sign;
                }
                s.index = HalfIndex{s.det_sign};

                const auto &others = src == FieldSource::X ? zy : zx;
                for (const Point &q : others)
                {
                    if (std::hypot (q.x - u.x, q.y - u.y) <= opt.merge_radius)
                    {
                        // Both fields vanish: ind = ½(ind X + ind Y) from the two linearizations.
                        s.flag = SingularityFlag::coincident_zeros;
                        s.index = HalfIndex{s.det_sign + detail::sign_of (other.jacobian (q).det ()) * orientation_sign};
                        break;
                    }
                }

                if (opt.verify_winding)
                {
                    const double sep = nearest_other (u);
                    const double r_u = std::min (0.25 * sep, 1e-2);
                    const double r_p = r_u / std::max (std::abs (t.scale[0]), std::abs (t.scale[1]));
                    for (int attempt = 0; attempt < 3; ++attempt)
                    {
                        try
                        {
                            const HalfIndex w = winding_index (model, s.location, r_p / (1 << attempt), default_winding_samples << attempt);
                            if (s.flag == SingularityFlag::near_degenerate)
                                s.index = w; // measured, since there is no linearization to read
                            s.verified_by_winding = (w == s.index);
                            break;
                        }
                        catch (const NumericalError &)
                        {
                        }
                    }
                }
                out.push_back (s);
            }
        };
        collect (model.x_field (), model.y_field (), zx, FieldSource::X);
        collect (model.y_field (), model.x_field (), zy, FieldSource::Y);

        std::sort (out.begin (), out.end (), [] (const Singularity &p, const Singularity &q) {
            if (p.location.x != q.location.x)
                return p.location.x < q.location.x;
            if (p.location.y != q.location.y)
                return p.location.y < q.location.y;
            return static_cast<int> (p.source) < static_cast<int> (q.source);
        });
        return out;
    }
} // namespace blf
