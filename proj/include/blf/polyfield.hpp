#pragma once
/**
 * @file   polyfield.hpp
 * @brief  Planar polynomial vector fields with sphere-normalized coefficients.
 *
 * A field of degree n is
 *
 *     X(x, y) = Σ_{k=0..n} Σ_{j=0..k} (α_kj, β_kj) x^(k−j) y^j
 *
 * and its coefficients are stored flat, monomial by monomial in (k outer,
 * j inner) order, with the pair (α_kj, β_kj) interleaved. Monomial index
 * of (k, j) is k(k+1)/2 + j, and its scalars live at 2·index and 2·index+1.
 */

#include "core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace blf
{
    struct Point
    {
        double x = 0.0;
        double y = 0.0;

        friend constexpr bool operator== (const Point &, const Point &) noexcept = default;
    };

    /// Plane vectors share the point layout.
    using Vec2 = Point;

    [[nodiscard]] inline double norm (Vec2 v) noexcept { return std::hypot (v.x, v.y); }

    /// Row-major 2×2 matrix.
    struct Mat2
    {
        double a11 = 0.0, a12 = 0.0;
        double a21 = 0.0, a22 = 0.0;

        [[nodiscard]] constexpr double det () const noexcept { return a11 * a22 - a12 * a21; }
    };

    /// Axis-aligned rectangle [x0, x1] × [y0, y1].
    struct Rect
    {
        double x0 = -1.0, y0 = -1.0;
        double x1 = 1.0, y1 = 1.0;

        [[nodiscard]] bool contains (Point p) const noexcept { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
        [[nodiscard]] double width () const noexcept { return x1 - x0; }
        [[nodiscard]] double height () const noexcept { return y1 - y0; }
    };

    [[nodiscard]] constexpr std::size_t monomial_count (int degree) noexcept
    {
        const auto n = static_cast<std::size_t> (degree);
        return (n + 1) * (n + 2) / 2;
    }

    /// Number of scalars (α and β together) for a field of the given degree.
    [[nodiscard]] constexpr std::size_t coeff_count (int degree) noexcept { return 2 * monomial_count (degree); }

    [[nodiscard]] constexpr std::size_t monomial_index (int k, int j) noexcept
    {
        return static_cast<std::size_t> (k) * static_cast<std::size_t> (k + 1) / 2 + static_cast<std::size_t> (j);
    }

    /**
     * Values of all monomials x^(k−j) y^j up to @p degree at @p p, in the
     * canonical flattening order. @p out must hold monomial_count(degree) entries.
     */
    inline void monomials (int degree, Point p, std::span<double> out)
    {
        std::array<double, 32> xp{}, yp{};
        std::vector<double> xs, ys;
        double *px = xp.data ();
        double *py = yp.data ();
        if (degree + 1 > static_cast<int> (xp.size ()))
        {
            xs.resize (static_cast<std::size_t> (degree) + 1);
            ys.resize (static_cast<std::size_t> (degree) + 1);
            px = xs.data ();
            py = ys.data ();
        }
        px[0] = py[0] = 1.0;
        for (int i = 1; i <= degree; ++i)
        {
            px[i] = px[i - 1] * p.x;
            py[i] = py[i - 1] * p.y;
        }
        std::size_t idx = 0;
        for (int k = 0; k <= degree; ++k)
            for (int j = 0; j <= k; ++j)
                out[idx++] = px[k - j] * py[j];
    }

    /// Spatial partial derivatives of every monomial, same layout as monomials().
    inline void monomial_derivatives (int degree, Point p, std::span<double> d_dx, std::span<double> d_dy)
    {
        std::vector<double> px (static_cast<std::size_t> (degree) + 1), py (static_cast<std::size_t> (degree) + 1);
        px[0] = py[0] = 1.0;
        for (int i = 1; i <= degree; ++i)
        {
            px[i] = px[i - 1] * p.x;
            py[i] = py[i - 1] * p.y;
        }
        std::size_t idx = 0;
        for (int k = 0; k <= degree; ++k)
        {
            for (int j = 0; j <= k; ++j, ++idx)
            {
                const int ex = k - j;
                d_dx[idx] = ex > 0 ? ex * px[ex - 1] * py[j] : 0.0;
                d_dy[idx] = j > 0 ? j * px[ex] * py[j - 1] : 0.0;
            }
        }
    }

    /// Euclidean norm of a coefficient vector.
    [[nodiscard]] inline double coeff_norm (std::span<const double> coeffs) noexcept
    {
        double s = 0.0;
        for (double c : coeffs)
            s += c * c;
        return std::sqrt (s);
    }

    /// Divide by the Euclidean norm. Throws NumericalError for a zero vector.
    [[nodiscard]] inline std::vector<double> normalize (std::span<const double> coeffs)
    {
        const double n = coeff_norm (coeffs);
        if (!(n > 0.0) || !std::isfinite (n))
            throw NumericalError ("degenerate parameter: zero coefficient vector");
        std::vector<double> out (coeffs.begin (), coeffs.end ());
        for (double &c : out)
            c /= n;
        return out;
    }

    /// ∂(v1, v2)/∂(coefficient) at a point; each row has coeff_count(degree) entries.
    struct CoeffJacobian
    {
        std::vector<double> d_v1;
        std::vector<double> d_v2;
    };

    class PolyVectorField
    {
      public:
        PolyVectorField () : PolyVectorField (0) {}

        /// Zero field of the given degree.
        explicit PolyVectorField (int degree) : degree_ (checked_degree (degree)), coeffs_ (coeff_count (degree_), 0.0) {}

        PolyVectorField (int degree, std::vector<double> coeffs) : degree_ (checked_degree (degree)), coeffs_ (std::move (coeffs))
        {
            if (coeffs_.size () != coeff_count (degree_))
                throw InputError ("coefficient count " + std::to_string (coeffs_.size ()) + " does not match degree " +
                                  std::to_string (degree_) + " (expected " + std::to_string (coeff_count (degree_)) + ")");
        }

        [[nodiscard]] int degree () const noexcept { return degree_; }
        [[nodiscard]] std::span<const double> coeffs () const noexcept { return coeffs_; }
        [[nodiscard]] std::span<double> coeffs () noexcept { return coeffs_; }

        [[nodiscard]] double alpha (int k, int j) const { return coeffs_.at (2 * monomial_index (k, j)); }
        [[nodiscard]] double beta (int k, int j) const { return coeffs_.at (2 * monomial_index (k, j) + 1); }

        /// Set the coefficient pair multiplying x^(k−j) y^j.
        PolyVectorField &set (int k, int j, double alpha, double beta)
        {
            const std::size_t i = 2 * monomial_index (k, j);
            coeffs_.at (i) = alpha;
            coeffs_.at (i + 1) = beta;
            return *this;
        }

        [[nodiscard]] double norm () const noexcept { return coeff_norm (coeffs_); }

        /// Scale onto the unit sphere of the coefficient space.
        PolyVectorField &normalize ()
        {
            coeffs_ = blf::normalize (coeffs_);
            return *this;
        }

        [[nodiscard]] PolyVectorField normalized () const
        {
            PolyVectorField f = *this;
            f.normalize ();
            return f;
        }

        /// Value from a precomputed monomial table (see monomials()).
        [[nodiscard]] Vec2 evaluate_with (std::span<const double> table) const noexcept
        {
            double v1 = 0.0, v2 = 0.0;
            const std::size_t m = monomial_count (degree_);
            for (std::size_t i = 0; i < m; ++i)
            {
                v1 += coeffs_[2 * i] * table[i];
                v2 += coeffs_[2 * i + 1] * table[i];
            }
            return {v1, v2};
        }

        [[nodiscard]] Vec2 evaluate (Point p) const
        {
            std::vector<double> table (monomial_count (degree_));
            monomials (degree_, p, table);
            return evaluate_with (table);
        }

        /// The map is linear in the coefficients, so the result does not depend on them.
        [[nodiscard]] CoeffJacobian coeff_gradient (Point p) const
        {
            std::vector<double> table (monomial_count (degree_));
            monomials (degree_, p, table);
            CoeffJacobian out{std::vector<double> (coeffs_.size (), 0.0), std::vector<double> (coeffs_.size (), 0.0)};
            for (std::size_t i = 0; i < table.size (); ++i)
            {
                out.d_v1[2 * i] = table[i];
                out.d_v2[2 * i + 1] = table[i];
            }
            return out;
        }

        /// Spatial Jacobian D_p X.
        [[nodiscard]] Mat2 jacobian (Point p) const
        {
            const std::size_t m = monomial_count (degree_);
            std::vector<double> dx (m), dy (m);
            monomial_derivatives (degree_, p, dx, dy);
            Mat2 J;
            for (std::size_t i = 0; i < m; ++i)
            {
                J.a11 += coeffs_[2 * i] * dx[i];
                J.a12 += coeffs_[2 * i] * dy[i];
                J.a21 += coeffs_[2 * i + 1] * dx[i];
                J.a22 += coeffs_[2 * i + 1] * dy[i];
            }
            return J;
        }

      private:
        static int checked_degree (int degree)
        {
            if (degree < 0)
                throw InputError ("polynomial degree must be non-negative, got " + std::to_string (degree));
            return degree;
        }

        int degree_;
        std::vector<double> coeffs_;
    };

    /// ω: the coefficient pair of (X_ω, Y_ω), each half on its own unit sphere.
    struct ParamPoint
    {
        PolyVectorField x;
        PolyVectorField y;

        [[nodiscard]] std::size_t size () const noexcept { return x.coeffs ().size () + y.coeffs ().size (); }

        /// Concatenated coefficients, X half first.
        [[nodiscard]] std::vector<double> flat () const
        {
            std::vector<double> out (x.coeffs ().begin (), x.coeffs ().end ());
            out.insert (out.end (), y.coeffs ().begin (), y.coeffs ().end ());
            return out;
        }
    };

    /**
     * p(ω₁, ω₂) = (ω₁/‖ω₁‖, ω₂/‖ω₂‖) for a raw concatenated vector.
     * Throws NumericalError when either half is zero.
     */
    [[nodiscard]] inline ParamPoint project (int degree_x, int degree_y, std::span<const double> raw)
    {
        const std::size_t nx = coeff_count (degree_x);
        const std::size_t ny = coeff_count (degree_y);
        if (raw.size () != nx + ny)
            throw InputError ("parameter vector has " + std::to_string (raw.size ()) + " entries, expected " + std::to_string (nx + ny));
        return ParamPoint{PolyVectorField (degree_x, normalize (raw.first (nx))), PolyVectorField (degree_y, normalize (raw.subspan (nx)))};
    }

    [[nodiscard]] inline ParamPoint project (const ParamPoint &omega)
    {
        return ParamPoint{omega.x.normalized (), omega.y.normalized ()};
    }

    /**
     * Affine map from plane units (e.g. pixels) to the normalized coordinates
     * the polynomials are evaluated in: u = scale ⊙ p + offset.
     */
    struct DomainTransform
    {
        std::array<double, 2> scale{1.0, 1.0};
        std::array<double, 2> offset{0.0, 0.0};

        [[nodiscard]] Point apply (Point p) const noexcept { return {scale[0] * p.x + offset[0], scale[1] * p.y + offset[1]}; }
        [[nodiscard]] Point inverse (Point u) const noexcept { return {(u.x - offset[0]) / scale[0], (u.y - offset[1]) / scale[1]}; }

        /// Rectangle in plane units that maps onto [−1, 1]².
        [[nodiscard]] Rect unit_domain () const noexcept
        {
            const Point a = inverse ({-1.0, -1.0});
            const Point b = inverse ({1.0, 1.0});
            return {std::min (a.x, b.x), std::min (a.y, b.y), std::max (a.x, b.x), std::max (a.y, b.y)};
        }

        /// Map @p r onto [−1, 1]²; a degenerate extent keeps unit scale and only recenters.
        [[nodiscard]] static DomainTransform fit (const Rect &r) noexcept
        {
            DomainTransform t;
            const double w = r.x1 - r.x0;
            const double h = r.y1 - r.y0;
            t.scale[0] = w > 0.0 ? 2.0 / w : 1.0;
            t.scale[1] = h > 0.0 ? 2.0 / h : 1.0;
            t.offset[0] = -t.scale[0] * 0.5 * (r.x0 + r.x1);
            t.offset[1] = -t.scale[1] * 0.5 * (r.y0 + r.y1);
            return t;
        }

        friend bool operator== (const DomainTransform &, const DomainTransform &) = default;
    };
} // namespace blf
