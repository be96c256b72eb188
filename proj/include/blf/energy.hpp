#pragma once
/**
 * @file   energy.hpp
 * @brief  Least-squares orientation energy J, its gradient in ω, and RMSD.
 */

#include "bisector.hpp"
#include "core.hpp"
#include "polyfield.hpp"

#include <cmath>
#include <span>
#include <string>
#include <vector>

namespace blf
{
    struct Sample
    {
        double x = 0.0;
        double y = 0.0;
        Orientation theta;
        double weight = 1.0;
    };

    /// Target orientations M(x_i, y_i) at scattered points, with optional weights.
    struct OrientationDataset
    {
        std::vector<Sample> samples;
        bool weighted = false; ///< whether weights were given explicitly (affects CSV output)

        [[nodiscard]] std::size_t size () const noexcept { return samples.size (); }
        [[nodiscard]] bool empty () const noexcept { return samples.empty (); }

        [[nodiscard]] Rect bounds () const
        {
            if (samples.empty ())
                throw InputError ("no samples");
            Rect r{samples[0].x, samples[0].y, samples[0].x, samples[0].y};
            for (const auto &s : samples)
            {
                r.x0 = std::min (r.x0, s.x);
                r.y0 = std::min (r.y0, s.y);
                r.x1 = std::max (r.x1, s.x);
                r.y1 = std::max (r.y1, s.y);
            }
            return r;
        }

        void validate () const
        {
            if (samples.empty ())
                throw InputError ("no samples");
            for (std::size_t i = 0; i < samples.size (); ++i)
            {
                const auto &s = samples[i];
                if (!std::isfinite (s.x) || !std::isfinite (s.y))
                    throw InputError ("sample " + std::to_string (i) + " has a non-finite coordinate");
                if (!(s.weight >= 0.0) || !std::isfinite (s.weight))
                    throw InputError ("sample " + std::to_string (i) + " has an invalid weight");
            }
        }
    };

    /**
     * Evaluates J(M, L_ω) and ∇_ω J for a fixed dataset and domain transform.
     *
     * Monomial tables for every sample are built once, so repeated evaluation
     * during descent costs one pass over (samples × coefficients). Sums run in
     * ascending sample order.
     */
    class EnergyEvaluator
    {
      public:
        EnergyEvaluator (int degree_x, int degree_y, const DomainTransform &transform, const OrientationDataset &data,
                         double guard = zero_guard)
            : degree_x_ (degree_x), degree_y_ (degree_y), guard_ (guard), data_ (&data)
        {
            data.validate ();
            const int deg = std::max (degree_x, degree_y);
            stride_ = monomial_count (deg);
            tables_.resize (stride_ * data.size ());
            for (std::size_t i = 0; i < data.size (); ++i)
                monomials (deg, transform.apply ({data.samples[i].x, data.samples[i].y}),
                           std::span<double> (tables_).subspan (i * stride_, stride_));
        }

        /// Per-sample weights in dataset order.
        [[nodiscard]] std::vector<double> weights () const
        {
            std::vector<double> w;
            w.reserve (data_->size ());
            for (const auto &s : data_->samples)
                w.push_back (s.weight);
            return w;
        }

        [[nodiscard]] std::size_t parameter_count () const noexcept { return coeff_count (degree_x_) + coeff_count (degree_y_); }

        /**
         * J at ω; when @p gradient is non-empty it receives ∇_ω J (X half first).
         * Throws SingularPointError carrying the sample index if a field vanishes there.
         */
        double operator() (const ParamPoint &omega, std::span<double> gradient = {}) const
        {
            check_degrees (omega);
            const bool want_grad = !gradient.empty ();
            if (want_grad)
            {
                if (gradient.size () != parameter_count ())
                    throw InputError ("gradient buffer has the wrong size");
                std::fill (gradient.begin (), gradient.end (), 0.0);
            }
            const std::size_t mx = monomial_count (degree_x_);
            const std::size_t my = monomial_count (degree_y_);
            const std::size_t off_y = coeff_count (degree_x_);
            const double eps_x = guard_ * omega.x.norm ();
            const double eps_y = guard_ * omega.y.norm ();

            double energy = 0.0;
            for (std::size_t i = 0; i < data_->size (); ++i)
            {
                const std::span<const double> m (tables_.data () + i * stride_, stride_);
                const Vec2 vx = omega.x.evaluate_with (m);
                const Vec2 vy = omega.y.evaluate_with (m);
                const double qx = vx.x * vx.x + vx.y * vx.y;
                const double qy = vy.x * vy.x + vy.y * vy.y;
                if (!(std::sqrt (qx) > eps_x) || !(std::sqrt (qy) > eps_y))
                    throw SingularPointError ("singular evaluation point at sample " + std::to_string (i), static_cast<std::ptrdiff_t> (i));

                const Sample &s = data_->samples[i];
                const Orientation L = bisect_directions (Direction::of_vector (vx.x, vx.y), Direction::of_vector (vy.x, vy.y));
                const double d = signed_distance (s.theta, L);
                energy += s.weight * d * d;
                if (!want_grad || d == 0.0)
                    continue;

                // ∇J = −2 Σ w d ∇L, ∇L = ½[(X1∇X2 − X2∇X1)/|X|² + (Y1∇Y2 − Y2∇Y1)/|Y|²].
                const double c = -2.0 * s.weight * d * 0.5;
                const double ax = c / qx;
                const double ay = c / qy;
                for (std::size_t k = 0; k < mx; ++k)
                {
                    gradient[2 * k] += ax * (-vx.y) * m[k];
                    gradient[2 * k + 1] += ax * vx.x * m[k];
                }
                for (std::size_t k = 0; k < my; ++k)
                {
                    gradient[off_y + 2 * k] += ay * (-vy.y) * m[k];
                    gradient[off_y + 2 * k + 1] += ay * vy.x * m[k];
                }
            }
            return energy;
        }

      private:
        void check_degrees (const ParamPoint &omega) const
        {
            if (omega.x.degree () != degree_x_ || omega.y.degree () != degree_y_)
                throw InputError ("parameter degrees do not match the evaluator");
        }

        int degree_x_;
        int degree_y_;
        double guard_;
        const OrientationDataset *data_;
        std::size_t stride_ = 0;
        std::vector<double> tables_;
    };

    /// J(M, L) = Σ w_i d(M(x_i, y_i), L(x_i, y_i))².
    [[nodiscard]] inline double energy (const BisectorModel &model, const OrientationDataset &data)
    {
        const EnergyEvaluator eval (model.x_field ().degree (), model.y_field ().degree (), model.transform (), data);
        return eval (model.params ());
    }

    /// ∇_ω J at the model's parameters, X coefficients first, then Y.
    [[nodiscard]] inline std::vector<double> energy_gradient (const BisectorModel &model, const OrientationDataset &data)
    {
        const EnergyEvaluator eval (model.x_field ().degree (), model.y_field ().degree (), model.transform (), data);
        std::vector<double> g (eval.parameter_count ());
        (void) eval (model.params (), g);
        return g;
    }

    /// sqrt(Σ d(a_j, b_j)² / |J|).
    [[nodiscard]] inline double rmsd (std::span<const Orientation> a, std::span<const Orientation> b)
    {
        if (a.size () != b.size ())
            throw InputError ("rmsd: length mismatch (" + std::to_string (a.size ()) + " vs " + std::to_string (b.size ()) + ")");
        if (a.empty ())
            throw InputError ("rmsd: empty point set");
        double s = 0.0;
        for (std::size_t j = 0; j < a.size (); ++j)
        {
            const double d = signed_distance (a[j], b[j]);
            s += d * d;
        }
        return std::sqrt (s / static_cast<double> (a.size ()));
    }

    /// RMSD between a model and the dataset's target orientations, at the sample points.
    [[nodiscard]] inline double rmsd (const BisectorModel &model, const OrientationDataset &data)
    {
        data.validate ();
        double s = 0.0;
        for (std::size_t i = 0; i < data.size (); ++i)
        {
            const auto &smp = data.samples[i];
            const auto L = model.try_orientation_at ({smp.x, smp.y});
            if (!L)
                throw SingularPointError ("singular evaluation point at sample " + std::to_string (i), static_cast<std::ptrdiff_t> (i));
            const double d = signed_distance (smp.theta, *L);
            s += d * d;
        }
        return std::sqrt (s / static_cast<double> (data.size ()));
    }
} // namespace blf
