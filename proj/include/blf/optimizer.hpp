#pragma once
/**
 * @file   optimizer.hpp
 * @brief  Projected gradient descent on S^{n_X} × S^{n_Y} for the bisector fit.
 *
 * Iteration: ω ← p(ω − ρ ∇_ω J(M, L_ω)), where p rescales each coefficient
 * half back onto its unit sphere. The step size ρ is constant unless
 * backtracking is enabled.
 */

#include "bisector.hpp"
#include "core.hpp"
#include "energy.hpp"
#include "polyfield.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

namespace blf
{
    struct FitConfig
    {
        int degree_x = 3;
        int degree_y = 3;
        double step = 0.05;          ///< ρ
        int max_iters = 20000;
        double grad_tol = 1e-8;
        double energy_tol = 1e-12;   ///< stop when |ΔJ| falls below
        int restarts = 5;
        std::uint64_t rng_seed = 0;
        double epsilon_guard = 1e-12;
        bool backtracking = false;   ///< halve ρ whenever a step increases J
        bool keep_trace = false;
        std::optional<Rect> domain;  ///< plane-unit rectangle mapped to [−1, 1]²; data bounds when unset

        void validate () const
        {
            if (degree_x < 0 || degree_y < 0)
                throw InputError ("degrees must be non-negative");
            if (!(step > 0.0) || !std::isfinite (step))
                throw InputError ("step size must be positive");
            if (max_iters < 0)
                throw InputError ("max_iters must be non-negative");
            if (!(grad_tol >= 0.0) || !(energy_tol >= 0.0))
                throw InputError ("tolerances must be non-negative");
            if (restarts < 1)
                throw InputError ("restarts must be at least 1");
            if (!(epsilon_guard >= 0.0))
                throw InputError ("epsilon_guard must be non-negative");
        }
    };

    enum class StopReason
    {
        gradient,
        energy_change,
        max_iterations,
        step_underflow,
    };

    [[nodiscard]] inline const char *to_string (StopReason r) noexcept
    {
        switch (r)
        {
        case StopReason::gradient:
            return "gradient";
        case StopReason::energy_change:
            return "energy_change";
        case StopReason::step_underflow:
            return "step_underflow";
        default:
            return "max_iterations";
        }
    }

    struct FitResult
    {
        BisectorModel model;
        double final_energy = 0.0;
        double final_rmsd_on_data = 0.0;
        int iterations = 0;
        std::vector<double> trace; ///< J after each accepted iterate, starting with the initial point
        int restart_id = 0;
        StopReason stop = StopReason::max_iterations;
    };

    /// Orientation mean computed on doubled angles: ½·atan2(Σ w sin 2θ, Σ w cos 2θ).
    [[nodiscard]] inline Orientation doubled_angle_mean (const OrientationDataset &data)
    {
        double s = 0.0, c = 0.0;
        for (const auto &smp : data.samples)
        {
            s += smp.weight * std::sin (2.0 * smp.theta.value ());
            c += smp.weight * std::cos (2.0 * smp.theta.value ());
        }
        return Orientation (0.5 * std::atan2 (s, c));
    }

    /// Independent generator for one restart, derived from (seed, restart_id).
    [[nodiscard]] inline std::mt19937_64 restart_rng (std::uint64_t seed, int restart_id)
    {
        std::seed_seq seq{static_cast<std::uint32_t> (seed), static_cast<std::uint32_t> (seed >> 32), static_cast<std::uint32_t> (restart_id),
                          0x62697365u};
        return std::mt19937_64 (seq);
    }

    /// Uniform sample on the unit sphere of R^n.
    [[nodiscard]] inline std::vector<double> uniform_on_sphere (std::size_t n, std::mt19937_64 &rng)
    {
        std::normal_distribution<double> gauss (0.0, 1.0);
        for (;;)
        {
            std::vector<double> v (n);
            for (double &c : v)
                c = gauss (rng);
            if (coeff_norm (v) > 1e-8)
                return normalize (v);
        }
    }

    /**
     * Starting point of one restart.
     *
     * Restart 0 puts both fields at the constant direction θ̄ (doubled-angle mean
     * of the data), so L starts at θ̄ everywhere; later restarts draw each half
     * uniformly on its sphere.
     */
    [[nodiscard]] inline ParamPoint initialize (const OrientationDataset &data, const FitConfig &cfg, int restart_id)
    {
        if (restart_id == 0)
        {
            const double mean = data.empty () ? 0.0 : doubled_angle_mean (data).value ();
            PolyVectorField x (cfg.degree_x), y (cfg.degree_y);
            x.set (0, 0, std::cos (mean), std::sin (mean));
            y.set (0, 0, std::cos (mean), std::sin (mean));
            return project (ParamPoint{x, y});
        }
        auto rng = restart_rng (cfg.rng_seed, restart_id);
        auto cx = uniform_on_sphere (coeff_count (cfg.degree_x), rng);
        auto cy = uniform_on_sphere (coeff_count (cfg.degree_y), rng);
        return ParamPoint{PolyVectorField (cfg.degree_x, std::move (cx)), PolyVectorField (cfg.degree_y, std::move (cy))};
    }

    /// Domain transform used by fit(): the configured rectangle, or the data bounds.
    [[nodiscard]] inline DomainTransform fit_transform (const OrientationDataset &data, const FitConfig &cfg)
    {
        return DomainTransform::fit (cfg.domain ? *cfg.domain : data.bounds ());
    }

    /// One descent run from @p start. Deterministic.
    [[nodiscard]] inline FitResult descend (const EnergyEvaluator &eval, const DomainTransform &transform, ParamPoint start, const FitConfig &cfg,
                                            int restart_id = 0)
    {
        const int dx = cfg.degree_x, dy = cfg.degree_y;
        const std::size_t n = eval.parameter_count ();

        ParamPoint omega = std::move (start);
        std::vector<double> grad (n), next_grad (n), raw (n);
        double J = eval (omega, grad);
        if (!std::isfinite (J))
            throw NumericalError ("non-finite energy");

        FitResult res;
        res.restart_id = restart_id;
        if (cfg.keep_trace)
            res.trace.push_back (J);

        double total_weight = 0.0;
        for (double w : eval.weights ())
            total_weight += w;
        // ρ acts on the per-sample mean J/Σw, which has the same minimizers as J.
        double rho = cfg.step / (total_weight > 0.0 ? total_weight : 1.0);
        const double min_step = 1e-14 * rho;
        int it = 0;
        for (; it < cfg.max_iters; ++it)
        {
            if (coeff_norm (grad) < cfg.grad_tol)
            {
                res.stop = StopReason::gradient;
                break;
            }

            // Trial step, halved (for this iteration only) while it lands a sample on a field zero.
            std::optional<ParamPoint> next;
            double next_J = 0.0;
            double trial = rho;
            for (int attempt = 0; attempt <= 10 && !next; ++attempt, trial *= 0.5)
            {
                const auto w = omega.flat ();
                for (std::size_t i = 0; i < n; ++i)
                    raw[i] = w[i] - trial * grad[i];
                try
                {
                    ParamPoint cand = project (dx, dy, raw);
                    next_J = eval (cand, next_grad);
                    next = std::move (cand);
                }
                catch (const SingularPointError &)
                {
                }
            }
            if (!next)
                throw NumericalError ("sample on singular locus");
            if (!std::isfinite (next_J))
                throw NumericalError ("non-finite energy");

            // Backtracking-lite: an increase halves ρ for the rest of the run and the step is rejected.
            if (cfg.backtracking && next_J > J)
            {
                rho *= 0.5;
                if (rho < min_step)
                {
                    res.stop = StopReason::step_underflow;
                    break;
                }
                --it;
                continue;
            }

            const double change = std::abs (J - next_J);
            omega = std::move (*next);
            J = next_J;
            std::swap (grad, next_grad);
            if (cfg.keep_trace)
                res.trace.push_back (J);
            if (change < cfg.energy_tol)
            {
                ++it;
                res.stop = StopReason::energy_change;
                break;
            }
        }

        res.iterations = it;
        res.final_energy = J;
        res.model = BisectorModel (omega, transform);
        return res;
    }

    /**
     * Fit a bisector model to the dataset: `restarts` descents from seeded starts,
     * keeping the lowest (energy, restart_id). A restart that fails numerically
     * is skipped; if all fail the first failure is rethrown.
     */
    [[nodiscard]] inline FitResult fit (const OrientationDataset &data, const FitConfig &cfg)
    {
        cfg.validate ();
        data.validate ();
        const DomainTransform transform = fit_transform (data, cfg);
        const EnergyEvaluator eval (cfg.degree_x, cfg.degree_y, transform, data, cfg.epsilon_guard);

        // Restarts are independent; run them concurrently and select in restart order.
        std::vector<std::optional<FitResult>> results (static_cast<std::size_t> (cfg.restarts));
        std::vector<std::optional<NumericalError>> errors (results.size ());
        auto run = [&] (int r) {
            try
            {
                results[r] = descend (eval, transform, initialize (data, cfg, r), cfg, r);
            }
            catch (const NumericalError &e)
            {
                errors[r] = e;
            }
        };
        const unsigned workers = std::min<unsigned> (std::max (1u, std::thread::hardware_concurrency ()), results.size ());
        if (workers <= 1)
            for (int r = 0; r < cfg.restarts; ++r)
                run (r);
        else
        {
            std::atomic<int> next{0};
            std::vector<std::jthread> pool;
            for (unsigned t = 0; t < workers; ++t)
                pool.emplace_back ([&] {
                    for (int r = next++; r < cfg.restarts; r = next++)
                        run (r);
                });
        }

        std::optional<FitResult> best;
        std::optional<NumericalError> first_error;
        for (std::size_t r = 0; r < results.size (); ++r)
        {
            if (results[r] && (!best || results[r]->final_energy < best->final_energy))
                best = std::move (results[r]);
            if (errors[r] && !first_error)
                first_error = errors[r];
        }
        if (!best)
            throw *first_error;
        best->final_rmsd_on_data = rmsd (best->model, data);
        return *best;
    }
} // namespace blf
