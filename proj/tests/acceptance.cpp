// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
//
// Usage: acceptance [criterion ...]   (default: all of 1–9)

#include "test_support.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace blf;

namespace
{
    struct Outcome
    {
        bool pass;
        std::string detail;
    };

    class Stopwatch
    {
      public:
        [[nodiscard]] double seconds () const { return std::chrono::duration<double> (std::chrono::steady_clock::now () - start_).count (); }

      private:
        std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now ();
    };

    std::string fmt (const char *f, auto... args)
    {
        char buf[512];
        std::snprintf (buf, sizeof buf, f, args...);
        return buf;
    }

    /// RMSD between two models on an n×n grid of pixel centers over the rectangle; singular points of either are skipped.
    double grid_rmsd (const BisectorModel &a, const BisectorModel &b, const Rect &r = {}, int n = 64)
    {
        std::vector<Orientation> u, v;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                const Point p{r.x0 + (i + 0.5) * r.width () / n, r.y0 + (j + 0.5) * r.height () / n};
                const auto x = a.try_orientation_at (p), y = b.try_orientation_at (p);
                if (x && y)
                {
                    u.push_back (*x);
                    v.push_back (*y);
                }
            }
        return rmsd (u, v);
    }

    double mean (const std::vector<double> &v) { return std::accumulate (v.begin (), v.end (), 0.0) / static_cast<double> (v.size ()); }

    double stddev (const std::vector<double> &v)
    {
        const double m = mean (v);
        double s = 0.0;
        for (double x : v)
            s += (x - m) * (x - m);
        return std::sqrt (s / static_cast<double> (v.size () - 1));
    }

    // ------------------------------------------------------------------ 1

    Outcome distance_law ()
    {
        Stopwatch sw;
        constexpr int n = 100;
        std::vector<double> grid;
        for (int i = 0; i < n; ++i)
            grid.push_back (Orientation (pi * i / n).value ());
        // exact boundary pairs: |δ| = π/2 bitwise
        std::vector<std::pair<double, double>> boundary{{half_pi, 0.0}, {0.0, half_pi}};

        int pairs = 0, mismatches = 0, boundary_hits = 0, boundary_bad = 0;
        auto check = [&] (double a, double b) {
            ++pairs;
            const double got = signed_distance (Orientation (a), Orientation (b));
            const double delta = a - b;
            if (std::abs (delta) == half_pi)
            {
                ++boundary_hits;
                boundary_bad += got != delta; // tie rule: first branch
            }
            else
                mismatches += got != test::argmin_distance (a, b);
        };
        for (double a : grid)
            for (double b : grid)
                check (a, b);
        for (auto [a, b] : boundary)
            check (a, b);
        const double t = sw.seconds ();
        return {mismatches == 0 && boundary_bad == 0 && t < 1.0,
                fmt ("%d pairs, %d branch mismatches, %d/%d boundary ties off the first branch, %.3f s (limit 1 s)", pairs, mismatches, boundary_bad,
                     boundary_hits, t)};
    }

    // ------------------------------------------------------------------ 2

    Outcome gradient_fidelity ()
    {
        Stopwatch sw;
        std::mt19937_64 rng (2002);
        std::uniform_int_distribution<int> deg (0, 3);
        std::uniform_real_distribution<double> off (-1.3, 1.3);
        const double h = 1e-6;
        double worst = 0.0;
        for (int problem = 0; problem < 100; ++problem)
        {
            const int dx = deg (rng), dy = deg (rng);
            const auto model = random_model (dx, dy, rng);
            // targets within ±1.3 rad of the model keep every d away from its ±π/2 branch switch
            OrientationDataset data;
            while (data.size () < 50)
            {
                const Point p = test::random_point (rng);
                const auto [vx, vy] = model.fields_at (p);
                if (norm (vx) < 0.05 || norm (vy) < 0.05)
                    continue;
                data.samples.push_back (Sample{p.x, p.y, Orientation (model.orientation_at (p).value () + off (rng)), 1.0});
            }
            const auto g = energy_gradient (model, data);
            const EnergyEvaluator ev (dx, dy, model.transform (), data);
            const auto base = model.params ().flat ();
            const std::size_t nx = coeff_count (dx);
            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < base.size (); ++i)
            {
                auto at = [&] (double delta) {
                    auto w = base;
                    w[i] += delta;
                    return ev (ParamPoint{PolyVectorField (dx, {w.begin (), w.begin () + nx}), PolyVectorField (dy, {w.begin () + nx, w.end ()})});
                };
                const double fd = (at (h) - at (-h)) / (2 * h);
                err = std::max (err, std::abs (fd - g[i]));
                scale = std::max (scale, std::abs (g[i]));
            }
            worst = std::max (worst, err / scale);
        }
        const double t = sw.seconds ();
        return {worst < 1e-6 && t < 30.0, fmt ("100 problems, max relative error %.3e (limit 1e-6; error and scale are max-norms over the gradient), %.2f s (limit 30 s)", worst, t)};
    }

    // ------------------------------------------------------------------ 3

    Outcome index_identities ()
    {
        Stopwatch sw;
        std::mt19937_64 rng (3003);
        std::normal_distribution<double> g (0.0, 1.0);
        std::uniform_real_distribution<double> small (-0.3, 0.3);
        int configs = 0, additivity = 0, linearization = 0, located = 0;
        while (configs < 200)
        {
            // vanishing field: A(p − z) plus random quadratic terms centred on z
            const double a = g (rng), b = g (rng), c = g (rng), d = g (rng);
            const double det = a * d - b * c;
            if (std::abs (det) < 0.2)
                continue;
            const Point z = test::random_point (rng, -0.6, 0.6);
            PolyVectorField v (2);
            const double q[6] = {small (rng), small (rng), small (rng), small (rng), small (rng), small (rng)};
            // expand A(p−z) + Q(p−z) in monomials of p
            const double zx = z.x, zy = z.y;
            auto quad = [&] (int comp, double cxx, double cxy, double cyy) {
                // cxx (x−zx)² + cxy (x−zx)(y−zy) + cyy (y−zy)²
                std::array<double, 6> m{};
                m[0] = cxx * zx * zx + cxy * zx * zy + cyy * zy * zy;
                m[1] = -2.0 * cxx * zx - cxy * zy;
                m[2] = -cxy * zx - 2.0 * cyy * zy;
                m[3] = cxx;
                m[4] = cxy;
                m[5] = cyy;
                (void) comp;
                return m;
            };
            const auto q1 = quad (0, q[0], q[1], q[2]), q2 = quad (1, q[3], q[4], q[5]);
            v.set (0, 0, -(a * zx + b * zy) + q1[0], -(c * zx + d * zy) + q2[0]);
            v.set (1, 0, a + q1[1], c + q2[1]);
            v.set (1, 1, b + q1[2], d + q2[2]);
            v.set (2, 0, q1[3], q2[3]);
            v.set (2, 1, q1[4], q2[4]);
            v.set (2, 2, q1[5], q2[5]);

            // the other field: a random linear field kept well away from zero near z
            PolyVectorField w = test::random_field (1, rng);
            if (norm (w.evaluate (z)) < 0.3 * w.norm ())
                continue;
            const bool in_x = configs % 2 == 0;
            const BisectorModel model = in_x ? BisectorModel (v, w) : BisectorModel (w, v);
            // quadratic terms can add zeros; keep configurations whose zero at z is isolated within the loop
            const double r = 0.01;
            const int ind_v = vector_winding_index ([&] (Point p) { return v.evaluate (p); }, z, r).numerator / 2;
            const int ind_w = vector_winding_index ([&] (Point p) { return w.evaluate (p); }, z, r).numerator / 2;
            ++configs;

            const HalfIndex ind_b = winding_index (model, z, r);
            additivity += ind_b.numerator == ind_v + ind_w; // ind B = ½(ind X + ind Y)
            const int det_sign = v.jacobian (z).det () > 0.0 ? 1 : -1;
            linearization += ind_b.numerator == det_sign; // ind B = ½ sign(det D_p)

            // and the singularity search finds it with the same index
            for (const auto &s : find_singularities (model, {z.x - 0.05, z.y - 0.05, z.x + 0.05, z.y + 0.05}))
                if (std::hypot (s.location.x - z.x, s.location.y - z.y) < 1e-8 && s.index.numerator == ind_b.numerator &&
                    s.source == (in_x ? FieldSource::X : FieldSource::Y))
                {
                    ++located;
                    break;
                }
        }
        const double t = sw.seconds ();
        return {additivity == configs && linearization == configs && located == configs && t < 60.0,
                fmt ("%d configurations: additivity %d/%d, linearization %d/%d, located by search %d/%d, %.2f s (limit 60 s)", configs, additivity,
                     configs, linearization, configs, located, configs, t)};
    }

    // ------------------------------------------------------------------ 4

    Outcome recovery_oracle ()
    {
        Stopwatch sw;
        int ok = 0;
        std::ostringstream per_seed;
        for (std::uint64_t seed = 0; seed < 10; ++seed)
        {
            std::mt19937_64 rng (seed);
            const auto truth = random_model (2, 2, rng);
            const auto data = sample_model (truth, 100, 0.0, Rect{}, rng);
            FitConfig cfg;
            cfg.degree_x = cfg.degree_y = 3;
            cfg.restarts = 5;
            cfg.rng_seed = seed;
            cfg.domain = Rect{};
            cfg.step = 1.0;
            cfg.backtracking = true;
            cfg.max_iters = 300000;
            const auto res = fit (data, cfg);
            const double g = grid_rmsd (res.model, truth);
            ok += g < 1e-3;
            per_seed << (seed ? " " : "") << fmt ("%.1e", g);
        }
        const double t = sw.seconds ();
        return {ok >= 9 && t < 300.0, fmt ("%d/10 seeds below 1e-3 grid RMSD (need 9) [%s], %.1f s (limit 300 s)", ok, per_seed.str ().c_str (), t)};
    }

    // ------------------------------------------------------------------ 5

    /// Loop-like target: a +½ core (source in X) above a −½ delta (saddle in Y), with mild curvature.
    BisectorModel loop_target ()
    {
        const Point core{-0.1, -0.35}, delta{0.3, 0.55};
        PolyVectorField x = test::linear_field (1.0, 0.0, 0.0, 1.0, core);
        PolyVectorField y = test::linear_field (1.0, 0.0, 0.0, -1.0, delta);
        PolyVectorField xc (2), yc (2);
        for (int k = 0; k <= 1; ++k)
            for (int j = 0; j <= k; ++j)
            {
                xc.set (k, j, x.alpha (k, j), x.beta (k, j));
                yc.set (k, j, y.alpha (k, j), y.beta (k, j));
            }
        xc.set (2, 0, 0.15, 0.0);
        yc.set (2, 2, 0.0, 0.1);
        return BisectorModel (xc, yc);
    }

    /// Dense sample of the target on a grid: the pool the scarce datasets are drawn from.
    OrientationDataset target_pool (const BisectorModel &target, int n, double noise, std::uint64_t seed)
    {
        std::mt19937_64 rng (seed);
        std::normal_distribution<double> gauss (0.0, noise > 0.0 ? noise : 1.0);
        OrientationDataset pool;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
            {
                const Point p{-1.0 + (i + 0.5) * 2.0 / n, -1.0 + (j + 0.5) * 2.0 / n};
                const auto theta = target.try_orientation_at (p);
                if (!theta)
                    continue;
                pool.samples.push_back (Sample{p.x, p.y, Orientation (theta->value () + (noise > 0.0 ? gauss (rng) : 0.0)), 1.0});
            }
        return pool;
    }

    Outcome table_trend ()
    {
        Stopwatch sw;
        const auto target = loop_target ();
        const auto pool = target_pool (target, 64, 0.0, 0);
        std::vector<double> means, sds;
        std::string detail;
        for (std::size_t size : {10u, 20u, 40u, 80u})
        {
            std::vector<double> r;
            for (std::uint64_t trial = 0; trial < 10; ++trial)
            {
                const auto data = subsample (pool, size, 1000 * size + trial);
                FitConfig cfg; // paper-style: constant step, defaults
                cfg.rng_seed = trial;
                cfg.domain = Rect{};
                r.push_back (grid_rmsd (fit (data, cfg).model, target));
            }
            means.push_back (mean (r));
            sds.push_back (stddev (r));
            detail += fmt ("|I|=%zu mean %.3e sd %.3e; ", size, means.back (), sds.back ());
        }
        bool decreasing = true;
        for (std::size_t i = 1; i < means.size (); ++i)
            decreasing = decreasing && means[i] < means[i - 1];
        const bool narrows = sds.back () < sds.front ();
        const double t = sw.seconds ();
        return {decreasing && narrows && t < 900.0,
                detail + fmt ("mean strictly decreasing: %s, sd(80) < sd(10): %s, %.1f s (limit 900 s)", decreasing ? "yes" : "no", narrows ? "yes" : "no", t)};
    }

    // ------------------------------------------------------------------ 6

    Outcome pseudo_metric ()
    {
        Stopwatch sw;
        std::mt19937_64 rng (6006);
        // a fixed point set and orientation assignments given by random models
        std::vector<Point> pts;
        for (int i = 0; i < 50; ++i)
            pts.push_back (test::random_point (rng));
        auto assignment = [&] () {
            for (;;)
            {
                const auto m = random_model (2, 2, rng);
                OrientationDataset d;
                bool ok = true;
                for (const Point &p : pts)
                {
                    const auto th = m.try_orientation_at (p);
                    ok = ok && th.has_value ();
                    if (ok)
                        d.samples.push_back (Sample{p.x, p.y, *th, 1.0});
                }
                if (ok)
                    return std::pair{m, d};
            }
        };
        int symmetry = 0, triangle = 0;
        for (int t = 0; t < 1000; ++t)
        {
            const auto [ma, da] = assignment ();
            const auto [mb, db] = assignment ();
            const auto [mc, dc] = assignment ();
            // J(A, B) = J(M = A, L = B)
            const double ab = std::sqrt (energy (mb, da)), ba = std::sqrt (energy (ma, db));
            const double bc = std::sqrt (energy (mc, db)), ac = std::sqrt (energy (mc, da));
            symmetry += std::abs (ab - ba) > 1e-12;
            triangle += ac > ab + bc + 1e-12;
        }
        return {symmetry == 0 && triangle == 0,
                fmt ("1000 triples, %d symmetry and %d triangle violations beyond 1e-12, %.2f s", symmetry, triangle, sw.seconds ())};
    }

    // ------------------------------------------------------------------ 7

    Outcome extraction_sanity ()
    {
        Stopwatch sw;
        const int size = 128;
        const double period = 14.0, margin = 8.0;
        double worst = 0.0, worst_rot = 0.0;
        int blocks = 0;
        std::vector<ExtractionResult> results;
        for (int k = 0; k < 16; ++k)
        {
            const double phi = pi * k / 16.0;
            results.push_back (extract_orientation_field (test::stripes (size, size, phi, period)));
            for (const auto &s : results.back ().data.samples)
                if (s.x >= margin && s.y >= margin && s.x <= size - 1 - margin && s.y <= size - 1 - margin)
                {
                    worst = std::max (worst, std::abs (signed_distance (s.theta, Orientation (phi))));
                    ++blocks;
                }
        }
        // rotation consistency: the pattern rotated by k·π/16 moves every block orientation by k·π/16
        const auto &base = results.front ().data.samples;
        for (int k = 1; k < 16; ++k)
            for (const auto &s : results[k].data.samples)
                for (const auto &b : base)
                    if (b.x == s.x && b.y == s.y && s.x >= margin && s.y >= margin && s.x <= size - 1 - margin && s.y <= size - 1 - margin)
                        worst_rot = std::max (worst_rot, std::abs (signed_distance (s.theta, Orientation (b.theta.value () + pi * k / 16.0))));
        const double t = sw.seconds ();
        return {worst < 0.03 && worst_rot < 0.03 && t < 10.0,
                fmt ("16 angles, %d interior blocks, max error %.4f rad, max rotation inconsistency %.4f rad (limit 0.03), %.2f s (limit 10 s)", blocks,
                     worst, worst_rot, t)};
    }

    // ------------------------------------------------------------------ 8

    /// Runs the CLI inside `dir` so that identical flags (relative paths) reach both runs.
    int run (const std::filesystem::path &dir, const std::string &args, const std::string &stdout_path = "/dev/null")
    {
        const std::string cmd = "cd '" + dir.string () + "' && " + std::string (BLF_CLI_PATH) + " " + args + " > " + stdout_path + " 2>/dev/null";
        return std::system (cmd.c_str ());
    }

    Outcome end_to_end_determinism ()
    {
        Stopwatch sw;
        const auto root = test::scratch_dir ("acceptance-e2e");
        // concentric ridges around an off-center point: a whorl-like input
        GrayImage img (96, 80);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                img.at (x, y) = static_cast<std::uint8_t> (std::lround (128.0 + 90.0 * std::cos (two_pi * std::hypot (x - 41.0, y - 37.0) / 11.0)));

        const std::vector<std::string> outputs{"data.csv", "mask.pgm", "model.json", "eval.json", "phase.png", "overlay.png", "sings.json"};
        int failures = 0;
        for (const char *run_dir : {"a", "b"})
        {
            const auto d = root / run_dir;
            std::filesystem::create_directories (d);
            write_image (img, (d / "input.pgm").string ());
            failures += run (d, "extract --image input.pgm --out data.csv --mask-out mask.pgm") != 0;
            failures += run (d, "fit --data data.csv --out model.json --seed 7 --iters 2000 --restarts 3") != 0;
            failures += run (d, "eval --model model.json --against data.csv --json-report", "eval.json") != 0;
            failures += run (d, "render --model model.json --phase phase.png --overlay overlay.png --background input.pgm --mark-singularities") != 0;
            failures += run (d, "singularities --model model.json --domain 0,0,95,79 --verify-winding --out sings.json") != 0;
        }
        int identical = 0;
        for (const auto &name : outputs)
        {
            const auto a = test::read_file (root / "a" / name), b = test::read_file (root / "b" / name);
            identical += !a.empty () && a == b;
        }
        std::filesystem::remove_all (root);
        return {failures == 0 && identical == static_cast<int> (outputs.size ()),
                fmt ("extract, fit, eval, render, singularities twice: %d failed commands, %d/%zu outputs byte-identical, %.1f s", failures, identical,
                     outputs.size (), sw.seconds ())};
    }

    // ------------------------------------------------------------------ 9

    Outcome degree_saturation ()
    {
        Stopwatch sw;
        const auto target = loop_target ();
        std::vector<double> e3, e4;
        for (std::uint64_t seed = 0; seed < 5; ++seed)
        {
            const auto data = target_pool (target, 24, 0.1, 9000 + seed);
            for (int deg : {3, 4})
            {
                FitConfig cfg;
                cfg.degree_x = cfg.degree_y = deg;
                cfg.rng_seed = seed;
                cfg.domain = Rect{};
                (deg == 3 ? e3 : e4).push_back (fit (data, cfg).final_energy);
            }
        }
        const double m3 = mean (e3), m4 = mean (e4);
        const double improvement = (m3 - m4) / m3;
        return {improvement < 0.10, fmt ("mean final energy (3,3) %.4f, (4,4) %.4f over 5 noisy datasets (576 samples, sigma 0.1): improvement %.2f%% "
                                         "(limit 10%%, implementation-chosen proxy), %.1f s",
                                         m3, m4, 100.0 * improvement, sw.seconds ())};
    }
} // namespace

int main (int argc, char **argv)
{
    const std::vector<std::pair<const char *, std::function<Outcome ()>>> criteria{
        {"distance law", distance_law},
        {"gradient fidelity", gradient_fidelity},
        {"index identities", index_identities},
        {"recovery oracle", recovery_oracle},
        {"scarce-data trend", table_trend},
        {"pseudo-metric", pseudo_metric},
        {"extraction sanity", extraction_sanity},
        {"end-to-end determinism", end_to_end_determinism},
        {"degree saturation", degree_saturation},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert (std::atoi (argv[i]));

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size (); ++i)
    {
        const int id = static_cast<int> (i) + 1;
        if (!selected.empty () && !selected.count (id))
            continue;
        Outcome o;
        try
        {
            o = criteria[i].second ();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string ("exception: ") + e.what ()};
        }
        failed += !o.pass;
        std::printf ("%s criterion %d (%s): %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str ());
        std::fflush (stdout);
    }
    return failed ? 1 : 0;
}
