#pragma once
/**
 * @file   test_support.hpp
 * @brief  Shared oracles and random generators for the test suites.
 */

#include <blf/blf.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

namespace blf::test
{
    /// x^(k−j) y^j summed term by term with std::pow; independent of the table code.
    inline Vec2 naive_evaluate (const PolyVectorField &f, Point p)
    {
        double v1 = 0.0, v2 = 0.0;
        for (int k = 0; k <= f.degree (); ++k)
            for (int j = 0; j <= k; ++j)
            {
                const double m = std::pow (p.x, k - j) * std::pow (p.y, j);
                v1 += f.alpha (k, j) * m;
                v2 += f.beta (k, j) * m;
            }
        return {v1, v2};
    }

    /// Reference distance law: the representative of a−b among {δ, δ−π, δ+π} with the smallest magnitude.
    inline double argmin_distance (double a, double b)
    {
        const double delta = a - b;
        double best = delta;
        for (double c : {delta - pi, delta + pi})
            if (std::abs (c) < std::abs (best))
                best = c;
        return best;
    }

    inline PolyVectorField random_field (int degree, std::mt19937_64 &rng)
    {
        return PolyVectorField (degree, uniform_on_sphere (coeff_count (degree), rng));
    }

    inline Point random_point (std::mt19937_64 &rng, double lo = -1.0, double hi = 1.0)
    {
        std::uniform_real_distribution<double> u (lo, hi);
        const double x = u (rng);
        return {x, u (rng)};
    }

    inline OrientationDataset random_dataset (std::size_t n, std::mt19937_64 &rng, const Rect &box = {})
    {
        std::uniform_real_distribution<double> ux (box.x0, box.x1), uy (box.y0, box.y1), ut (0.0, pi);
        OrientationDataset d;
        for (std::size_t i = 0; i < n; ++i)
        {
            const double x = ux (rng), y = uy (rng);
            d.samples.push_back (Sample{x, y, Orientation (ut (rng)), 1.0});
        }
        return d;
    }

    /// Linear vector field A·(p − c).
    inline PolyVectorField linear_field (double a11, double a12, double a21, double a22, Point c = {})
    {
        PolyVectorField f (1);
        f.set (0, 0, -(a11 * c.x + a12 * c.y), -(a21 * c.x + a22 * c.y));
        f.set (1, 0, a11, a21); // x
        f.set (1, 1, a12, a22); // y
        return f;
    }

    inline PolyVectorField constant_field (double v1, double v2)
    {
        PolyVectorField f (0);
        f.set (0, 0, v1, v2);
        return f;
    }

    inline double relative_error (double a, double b, double floor = 1e-8)
    {
        return std::abs (a - b) / std::max ({std::abs (a), std::abs (b), floor});
    }

    /**
     * Sinusoidal ridges whose lines run at angle @p phi (radians from the +x axis,
     * y pointing down the rows), with period @p period pixels.
     */
    inline GrayImage stripes (int width, int height, double phi, double period, double phase = 0.0)
    {
        GrayImage img (width, height);
        const double cx = 0.5 * (width - 1), cy = 0.5 * (height - 1);
        for (int y = 0; y < height; ++y)
            for (int x = 0; x < width; ++x)
            {
                const double t = (-(x - cx) * std::sin (phi) + (y - cy) * std::cos (phi)) / period;
                img.at (x, y) = static_cast<std::uint8_t> (std::lround (127.5 + 100.0 * std::cos (two_pi * t + phase)));
            }
        return img;
    }

    /// Fresh scratch directory, unique per process and tag.
    inline std::filesystem::path scratch_dir (const std::string &tag)
    {
        const auto dir = std::filesystem::temp_directory_path () / ("blf-" + tag + "-" + std::to_string (::getpid ()));
        std::filesystem::remove_all (dir);
        std::filesystem::create_directories (dir);
        return dir;
    }

    inline std::string read_file (const std::filesystem::path &p)
    {
        std::ifstream in (p, std::ios::binary);
        return {std::istreambuf_iterator<char> (in), std::istreambuf_iterator<char> ()};
    }
} // namespace blf::test
