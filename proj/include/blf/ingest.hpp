#pragma once
/**
 * @file   ingest.hpp
 * @brief  Coarse ridge-orientation extraction from grayscale images, dataset
 *         CSV files, and random subsets.
 */

#include "core.hpp"
#include "energy.hpp"
#include "image.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace blf
{
    struct ExtractionConfig
    {
        double smoothing_sigma = 1.5;          ///< pixels
        int block_size = 8;                    ///< pixels
        double gradient_norm_threshold = 0.05; ///< fraction of the largest block gradient energy
        int subsample_stride = 8;              ///< pixels between block origins

        void validate () const
        {
            if (!(smoothing_sigma > 0.0) || block_size <= 0 || !(gradient_norm_threshold > 0.0) || subsample_stride <= 0)
                throw InputError ("extraction parameters must all be positive");
        }
    };

    struct ExtractionResult
    {
        OrientationDataset data; ///< one sample per kept block, at the block center, row-major
        GrayImage mask;          ///< image-sized; 255 over kept blocks, 0 elsewhere
        int blocks_x = 0;
        int blocks_y = 0;
    };

    /// Separable Gaussian blur with edge clamping; kernel radius ⌈3σ⌉.
    [[nodiscard]] inline RealImage gaussian_blur (const RealImage &img, double sigma)
    {
        const int radius = std::max (1, static_cast<int> (std::ceil (3.0 * sigma)));
        std::vector<double> kernel (2 * radius + 1);
        for (int i = -radius; i <= radius; ++i)
            kernel[i + radius] = std::exp (-0.5 * i * i / (sigma * sigma));
        const double sum = std::accumulate (kernel.begin (), kernel.end (), 0.0);
        for (double &k : kernel)
            k /= sum;

        RealImage tmp (img.width, img.height), out (img.width, img.height);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
            {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * img.clamped (x + i, y);
                tmp.at (x, y) = acc;
            }
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
            {
                double acc = 0.0;
                for (int i = -radius; i <= radius; ++i)
                    acc += kernel[i + radius] * tmp.clamped (x, y + i);
                out.at (x, y) = acc;
            }
        return out;
    }

    /**
     * Block-wise ridge orientation from intensity gradients.
     *
     * Smooths, takes central differences (g_x, g_y), and per block combines the
     * doubled-angle sums Σ 2g_x g_y and Σ (g_x² − g_y²). Ridges run perpendicular
     * to the gradient, so θ = ½ atan2(Σ 2g_x g_y, Σ g_x² − g_y²) + π/2 (mod π).
     * Blocks whose mean gradient energy is below the threshold fraction of the
     * strongest block are masked out. Coordinates are pixels: x = column, y = row.
     *
     * Throws InputError("image too small") or InputError("empty mask: ...").
     */
    template <typename T>
    [[nodiscard]] ExtractionResult extract_orientation_field (const Image<T> &img, const ExtractionConfig &cfg = {})
    {
        cfg.validate ();
        if (img.width < cfg.block_size || img.height < cfg.block_size)
            throw InputError ("image too small: " + std::to_string (img.width) + "x" + std::to_string (img.height) + " is below block size " +
                              std::to_string (cfg.block_size));

        const RealImage smooth = gaussian_blur (to_real (img), cfg.smoothing_sigma);
        RealImage gx (img.width, img.height), gy (img.width, img.height);
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
            {
                gx.at (x, y) = 0.5 * (smooth.clamped (x + 1, y) - smooth.clamped (x - 1, y));
                gy.at (x, y) = 0.5 * (smooth.clamped (x, y + 1) - smooth.clamped (x, y - 1));
            }

        const int bs = cfg.block_size, stride = cfg.subsample_stride;
        ExtractionResult res;
        res.blocks_x = (img.width - bs) / stride + 1;
        res.blocks_y = (img.height - bs) / stride + 1;

        struct Block
        {
            int x0, y0;
            double energy, sxy, sdiff;
        };
        std::vector<Block> blocks;
        blocks.reserve (static_cast<std::size_t> (res.blocks_x) * res.blocks_y);
        double max_energy = 0.0;
        for (int by = 0; by < res.blocks_y; ++by)
            for (int bx = 0; bx < res.blocks_x; ++bx)
            {
                Block b{bx * stride, by * stride, 0.0, 0.0, 0.0};
                for (int y = b.y0; y < b.y0 + bs; ++y)
                    for (int x = b.x0; x < b.x0 + bs; ++x)
                    {
                        const double u = gx.at (x, y), v = gy.at (x, y);
                        b.energy += u * u + v * v;
                        b.sxy += 2.0 * u * v;
                        b.sdiff += u * u - v * v;
                    }
                b.energy /= static_cast<double> (bs) * bs;
                max_energy = std::max (max_energy, b.energy);
                blocks.push_back (b);
            }

        res.mask = GrayImage (img.width, img.height, 0);
        const double cutoff = cfg.gradient_norm_threshold * max_energy;
        for (const Block &b : blocks)
        {
            if (!(max_energy > 0.0) || b.energy < cutoff)
                continue;
            const double theta = 0.5 * std::atan2 (b.sxy, b.sdiff) + half_pi;
            res.data.samples.push_back (Sample{b.x0 + 0.5 * (bs - 1), b.y0 + 0.5 * (bs - 1), Orientation (theta), 1.0});
            for (int y = b.y0; y < b.y0 + bs; ++y)
                for (int x = b.x0; x < b.x0 + bs; ++x)
                    res.mask.at (x, y) = 255;
        }
        if (res.data.empty ())
            throw InputError ("empty mask: no block passes the gradient threshold");
        return res;
    }

    namespace detail
    {
        inline std::string_view trim (std::string_view s)
        {
            while (!s.empty () && std::isspace (static_cast<unsigned char> (s.front ())))
                s.remove_prefix (1);
            while (!s.empty () && std::isspace (static_cast<unsigned char> (s.back ())))
                s.remove_suffix (1);
            return s;
        }

        inline std::vector<std::string_view> split_csv (std::string_view line)
        {
            std::vector<std::string_view> out;
            std::size_t start = 0;
            for (;;)
            {
                const auto pos = line.find (',', start);
                out.push_back (trim (line.substr (start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
                if (pos == std::string_view::npos)
                    break;
                start = pos + 1;
            }
            return out;
        }

        inline bool parse_double (std::string_view s, double &out)
        {
            if (!s.empty () && s.front () == '+')
                s.remove_prefix (1);
            const auto [ptr, ec] = std::from_chars (s.data (), s.data () + s.size (), out);
            return ec == std::errc () && ptr == s.data () + s.size ();
        }

        /// Shortest representation that reads back to the same double.
        inline std::string format_double (double v)
        {
            char buf[64];
            const auto [ptr, ec] = std::to_chars (buf, buf + sizeof buf, v);
            return std::string (buf, ptr);
        }
    } // namespace detail

    /**
     * Parse a dataset from CSV text: optional header `x,y,theta[,weight]`, then
     * one sample per row with θ in radians. θ in [π, 2π) is reduced mod π and
     * reported in @p warnings; anything outside [0, 2π) is rejected.
     */
    [[nodiscard]] inline OrientationDataset parse_dataset (std::istream &in, std::vector<std::string> *warnings = nullptr)
    {
        OrientationDataset data;
        std::string line;
        int lineno = 0;
        int columns = -1;
        while (std::getline (in, line))
        {
            ++lineno;
            const auto text = detail::trim (line);
            if (text.empty ())
                continue;
            const auto fields = detail::split_csv (text);
            if (columns < 0 && data.empty () && !fields.empty () && fields[0] == "x")
            {
                if ((fields.size () != 3 && fields.size () != 4) || fields[1] != "y" || fields[2] != "theta" ||
                    (fields.size () == 4 && fields[3] != "weight"))
                    throw InputError ("line " + std::to_string (lineno) + ": header must be x,y,theta[,weight]");
                columns = static_cast<int> (fields.size ());
                continue;
            }
            if (fields.size () != 3 && fields.size () != 4)
                throw InputError ("line " + std::to_string (lineno) + ": expected 3 or 4 fields, got " + std::to_string (fields.size ()));
            if (columns >= 0 && static_cast<int> (fields.size ()) != columns)
                throw InputError ("line " + std::to_string (lineno) + ": field count does not match header");
            double v[4] = {0.0, 0.0, 0.0, 1.0};
            for (std::size_t i = 0; i < fields.size (); ++i)
                if (!detail::parse_double (fields[i], v[i]) || !std::isfinite (v[i]))
                    throw InputError ("line " + std::to_string (lineno) + ": cannot parse '" + std::string (fields[i]) + "'");
            if (v[2] < 0.0 || v[2] >= two_pi)
                throw InputError ("line " + std::to_string (lineno) + ": theta " + std::string (fields[2]) + " outside [0, 2pi)");
            if (v[2] >= pi && warnings)
                warnings->push_back ("line " + std::to_string (lineno) + ": theta in [pi, 2pi) reduced mod pi");
            if (v[3] < 0.0)
                throw InputError ("line " + std::to_string (lineno) + ": negative weight");
            if (fields.size () == 4)
                data.weighted = true;
            data.samples.push_back (Sample{v[0], v[1], Orientation (v[2]), v[3]});
        }
        if (data.empty ())
            throw InputError ("no samples");
        return data;
    }

    [[nodiscard]] inline OrientationDataset load_dataset (const std::string &path, std::vector<std::string> *warnings = nullptr)
    {
        std::ifstream in (path);
        if (!in)
            throw InputError ("cannot open dataset '" + path + "'");
        try
        {
            return parse_dataset (in, warnings);
        }
        catch (const InputError &e)
        {
            throw InputError (path + ": " + e.what ());
        }
    }

    /// Canonical CSV: header, then shortest round-trip decimal for every value.
    inline void write_dataset (std::ostream &out, const OrientationDataset &data)
    {
        out << (data.weighted ? "x,y,theta,weight\n" : "x,y,theta\n");
        for (const auto &s : data.samples)
        {
            out << detail::format_double (s.x) << ',' << detail::format_double (s.y) << ',' << detail::format_double (s.theta.value ());
            if (data.weighted)
                out << ',' << detail::format_double (s.weight);
            out << '\n';
        }
    }

    inline void save_dataset (const OrientationDataset &data, const std::string &path)
    {
        std::ofstream out (path, std::ios::binary);
        if (!out)
            throw InputError ("cannot write dataset '" + path + "'");
        write_dataset (out, data);
        if (!out)
            throw InputError ("failed writing dataset '" + path + "'");
    }

    /// Uniform subset of @p count samples without replacement, original order kept.
    [[nodiscard]] inline OrientationDataset subsample (const OrientationDataset &data, std::size_t count, std::uint64_t seed)
    {
        if (count == 0)
            throw InputError ("subsample count must be at least 1");
        if (count > data.size ())
            throw InputError ("subsample count " + std::to_string (count) + " exceeds dataset size " + std::to_string (data.size ()));
        std::vector<std::size_t> idx (data.size ());
        std::iota (idx.begin (), idx.end (), std::size_t{0});
        std::mt19937_64 rng (seed);
        for (std::size_t i = 0; i < count; ++i)
        {
            std::uniform_int_distribution<std::size_t> pick (i, idx.size () - 1);
            std::swap (idx[i], idx[pick (rng)]);
        }
        idx.resize (count);
        std::sort (idx.begin (), idx.end ());
        OrientationDataset out;
        out.weighted = data.weighted;
        out.samples.reserve (count);
        for (std::size_t i : idx)
            out.samples.push_back (data.samples[i]);
        return out;
    }
} // namespace blf
