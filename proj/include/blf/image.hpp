#pragma once
/**
 * @file   image.hpp
 * @brief  Row-major grayscale images with PGM (P5/P2) and PNG file I/O.
 *
 * PNG support uses libpng; define BLF_NO_PNG to build without it.
 */

#include "core.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#ifndef BLF_NO_PNG
#include <png.h>
#endif

namespace blf
{
    template <typename T>
    struct Image
    {
        int width = 0;
        int height = 0;
        std::vector<T> pixels;

        Image () = default;
        Image (int w, int h, T fill = T{}) : width (w), height (h), pixels (checked_size (w, h), fill) {}
        Image (int w, int h, std::vector<T> data) : width (w), height (h), pixels (std::move (data))
        {
            if (pixels.size () != checked_size (w, h))
                throw InputError ("image buffer length does not match " + std::to_string (w) + "x" + std::to_string (h));
        }

        [[nodiscard]] T &at (int x, int y) { return pixels[static_cast<std::size_t> (y) * width + x]; }
        [[nodiscard]] const T &at (int x, int y) const { return pixels[static_cast<std::size_t> (y) * width + x]; }

        /// Edge-clamped read.
        [[nodiscard]] T clamped (int x, int y) const { return at (std::clamp (x, 0, width - 1), std::clamp (y, 0, height - 1)); }

        friend bool operator== (const Image &, const Image &) = default;

      private:
        static std::size_t checked_size (int w, int h)
        {
            if (w < 0 || h < 0)
                throw InputError ("image dimensions must be non-negative");
            return static_cast<std::size_t> (w) * static_cast<std::size_t> (h);
        }
    };

    using GrayImage = Image<std::uint8_t>;
    using RealImage = Image<double>;

    template <typename T>
    [[nodiscard]] RealImage to_real (const Image<T> &img)
    {
        RealImage out (img.width, img.height);
        std::transform (img.pixels.begin (), img.pixels.end (), out.pixels.begin (), [] (T v) { return static_cast<double> (v); });
        return out;
    }

    namespace detail
    {
        inline bool ends_with_ci (const std::string &s, const std::string &suffix)
        {
            if (s.size () < suffix.size ())
                return false;
            return std::equal (suffix.rbegin (), suffix.rend (), s.rbegin (),
                               [] (char a, char b) { return std::tolower (static_cast<unsigned char> (a)) == std::tolower (static_cast<unsigned char> (b)); });
        }

        /// Next whitespace-separated header token, skipping '#' comments.
        inline std::string pnm_token (std::istream &in)
        {
            std::string tok;
            int c;
            while ((c = in.get ()) != EOF)
            {
                if (c == '#')
                {
                    while ((c = in.get ()) != EOF && c != '\n')
                        ;
                    continue;
                }
                if (std::isspace (c))
                {
                    if (!tok.empty ())
                        break;
                    continue;
                }
                tok.push_back (static_cast<char> (c));
            }
            return tok;
        }
    } // namespace detail

    [[nodiscard]] inline GrayImage read_pgm (const std::string &path)
    {
        std::ifstream in (path, std::ios::binary);
        if (!in)
            throw InputError ("cannot open image '" + path + "'");
        const std::string magic = detail::pnm_token (in);
        if (magic != "P5" && magic != "P2")
            throw InputError ("'" + path + "' is not a binary or ASCII PGM file");
        int w = 0, h = 0, maxval = 0;
        try
        {
            w = std::stoi (detail::pnm_token (in));
            h = std::stoi (detail::pnm_token (in));
            maxval = std::stoi (detail::pnm_token (in));
        }
        catch (const std::exception &)
        {
            throw InputError ("malformed PGM header in '" + path + "'");
        }
        if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
            throw InputError ("unsupported PGM dimensions or depth in '" + path + "'");

        GrayImage img (w, h);
        auto rescale = [maxval] (int v) { return static_cast<std::uint8_t> (maxval == 255 ? v : (v * 255 + maxval / 2) / maxval); };
        if (magic == "P5")
        {
            const int bytes = maxval < 256 ? 1 : 2;
            std::vector<unsigned char> raw (img.pixels.size () * bytes);
            in.read (reinterpret_cast<char *> (raw.data ()), static_cast<std::streamsize> (raw.size ()));
            if (in.gcount () != static_cast<std::streamsize> (raw.size ()))
                throw InputError ("truncated PGM data in '" + path + "'");
            for (std::size_t i = 0; i < img.pixels.size (); ++i)
                img.pixels[i] = rescale (bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1]);
        }
        else
        {
            for (auto &p : img.pixels)
            {
                int v;
                if (!(in >> v))
                    throw InputError ("truncated PGM data in '" + path + "'");
                p = rescale (std::clamp (v, 0, maxval));
            }
        }
        return img;
    }

    inline void write_pgm (const GrayImage &img, const std::string &path)
    {
        std::ofstream out (path, std::ios::binary);
        if (!out)
            throw InputError ("cannot write '" + path + "'");
        out << "P5\n" << img.width << ' ' << img.height << "\n255\n";
        out.write (reinterpret_cast<const char *> (img.pixels.data ()), static_cast<std::streamsize> (img.pixels.size ()));
        if (!out)
            throw InputError ("failed writing '" + path + "'");
    }

#ifndef BLF_NO_PNG
    namespace detail
    {
        struct FileCloser
        {
            void operator() (std::FILE *f) const noexcept { std::fclose (f); }
        };
        using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

        [[noreturn]] inline void png_error_fn (png_structp, png_const_charp msg) { throw InputError (std::string ("png: ") + msg); }
        inline void png_warning_fn (png_structp, png_const_charp) {}
    } // namespace detail

    /// Any PNG, converted to 8-bit grayscale.
    [[nodiscard]] inline GrayImage read_png (const std::string &path)
    {
        detail::FilePtr fp (std::fopen (path.c_str (), "rb"));
        if (!fp)
            throw InputError ("cannot open image '" + path + "'");
        png_structp png = png_create_read_struct (PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_fn, detail::png_warning_fn);
        if (!png)
            throw InputError ("png: cannot allocate reader");
        png_infop info = png_create_info_struct (png);
        struct Guard
        {
            png_structp *p;
            png_infop *i;
            ~Guard () { png_destroy_read_struct (p, i, nullptr); }
        } guard{&png, &info};

        png_init_io (png, fp.get ());
        png_read_info (png, info);
        const auto color = png_get_color_type (png, info);
        const auto depth = png_get_bit_depth (png, info);
        if (depth == 16)
            png_set_strip_16 (png);
        if (color == PNG_COLOR_TYPE_PALETTE)
            png_set_palette_to_rgb (png);
        if (color == PNG_COLOR_TYPE_GRAY && depth < 8)
            png_set_expand_gray_1_2_4_to_8 (png);
        if (color & PNG_COLOR_MASK_ALPHA)
            png_set_strip_alpha (png);
        if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_RGB_ALPHA || color == PNG_COLOR_TYPE_PALETTE)
            png_set_rgb_to_gray_fixed (png, 1, -1, -1);
        png_read_update_info (png, info);

        const int w = static_cast<int> (png_get_image_width (png, info));
        const int h = static_cast<int> (png_get_image_height (png, info));
        GrayImage img (w, h);
        std::vector<png_bytep> rows (static_cast<std::size_t> (h));
        for (int y = 0; y < h; ++y)
            rows[y] = img.pixels.data () + static_cast<std::size_t> (y) * w;
        png_read_image (png, rows.data ());
        png_read_end (png, nullptr);
        return img;
    }

    /// 8-bit grayscale PNG with no time or text chunks, so output is byte-stable.
    inline void write_png (const GrayImage &img, const std::string &path)
    {
        detail::FilePtr fp (std::fopen (path.c_str (), "wb"));
        if (!fp)
            throw InputError ("cannot write '" + path + "'");
        png_structp png = png_create_write_struct (PNG_LIBPNG_VER_STRING, nullptr, detail::png_error_fn, detail::png_warning_fn);
        if (!png)
            throw InputError ("png: cannot allocate writer");
        png_infop info = png_create_info_struct (png);
        struct Guard
        {
            png_structp *p;
            png_infop *i;
            ~Guard () { png_destroy_write_struct (p, i); }
        } guard{&png, &info};

        png_init_io (png, fp.get ());
        png_set_IHDR (png, info, static_cast<png_uint_32> (img.width), static_cast<png_uint_32> (img.height), 8, PNG_COLOR_TYPE_GRAY,
                      PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        png_write_info (png, info);
        for (int y = 0; y < img.height; ++y)
            png_write_row (png, img.pixels.data () + static_cast<std::size_t> (y) * img.width);
        png_write_end (png, nullptr);
    }
#endif

    /// Read by extension: .png through libpng, anything else as PGM.
    [[nodiscard]] inline GrayImage read_image (const std::string &path)
    {
#ifndef BLF_NO_PNG
        if (detail::ends_with_ci (path, ".png"))
            return read_png (path);
#endif
        return read_pgm (path);
    }

    /// Write by extension: .pgm as PGM, anything else as PNG (PGM when built without libpng).
    inline void write_image (const GrayImage &img, const std::string &path)
    {
#ifndef BLF_NO_PNG
        if (!detail::ends_with_ci (path, ".pgm"))
        {
            write_png (img, path);
            return;
        }
#endif
        write_pgm (img, path);
    }
} // namespace blf
