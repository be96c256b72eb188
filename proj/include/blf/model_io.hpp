#pragma once
/**
 * @file   model_io.hpp
 * @brief  JSON documents for fitted models and singularity reports.
 *
 * Model schema:
 *
 *     { "degree_x": 3, "degree_y": 3,
 *       "domain_transform": { "scale": [sx, sy], "offset": [ox, oy] },
 *       "coeffs_x": [[alpha, beta], ...], "coeffs_y": [[gamma, delta], ...] }
 *
 * Coefficient pairs follow the canonical (k outer, j inner) monomial order.
 * Doubles are written in shortest round-trip form, so save/load is exact.
 */

#include "bisector.hpp"
#include "core.hpp"
#include "polyfield.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <string>
#include <vector>

namespace blf
{
    using json = nlohmann::json;

    namespace detail
    {
        inline json coeff_pairs (const PolyVectorField &f)
        {
            json arr = json::array ();
            const auto c = f.coeffs ();
            for (std::size_t i = 0; i < c.size (); i += 2)
                arr.push_back (json::array ({c[i], c[i + 1]}));
            return arr;
        }

        inline PolyVectorField field_from_pairs (int degree, const json &arr, const char *name)
        {
            if (!arr.is_array () || arr.size () != monomial_count (degree))
                throw InputError (std::string ("model: '") + name + "' must hold " + std::to_string (monomial_count (degree)) + " pairs");
            std::vector<double> c;
            c.reserve (2 * arr.size ());
            for (const auto &pair : arr)
            {
                if (!pair.is_array () || pair.size () != 2 || !pair[0].is_number () || !pair[1].is_number ())
                    throw InputError (std::string ("model: '") + name + "' entries must be [number, number]");
                c.push_back (pair[0].get<double> ());
                c.push_back (pair[1].get<double> ());
            }
            return PolyVectorField (degree, std::move (c));
        }
    } // namespace detail

    [[nodiscard]] inline json model_to_json (const BisectorModel &m)
    {
        const auto &t = m.transform ();
        return json{{"degree_x", m.x_field ().degree ()},
                    {"degree_y", m.y_field ().degree ()},
                    {"domain_transform", {{"scale", {t.scale[0], t.scale[1]}}, {"offset", {t.offset[0], t.offset[1]}}}},
                    {"coeffs_x", detail::coeff_pairs (m.x_field ())},
                    {"coeffs_y", detail::coeff_pairs (m.y_field ())}};
    }

    [[nodiscard]] inline BisectorModel model_from_json (const json &j)
    {
        try
        {
            const int dx = j.at ("degree_x").get<int> ();
            const int dy = j.at ("degree_y").get<int> ();
            DomainTransform t;
            if (j.contains ("domain_transform"))
            {
                const auto &dt = j.at ("domain_transform");
                const auto scale = dt.at ("scale").get<std::vector<double>> ();
                const auto offset = dt.at ("offset").get<std::vector<double>> ();
                if (scale.size () != 2 || offset.size () != 2)
                    throw InputError ("model: domain_transform scale and offset need two entries");
                if (scale[0] == 0.0 || scale[1] == 0.0)
                    throw InputError ("model: domain_transform scale must be non-zero");
                t.scale = {scale[0], scale[1]};
                t.offset = {offset[0], offset[1]};
            }
            auto x = detail::field_from_pairs (dx, j.at ("coeffs_x"), "coeffs_x");
            auto y = detail::field_from_pairs (dy, j.at ("coeffs_y"), "coeffs_y");
            if (!(x.norm () > 0.0) || !(y.norm () > 0.0))
                throw InputError ("model: coefficient vectors must be non-zero");
            return BisectorModel (std::move (x), std::move (y), t);
        }
        catch (const json::exception &e)
        {
            throw InputError (std::string ("model: ") + e.what ());
        }
    }

    inline void save_model (const BisectorModel &m, const std::string &path)
    {
        std::ofstream out (path, std::ios::binary);
        if (!out)
            throw InputError ("cannot write model '" + path + "'");
        out << model_to_json (m).dump (2) << '\n';
    }

    [[nodiscard]] inline BisectorModel load_model (const std::string &path)
    {
        std::ifstream in (path);
        if (!in)
            throw InputError ("cannot open model '" + path + "'");
        json j;
        try
        {
            j = json::parse (in);
        }
        catch (const json::exception &e)
        {
            throw InputError (path + ": " + e.what ());
        }
        return model_from_json (j);
    }

    [[nodiscard]] inline json singularities_to_json (const std::vector<Singularity> &sings)
    {
        json arr = json::array ();
        for (const auto &s : sings)
            arr.push_back ({{"x", s.location.x},
                            {"y", s.location.y},
                            {"index_numerator", s.index.numerator},
                            {"source", to_string (s.source)},
                            {"det_sign", s.det_sign},
                            {"verified_by_winding", s.verified_by_winding},
                            {"flag", to_string (s.flag)}});
        return arr;
    }
} // namespace blf
