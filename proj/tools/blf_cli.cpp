// Command-line front end: extract → fit → eval / render / singularities, plus synth.
//
// Exit codes: 0 success, 2 input or parse error, 3 numerical failure.

#include <blf/blf.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace
{
    using blf::json;

    constexpr int exit_ok = 0;
    constexpr int exit_input = 2;
    constexpr int exit_numerical = 3;

    blf::Rect parse_rect (const std::string &text)
    {
        std::vector<double> v;
        std::stringstream ss (text);
        std::string item;
        while (std::getline (ss, item, ','))
        {
            double d = 0.0;
            if (!blf::detail::parse_double (blf::detail::trim (item), d))
                throw blf::InputError ("bad domain '" + text + "', expected x0,y0,x1,y1");
            v.push_back (d);
        }
        if (v.size () != 4 || !(v[2] > v[0]) || !(v[3] > v[1]))
            throw blf::InputError ("bad domain '" + text + "', expected x0,y0,x1,y1 with x1 > x0 and y1 > y0");
        return {v[0], v[1], v[2], v[3]};
    }

    std::pair<int, int> parse_grid (const std::string &text)
    {
        const auto x = text.find_first_of ("xX");
        try
        {
            if (x != std::string::npos)
            {
                const int w = std::stoi (text.substr (0, x));
                const int h = std::stoi (text.substr (x + 1));
                if (w > 0 && h > 0)
                    return {w, h};
            }
        }
        catch (const std::exception &)
        {
        }
        throw blf::InputError ("bad grid '" + text + "', expected WxH");
    }

    std::string fmt (double v)
    {
        char buf[64];
        std::snprintf (buf, sizeof buf, "%.17g", v);
        return buf;
    }

    void emit (const json &report, bool as_json, const std::vector<std::pair<std::string, std::string>> &lines)
    {
        if (as_json)
        {
            std::cout << report.dump (2) << '\n';
            return;
        }
        for (const auto &[k, v] : lines)
            std::cout << k << ": " << v << '\n';
    }

    // ---------------------------------------------------------------- extract

    struct ExtractArgs
    {
        std::string image, out, mask_out;
        blf::ExtractionConfig cfg;
        bool json_report = false;
    };

    int run_extract (const ExtractArgs &a)
    {
        const blf::GrayImage img = blf::read_image (a.image);
        const auto res = blf::extract_orientation_field (img, a.cfg);
        blf::save_dataset (res.data, a.out);
        const std::string mask_path = a.mask_out.empty () ? a.out + ".mask.pgm" : a.mask_out;
        blf::write_image (res.mask, mask_path);

        json r{{"command", "extract"},
               {"image", a.image},
               {"width", img.width},
               {"height", img.height},
               {"blocks", res.blocks_x * res.blocks_y},
               {"samples", res.data.size ()},
               {"dataset", a.out},
               {"mask", mask_path}};
        emit (r, a.json_report,
              {{"image", a.image + " (" + std::to_string (img.width) + "x" + std::to_string (img.height) + ")"},
               {"blocks", std::to_string (res.blocks_x * res.blocks_y)},
               {"samples", std::to_string (res.data.size ())},
               {"dataset", a.out},
               {"mask", mask_path}});
        return exit_ok;
    }

    // -------------------------------------------------------------------- fit

    struct FitArgs
    {
        std::string data, out, config;
        int deg_x = 3, deg_y = 3, iters = 0, restarts = 0;
        double rho = 0.0, grad_tol = 0.0, energy_tol = 0.0;
        std::uint64_t seed = 0;
        bool backtracking = false;
        std::string domain;
        bool json_report = false;

        CLI::Option *o_deg_x = nullptr, *o_deg_y = nullptr, *o_rho = nullptr, *o_iters = nullptr, *o_restarts = nullptr, *o_seed = nullptr,
                    *o_grad_tol = nullptr, *o_energy_tol = nullptr, *o_backtracking = nullptr;
    };

    blf::FitConfig config_from_json (const json &j)
    {
        blf::FitConfig c;
        try
        {
            for (const auto &[key, value] : j.items ())
            {
                if (key == "degree_x")
                    c.degree_x = value.get<int> ();
                else if (key == "degree_y")
                    c.degree_y = value.get<int> ();
                else if (key == "step" || key == "rho")
                    c.step = value.get<double> ();
                else if (key == "max_iters")
                    c.max_iters = value.get<int> ();
                else if (key == "grad_tol")
                    c.grad_tol = value.get<double> ();
                else if (key == "energy_tol")
                    c.energy_tol = value.get<double> ();
                else if (key == "restarts")
                    c.restarts = value.get<int> ();
                else if (key == "rng_seed" || key == "seed")
                    c.rng_seed = value.get<std::uint64_t> ();
                else if (key == "epsilon_guard")
                    c.epsilon_guard = value.get<double> ();
                else if (key == "backtracking")
                    c.backtracking = value.get<bool> ();
                else if (key == "domain")
                {
                    const auto v = value.get<std::vector<double>> ();
                    if (v.size () != 4)
                        throw blf::InputError ("config: domain needs [x0, y0, x1, y1]");
                    c.domain = blf::Rect{v[0], v[1], v[2], v[3]};
                }
                else
                    throw blf::InputError ("config: unknown key '" + key + "'");
            }
        }
        catch (const json::exception &e)
        {
            throw blf::InputError (std::string ("config: ") + e.what ());
        }
        return c;
    }

    int run_fit (const FitArgs &a)
    {
        blf::FitConfig cfg;
        if (!a.config.empty ())
        {
            std::ifstream in (a.config);
            if (!in)
                throw blf::InputError ("cannot open config '" + a.config + "'");
            try
            {
                cfg = config_from_json (json::parse (in));
            }
            catch (const json::exception &e)
            {
                throw blf::InputError (a.config + ": " + e.what ());
            }
        }
        if (a.o_deg_x->count ())
            cfg.degree_x = a.deg_x;
        if (a.o_deg_y->count ())
            cfg.degree_y = a.deg_y;
        if (a.o_rho->count ())
            cfg.step = a.rho;
        if (a.o_iters->count ())
            cfg.max_iters = a.iters;
        if (a.o_restarts->count ())
            cfg.restarts = a.restarts;
        if (a.o_seed->count ())
            cfg.rng_seed = a.seed;
        if (a.o_grad_tol->count ())
            cfg.grad_tol = a.grad_tol;
        if (a.o_energy_tol->count ())
            cfg.energy_tol = a.energy_tol;
        if (a.o_backtracking->count ())
            cfg.backtracking = true;
        if (!a.domain.empty ())
            cfg.domain = parse_rect (a.domain);

        std::vector<std::string> warnings;
        const auto data = blf::load_dataset (a.data, &warnings);
        for (const auto &w : warnings)
            std::cerr << "warning: " << a.data << ": " << w << '\n';

        const auto res = blf::fit (data, cfg);
        blf::save_model (res.model, a.out);

        json r{{"command", "fit"},
               {"samples", data.size ()},
               {"degree_x", cfg.degree_x},
               {"degree_y", cfg.degree_y},
               {"step", cfg.step},
               {"seed", cfg.rng_seed},
               {"restarts", cfg.restarts},
               {"final_energy", res.final_energy},
               {"final_rmsd_on_data", res.final_rmsd_on_data},
               {"iterations", res.iterations},
               {"restart_id", res.restart_id},
               {"stop_reason", blf::to_string (res.stop)},
               {"model", a.out}};
        emit (r, a.json_report,
              {{"samples", std::to_string (data.size ())},
               {"degrees", std::to_string (cfg.degree_x) + "," + std::to_string (cfg.degree_y)},
               {"seed", std::to_string (cfg.rng_seed)},
               {"final energy", fmt (res.final_energy)},
               {"rmsd on data", fmt (res.final_rmsd_on_data)},
               {"iterations", std::to_string (res.iterations)},
               {"restart chosen", std::to_string (res.restart_id)},
               {"stop reason", blf::to_string (res.stop)},
               {"model", a.out}});
        return exit_ok;
    }

    // ------------------------------------------------------------------- eval

    struct EvalArgs
    {
        std::string model, against, grid, mask, domain;
        bool json_report = false;
    };

    int run_eval (const EvalArgs &a)
    {
        const auto model = blf::load_model (a.model);
        json r{{"command", "eval"}, {"model", a.model}, {"against", a.against}};
        double value = 0.0;
        std::size_t points = 0, skipped = 0;

        if (!blf::detail::ends_with_ci (a.against, ".json"))
        {
            const auto data = blf::load_dataset (a.against);
            value = blf::rmsd (model, data);
            points = data.size ();
            r["point_set"] = "samples";
        }
        else
        {
            const auto other = blf::load_model (a.against);
            std::vector<blf::Point> pts;
            if (!a.mask.empty ())
            {
                const auto mask = blf::read_image (a.mask);
                for (int y = 0; y < mask.height; ++y)
                    for (int x = 0; x < mask.width; ++x)
                        if (mask.at (x, y) > 0)
                            pts.push_back ({static_cast<double> (x), static_cast<double> (y)});
                r["point_set"] = "mask";
            }
            else
            {
                const auto [w, h] = parse_grid (a.grid.empty () ? "64x64" : a.grid);
                const blf::Rect dom = a.domain.empty () ? model.transform ().unit_domain () : parse_rect (a.domain);
                for (int j = 0; j < h; ++j)
                    for (int i = 0; i < w; ++i)
                        pts.push_back ({dom.x0 + (i + 0.5) * dom.width () / w, dom.y0 + (j + 0.5) * dom.height () / h});
                r["point_set"] = "grid";
            }
            std::vector<blf::Orientation> lhs, rhs;
            for (const auto &p : pts)
            {
                const auto u = model.try_orientation_at (p);
                const auto v = other.try_orientation_at (p);
                if (!u || !v)
                {
                    ++skipped;
                    continue;
                }
                lhs.push_back (*u);
                rhs.push_back (*v);
            }
            if (lhs.empty ())
                throw blf::NumericalError ("no evaluable points in the comparison set");
            value = blf::rmsd (lhs, rhs);
            points = lhs.size ();
        }
        r["rmsd"] = value;
        r["points"] = points;
        r["skipped_singular"] = skipped;
        emit (r, a.json_report, {{"rmsd", fmt (value)}, {"points", std::to_string (points)}, {"skipped singular", std::to_string (skipped)}});
        return exit_ok;
    }

    // ----------------------------------------------------------------- render

    struct RenderArgs
    {
        std::string model, phase, overlay, background, domain;
        int width = 0, height = 0, stride = 8;
        double length = 6.0;
        bool mark = false;
        bool json_report = false;
    };

    int run_render (const RenderArgs &a)
    {
        if (a.phase.empty () && a.overlay.empty ())
            throw blf::InputError ("render needs --phase and/or --overlay");
        const auto model = blf::load_model (a.model);

        std::optional<blf::GrayImage> bg;
        if (!a.background.empty ())
            bg = blf::read_image (a.background);

        blf::RenderSpec spec;
        spec.line_stride = a.stride;
        spec.line_length = a.length;
        spec.mark_singularities = a.mark;
        spec.width = a.width > 0 ? a.width : bg ? bg->width : 256;
        spec.height = a.height > 0 ? a.height : bg ? bg->height : 256;
        if (!a.domain.empty ())
            spec.domain = parse_rect (a.domain);
        else if (bg)
            spec.domain = {-0.5, -0.5, bg->width - 0.5, bg->height - 0.5}; // pixel centers at integer coordinates
        else
            spec.domain = model.transform ().unit_domain ();

        std::vector<blf::Singularity> sings;
        if (spec.mark_singularities)
            sings = blf::find_singularities (model, spec.domain);

        const auto field = blf::partial_field (model);
        json r{{"command", "render"}, {"width", spec.width}, {"height", spec.height}, {"singularities_marked", sings.size ()}};
        if (!a.phase.empty ())
        {
            auto img = blf::phase_map (field, spec);
            if (spec.mark_singularities)
                blf::mark_singularities (img, sings, spec);
            blf::write_image (img, a.phase);
            r["phase"] = a.phase;
        }
        if (!a.overlay.empty ())
        {
            if (bg && (bg->width != spec.width || bg->height != spec.height))
                throw blf::InputError ("background is " + std::to_string (bg->width) + "x" + std::to_string (bg->height) +
                                       " but the render size is " + std::to_string (spec.width) + "x" + std::to_string (spec.height));
            auto img = blf::line_overlay (field, spec, bg ? &*bg : nullptr);
            if (spec.mark_singularities)
                blf::mark_singularities (img, sings, spec);
            blf::write_image (img, a.overlay);
            r["overlay"] = a.overlay;
        }
        emit (r, a.json_report,
              {{"size", std::to_string (spec.width) + "x" + std::to_string (spec.height)},
               {"phase", a.phase.empty () ? "-" : a.phase},
               {"overlay", a.overlay.empty () ? "-" : a.overlay}});
        return exit_ok;
    }

    // ---------------------------------------------------------- singularities

    struct SingArgs
    {
        std::string model, domain, out;
        bool verify = false;
    };

    int run_singularities (const SingArgs &a)
    {
        const auto model = blf::load_model (a.model);
        const blf::Rect dom = a.domain.empty () ? model.transform ().unit_domain () : parse_rect (a.domain);
        blf::SingularitySearch opt;
        opt.verify_winding = a.verify;
        const auto report = blf::singularities_to_json (blf::find_singularities (model, dom, opt));
        if (a.out.empty ())
            std::cout << report.dump (2) << '\n';
        else
        {
            std::ofstream out (a.out, std::ios::binary);
            if (!out)
                throw blf::InputError ("cannot write '" + a.out + "'");
            out << report.dump (2) << '\n';
        }
        return exit_ok;
    }

    // ------------------------------------------------------------------ synth

    struct SynthArgs
    {
        std::uint64_t seed = 0;
        int deg_x = 2, deg_y = 2;
        long long samples = 100;
        double noise = 0.0;
        std::string out, model_out, domain;
        bool json_report = false;
    };

    int run_synth (const SynthArgs &a)
    {
        if (a.samples < 1)
            throw blf::InputError ("--samples must be at least 1");
        const blf::Rect dom = a.domain.empty () ? blf::Rect{} : parse_rect (a.domain);
        std::mt19937_64 rng (a.seed);
        auto model = blf::random_model (a.deg_x, a.deg_y, rng);
        if (!a.domain.empty ())
            model = blf::BisectorModel (model.params (), blf::DomainTransform::fit (dom));
        const auto data = blf::sample_model (model, static_cast<std::size_t> (a.samples), a.noise, dom, rng);
        blf::save_dataset (data, a.out);
        if (!a.model_out.empty ())
            blf::save_model (model, a.model_out);
        json r{{"command", "synth"}, {"seed", a.seed}, {"samples", data.size ()}, {"noise", a.noise}, {"dataset", a.out}};
        if (!a.model_out.empty ())
            r["model"] = a.model_out;
        emit (r, a.json_report,
              {{"seed", std::to_string (a.seed)}, {"samples", std::to_string (data.size ())}, {"dataset", a.out},
               {"model", a.model_out.empty () ? "-" : a.model_out}});
        return exit_ok;
    }
} // namespace

int main (int argc, char **argv)
{
    CLI::App app{"Bisector line field interpolation of orientation fields"};
    app.require_subcommand (1, 1);

    ExtractArgs ex;
    auto *c_extract = app.add_subcommand ("extract", "Coarse block orientations from a grayscale image");
    c_extract->add_option ("--image", ex.image, "Input PGM or PNG")->required ();
    c_extract->add_option ("--out", ex.out, "Output dataset CSV")->required ();
    c_extract->add_option ("--mask-out", ex.mask_out, "Mask image (default: <out>.mask.pgm)");
    c_extract->add_option ("--sigma", ex.cfg.smoothing_sigma, "Gaussian smoothing sigma, pixels")->capture_default_str ();
    c_extract->add_option ("--block", ex.cfg.block_size, "Block size, pixels")->capture_default_str ();
    c_extract->add_option ("--threshold", ex.cfg.gradient_norm_threshold, "Fraction of the strongest block energy")->capture_default_str ();
    c_extract->add_option ("--stride", ex.cfg.subsample_stride, "Block stride, pixels")->capture_default_str ();
    c_extract->add_flag ("--json-report", ex.json_report, "Print the report as JSON");

    FitArgs fa;
    auto *c_fit = app.add_subcommand ("fit", "Fit a bisector model by projected gradient descent");
    c_fit->add_option ("--data", fa.data, "Dataset CSV")->required ();
    c_fit->add_option ("--out", fa.out, "Output model JSON")->required ();
    c_fit->add_option ("--config", fa.config, "JSON fit configuration (flags take precedence)");
    fa.o_deg_x = c_fit->add_option ("--deg-x", fa.deg_x, "Degree of X (default 3)");
    fa.o_deg_y = c_fit->add_option ("--deg-y", fa.deg_y, "Degree of Y (default 3)");
    fa.o_rho = c_fit->add_option ("--rho", fa.rho, "Step size on the per-sample mean energy (default 0.05)");
    fa.o_iters = c_fit->add_option ("--iters", fa.iters, "Maximum iterations per restart (default 20000)");
    fa.o_restarts = c_fit->add_option ("--restarts", fa.restarts, "Number of restarts (default 5)");
    fa.o_seed = c_fit->add_option ("--seed", fa.seed, "Random seed (default 0)");
    fa.o_grad_tol = c_fit->add_option ("--grad-tol", fa.grad_tol, "Gradient-norm stopping tolerance (default 1e-8)");
    fa.o_energy_tol = c_fit->add_option ("--energy-tol", fa.energy_tol, "Energy-change stopping tolerance (default 1e-12)");
    fa.o_backtracking = c_fit->add_flag ("--backtracking", fa.backtracking, "Halve the step whenever the energy increases");
    c_fit->add_option ("--domain", fa.domain, "x0,y0,x1,y1 mapped to [-1,1]^2 (default: data bounds)");
    c_fit->add_flag ("--json-report", fa.json_report, "Print the report as JSON");

    EvalArgs ev;
    auto *c_eval = app.add_subcommand ("eval", "RMSD between a model and another model or a dataset");
    c_eval->add_option ("--model", ev.model, "Model JSON")->required ();
    c_eval->add_option ("--against", ev.against, "Model JSON or dataset CSV")->required ();
    auto *o_grid = c_eval->add_option ("--grid", ev.grid, "Comparison grid WxH over the domain (default 64x64)");
    c_eval->add_option ("--mask", ev.mask, "Mask image; nonzero pixels form the comparison set")->excludes (o_grid);
    c_eval->add_option ("--domain", ev.domain, "x0,y0,x1,y1 for --grid (default: the model's unit domain)");
    c_eval->add_flag ("--json-report", ev.json_report, "Print the report as JSON");

    RenderArgs ra;
    auto *c_render = app.add_subcommand ("render", "Phase map and line overlay images");
    c_render->add_option ("--model", ra.model, "Model JSON")->required ();
    c_render->add_option ("--phase", ra.phase, "Phase map output (.png or .pgm)");
    c_render->add_option ("--overlay", ra.overlay, "Line overlay output (.png or .pgm)");
    c_render->add_option ("--background", ra.background, "Background image for the overlay");
    c_render->add_option ("--width", ra.width, "Image width (default: background width or 256)");
    c_render->add_option ("--height", ra.height, "Image height (default: background height or 256)");
    c_render->add_option ("--stride", ra.stride, "Overlay segment stride, pixels")->capture_default_str ();
    c_render->add_option ("--length", ra.length, "Overlay segment length, pixels")->capture_default_str ();
    c_render->add_option ("--domain", ra.domain, "x0,y0,x1,y1 covered by the image");
    c_render->add_flag ("--mark-singularities", ra.mark, "Draw ring markers at singularities");
    c_render->add_flag ("--json-report", ra.json_report, "Print the report as JSON");

    SingArgs sa;
    auto *c_sing = app.add_subcommand ("singularities", "Locate singularities and their indices");
    c_sing->add_option ("--model", sa.model, "Model JSON")->required ();
    c_sing->add_option ("--domain", sa.domain, "x0,y0,x1,y1 search rectangle (default: the model's unit domain)");
    c_sing->add_flag ("--verify-winding", sa.verify, "Cross-check each index with a winding loop");
    c_sing->add_option ("--out", sa.out, "Write the JSON report here instead of stdout");

    SynthArgs sy;
    auto *c_synth = app.add_subcommand ("synth", "Random ground-truth model and a dataset sampled from it");
    c_synth->add_option ("--seed", sy.seed, "Random seed")->capture_default_str ();
    c_synth->add_option ("--deg-x", sy.deg_x, "Degree of X")->capture_default_str ();
    c_synth->add_option ("--deg-y", sy.deg_y, "Degree of Y")->capture_default_str ();
    c_synth->add_option ("--samples", sy.samples, "Number of samples")->capture_default_str ();
    c_synth->add_option ("--noise", sy.noise, "Gaussian noise on theta, radians")->capture_default_str ();
    c_synth->add_option ("--out", sy.out, "Output dataset CSV")->required ();
    c_synth->add_option ("--model-out", sy.model_out, "Ground-truth model JSON");
    c_synth->add_option ("--domain", sy.domain, "x0,y0,x1,y1 sampling rectangle (default -1,-1,1,1)");
    c_synth->add_flag ("--json-report", sy.json_report, "Print the report as JSON");

    try
    {
        app.parse (argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit (e);
    }
    catch (const CLI::CallForAllHelp &e)
    {
        return app.exit (e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit (e);
        return exit_input;
    }

    try
    {
        if (c_extract->parsed ())
            return run_extract (ex);
        if (c_fit->parsed ())
            return run_fit (fa);
        if (c_eval->parsed ())
            return run_eval (ev);
        if (c_render->parsed ())
            return run_render (ra);
        if (c_sing->parsed ())
            return run_singularities (sa);
        if (c_synth->parsed ())
            return run_synth (sy);
    }
    catch (const blf::NumericalError &e)
    {
        std::cerr << "error: " << e.what () << '\n';
        return exit_numerical;
    }
    catch (const blf::Error &e)
    {
        std::cerr << "error: " << e.what () << '\n';
        return exit_input;
    }
    return exit_input;
}
