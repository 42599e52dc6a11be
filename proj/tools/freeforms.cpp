// freeforms: command-line front end for the free-probability toolkit.
//
// Subcommands: cumulants, admissible, region-d, recover, freeness, lambda,
// gallery, convolve, measure, transform.  JSON for structured data, CSV for
// plottable series; resolutions and tolerances are echoed into the output.

#include <cstdio>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "freeforms/freeforms.hpp"

namespace ff = freeforms;
using ff::json;

namespace {

struct RunConfig {
    ff::AdmissibilityConfig admissible;
    std::vector<double> eps = ff::default_eps_schedule();
    int lambda_max_odd = 25;
    double lambda_tol = 1e-11;
    double freeness_tol = 1e-12;
    double subordination_tol = 1e-12;
    int subordination_max_iter = 400;
    std::size_t chunk = 256;
};

std::vector<double> parse_double_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(item, &pos);
            ff::require(pos == item.size(), what + ": malformed number '" + item + "'");
            out.push_back(v);
        } catch (const std::exception&) {
            throw ff::validation_error(what + ": malformed number '" + item + "'");
        }
    }
    ff::require(!out.empty(), what + ": empty list");
    return out;
}

ff::GridSpec parse_grid(const std::string& text) {
    const std::vector<double> v = parse_double_list(text, "--grid");
    ff::require(v.size() == 3, "--grid expects xmin,xmax,N");
    ff::GridSpec g;
    g.xmin = v[0];
    g.xmax = v[1];
    g.n = static_cast<int>(v[2]);
    ff::require(static_cast<double>(g.n) == v[2] && g.n >= 2, "--grid: N must be an integer >= 2");
    return g;
}

void apply_config_file(const std::string& path, RunConfig& cfg) {
    const std::string text = ff::read_text_file(path);
    std::stringstream ss(text);
    std::string line;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return (b == std::string::npos) ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(ss, line)) {
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        ff::require(eq != std::string::npos, "config file: expected key=value, got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        try {
            if (key == "admissible.n_r") cfg.admissible.n_r = std::stoi(value);
            else if (key == "admissible.n_theta") cfg.admissible.n_theta = std::stoi(value);
            else if (key == "admissible.refinements") cfg.admissible.refinements = std::stoi(value);
            else if (key == "admissible.eps_factor") cfg.admissible.eps_factor = std::stod(value);
            else if (key == "admissible.r_factor") cfg.admissible.r_factor = std::stod(value);
            else if (key == "recover.eps") cfg.eps = parse_double_list(value, key);
            else if (key == "recover.chunk") cfg.chunk = static_cast<std::size_t>(std::stoul(value));
            else if (key == "lambda.max_odd") cfg.lambda_max_odd = std::stoi(value);
            else if (key == "lambda.tol") cfg.lambda_tol = std::stod(value);
            else if (key == "freeness.tol") cfg.freeness_tol = std::stod(value);
            else if (key == "convolve.tol") cfg.subordination_tol = std::stod(value);
            else if (key == "convolve.max_iter") cfg.subordination_max_iter = std::stoi(value);
            else throw ff::validation_error("config file: unknown key '" + key + "'");
        } catch (const ff::validation_error&) {
            throw;
        } catch (const std::exception&) {
            throw ff::validation_error("config file: bad value for '" + key + "'");
        }
    }
}

json admissibility_config_json(const ff::AdmissibilityConfig& c) {
    return json{{"n_r", c.n_r},
                {"n_theta", c.n_theta},
                {"eps_factor", c.eps_factor},
                {"r_factor", c.r_factor},
                {"refinements", c.refinements}};
}

void emit(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty()) {
        std::fputs(text.c_str(), stdout);
    } else {
        ff::write_text_file(out_path, text);
    }
}

void emit_csv(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
    } else {
        ff::write_text_file(out_path, content);
    }
}

std::vector<ff::cplx> gallery_sample_ring(int count, double radius) {
    std::vector<ff::cplx> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double theta = ff::pi * (1.0 / 6.0 + (2.0 / 3.0) * (static_cast<double>(k) + 0.5) / count);
        out.emplace_back(radius * std::cos(theta), radius * std::sin(theta));
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"freeforms: free-cumulant calculus, admissibility of finite cumulant sequences, "
                 "freeness of linear forms, semicircular characterization, free convolution"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "key=value configuration file (flags override)");

    // ---- cumulants ---------------------------------------------------------
    auto* cumulants = app.add_subcommand("cumulants", "moment <-> cumulant conversions and cumulant arithmetic");
    cumulants->require_subcommand(1);
    std::string cum_kappa, cum_moments, cum_k1, cum_k2, cum_out;
    int cum_n = 8;
    double cum_factor = 1.0;

    auto* to_moments = cumulants->add_subcommand("to-moments", "formal moments of a cumulant sequence");
    to_moments->add_option("--kappa", cum_kappa, "cumulant JSON ({\"kappa\":[...]} or inline [..])")->required();
    to_moments->add_option("--n", cum_n, "highest moment order");
    to_moments->add_option("-o,--output", cum_out, "output file (default stdout)");
    to_moments->callback([&] {
        const ff::CumulantSeq k = ff::cumulants_from_json(ff::json_from_arg(cum_kappa, "--kappa"));
        emit(json{{"moments", ff::cumulants_to_moments(k, cum_n)}, {"n", cum_n}}, cum_out);
    });

    auto* from_moments = cumulants->add_subcommand("from-moments", "cumulants of a moment sequence");
    from_moments->add_option("--moments", cum_moments, "moment JSON array m_0..m_n")->required();
    from_moments->add_option("-o,--output", cum_out, "output file (default stdout)");
    from_moments->callback([&] {
        const json j = ff::json_from_arg(cum_moments, "--moments");
        ff::require(j.is_array(), "--moments expects a JSON array");
        const std::vector<double> m = j.get<std::vector<double>>();
        const ff::CumulantSeq k = ff::moments_to_cumulants(m);
        // pad to length n so entry s is kappa_s for every converted order
        std::vector<double> padded(m.size() - 1, 0.0);
        for (std::size_t s = 1; s < m.size(); ++s) padded[s - 1] = k.kappa(static_cast<int>(s));
        emit(json{{"kappa", padded}}, cum_out);
    });

    auto* scale_cmd = cumulants->add_subcommand("scale", "dilation kappa_s -> u^s kappa_s");
    scale_cmd->add_option("--kappa", cum_kappa, "cumulant JSON")->required();
    scale_cmd->add_option("--factor", cum_factor, "dilation factor u")->required();
    scale_cmd->add_option("-o,--output", cum_out, "output file (default stdout)");
    scale_cmd->callback([&] {
        const ff::CumulantSeq k = ff::cumulants_from_json(ff::json_from_arg(cum_kappa, "--kappa"));
        emit(ff::to_json(ff::scale(k, cum_factor)), cum_out);
    });

    auto* add_cmd = cumulants->add_subcommand("add", "entrywise sum (free additive convolution)");
    add_cmd->add_option("--k1", cum_k1, "first cumulant JSON")->required();
    add_cmd->add_option("--k2", cum_k2, "second cumulant JSON")->required();
    add_cmd->add_option("-o,--output", cum_out, "output file (default stdout)");
    add_cmd->callback([&] {
        const ff::CumulantSeq a = ff::cumulants_from_json(ff::json_from_arg(cum_k1, "--k1"));
        const ff::CumulantSeq b = ff::cumulants_from_json(ff::json_from_arg(cum_k2, "--k2"));
        emit(ff::to_json(ff::add(a, b)), cum_out);
    });

    // ---- admissible --------------------------------------------------------
    auto* admissible = app.add_subcommand("admissible", "decide realizability of a finite cumulant sequence");
    std::string adm_kappa, adm_resolution, adm_out;
    admissible->add_option("--kappa", adm_kappa, "cumulant JSON")->required();
    admissible->add_option("--resolution", adm_resolution, "base grid nr,nt");
    admissible->add_option("--refinements", cfg.admissible.refinements, "stability refinements");
    admissible->add_option("--eps-factor", cfg.admissible.eps_factor, "inner radius as a fraction of R");
    admissible->add_option("--r-factor", cfg.admissible.r_factor, "outer radius multiplier");
    admissible->add_option("-o,--output", adm_out, "output file (default stdout)");
    admissible->callback([&] {
        if (!adm_resolution.empty()) {
            const std::vector<double> v = parse_double_list(adm_resolution, "--resolution");
            ff::require(v.size() == 2, "--resolution expects nr,nt");
            cfg.admissible.n_r = static_cast<int>(v[0]);
            cfg.admissible.n_theta = static_cast<int>(v[1]);
        }
        const ff::CumulantSeq k = ff::cumulants_from_json(ff::json_from_arg(adm_kappa, "--kappa"));
        const ff::AdmissibilityVerdict v = ff::is_admissible(k, cfg.admissible);
        json out = ff::to_json(v);
        out["kappa"] = k.entries();
        out["config"] = admissibility_config_json(cfg.admissible);
        emit(out, adm_out);
    });

    // ---- region-d ----------------------------------------------------------
    auto* region = app.add_subcommand("region-d", "closed-form (kappa3, kappa4) region boundary / membership");
    int region_samples = 200;
    std::string region_out, region_point;
    region->add_option("--samples", region_samples, "boundary sample count");
    region->add_option("--member", region_point, "test membership of a point k3,k4 instead");
    region->add_option("-o,--output", region_out, "output CSV (default stdout)");
    region->callback([&] {
        if (!region_point.empty()) {
            const std::vector<double> v = parse_double_list(region_point, "--member");
            ff::require(v.size() == 2, "--member expects k3,k4");
            emit(json{{"k3", v[0]}, {"k4", v[1]}, {"member", ff::region_d_membership(v[0], v[1])}}, region_out);
            return;
        }
        const auto samples = ff::region_d_boundary(region_samples);
        ff::CsvWriter csv({"freeforms region-d", "samples=" + std::to_string(region_samples)});
        csv.columns({"y", "plus_f", "minus_f"});
        for (const auto& s : samples) csv.row({s.y, s.plus, s.minus});
        emit_csv(csv.str(), region_out);
    });

    // ---- recover -----------------------------------------------------------
    auto* recover = app.add_subcommand("recover", "density of the measure behind an admissible cumulant sequence");
    std::string rec_kappa, rec_grid = "-3,3,1201", rec_eps, rec_out;
    bool rec_allow_inadmissible = false;
    recover->add_option("--kappa", rec_kappa, "cumulant JSON")->required();
    recover->add_option("--grid", rec_grid, "output grid xmin,xmax,N");
    recover->add_option("--eps", rec_eps, "decreasing eps schedule e1,e2,...");
    recover->add_flag("--allow-inadmissible", rec_allow_inadmissible,
                      "skip the admissibility gate (diagnostic use)");
    recover->add_option("-o,--output", rec_out, "output CSV (default stdout)");
    recover->callback([&] {
        const ff::CumulantSeq k = ff::cumulants_from_json(ff::json_from_arg(rec_kappa, "--kappa"));
        const ff::GridSpec grid = parse_grid(rec_grid);
        if (!rec_eps.empty()) cfg.eps = parse_double_list(rec_eps, "--eps");
        ff::RecoverOptions opt;
        opt.check_admissibility = !rec_allow_inadmissible;
        opt.admissibility = cfg.admissible;
        opt.chunk = cfg.chunk;
        ff::RecoverDiagnostics diag;
        const ff::GridDensity density = ff::recover_measure(ff::PhiPoly{k}, grid, cfg.eps, opt, &diag);
        std::vector<std::string> header = {"freeforms recover",
                                           "grid=" + rec_grid,
                                           "eps="};
        std::string eps_str;
        for (std::size_t i = 0; i < cfg.eps.size(); ++i)
            eps_str += (i ? "," : "") + ff::format_double(cfg.eps[i]);
        header[2] += eps_str;
        header.push_back("raw_integral=" + ff::format_double(diag.raw_integral));
        ff::CsvWriter csv(header);
        csv.columns({"x", "density"});
        for (std::size_t i = 0; i < density.size(); ++i) csv.row({density.x(i), density.values()[i]});
        emit_csv(csv.str(), rec_out);
    });

    // ---- freeness ----------------------------------------------------------
    auto* freeness = app.add_subcommand("freeness", "freeness relations for two linear forms");
    freeness->require_subcommand(1);
    std::string fr_coeffs, fr_cums, fr_out;
    int fr_order = 2, fr_q = 1, fr_mmax = 3;

    auto* fr_check = freeness->add_subcommand("check", "residuals of the cumulant relations");
    fr_check->add_option("--coeffs", fr_coeffs, "coefficient JSON {\"a\":[...],\"b\":[...]}")->required();
    fr_check->add_option("--cumulants", fr_cums, "JSON array of cumulant sequences")->required();
    fr_check->add_option("--tol", cfg.freeness_tol, "residual tolerance");
    fr_check->add_option("-o,--output", fr_out, "output file (default stdout)");
    fr_check->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(fr_coeffs, "--coeffs"));
        const json jc = ff::json_from_arg(fr_cums, "--cumulants");
        ff::require(jc.is_array(), "--cumulants expects a JSON array of sequences");
        std::vector<ff::CumulantSeq> cums;
        for (const auto& entry : jc) cums.push_back(ff::cumulants_from_json(entry));
        emit(ff::to_json(ff::check_freeness(cp, cums, cfg.freeness_tol)), fr_out);
    });

    auto* fr_solve = freeness->add_subcommand("solve", "nullspace of the order-s relations over active indices");
    fr_solve->add_option("--coeffs", fr_coeffs, "coefficient JSON")->required();
    fr_solve->add_option("--order", fr_order, "relation order s")->required();
    fr_solve->add_option("-o,--output", fr_out, "output file (default stdout)");
    fr_solve->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(fr_coeffs, "--coeffs"));
        const auto basis = ff::solve_nullspace(cp, fr_order);
        emit(json{{"order", fr_order}, {"active", cp.active()}, {"basis", basis}}, fr_out);
    });

    auto* fr_mixed = freeness->add_subcommand("mixed", "mixed cumulant of (L1, L2) at slot pattern (q, s-q)");
    fr_mixed->add_option("--coeffs", fr_coeffs, "coefficient JSON")->required();
    fr_mixed->add_option("--cumulants", fr_cums, "JSON array of cumulant sequences")->required();
    fr_mixed->add_option("--s", fr_order, "total order s")->required();
    fr_mixed->add_option("--q", fr_q, "slots filled by L1")->required();
    fr_mixed->add_option("-o,--output", fr_out, "output file (default stdout)");
    fr_mixed->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(fr_coeffs, "--coeffs"));
        const json jc = ff::json_from_arg(fr_cums, "--cumulants");
        std::vector<ff::CumulantSeq> cums;
        for (const auto& entry : jc) cums.push_back(ff::cumulants_from_json(entry));
        emit(json{{"s", fr_order}, {"q", fr_q}, {"value", ff::mixed_cumulant(cp, cums, fr_order, fr_q)}}, fr_out);
    });

    auto* fr_construct = freeness->add_subcommand("construct", "witness cumulant family making the forms free");
    fr_construct->add_option("--coeffs", fr_coeffs, "coefficient JSON")->required();
    fr_construct->add_option("--m-max", fr_mmax, "highest cumulant order in the witness");
    fr_construct->add_option("-o,--output", fr_out, "output file (default stdout)");
    fr_construct->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(fr_coeffs, "--coeffs"));
        ff::WitnessConfig wcfg;
        wcfg.admissibility = cfg.admissible;
        wcfg.freeness_tol = cfg.freeness_tol;
        const auto witness = ff::construct_free_family(cp, fr_mmax, wcfg);
        if (!witness) {
            emit(json{{"found", false}}, fr_out);
            return;
        }
        json seqs = json::array();
        for (const auto& k : *witness) seqs.push_back(k.entries());
        emit(json{{"found", true}, {"cumulants", seqs}}, fr_out);
    });

    // ---- lambda ------------------------------------------------------------
    auto* lambda = app.add_subcommand("lambda", "Lambda1/Lambda2 analysis of a coefficient pair");
    lambda->require_subcommand(1);
    std::string la_coeffs, la_out;
    double la_re = 0.0, la_im = 0.0, la_xmax = 0.0;
    int la_m = 0;

    auto* la_classify = lambda->add_subcommand("classify", "semicircular characterization conditions");
    la_classify->add_option("--coeffs", la_coeffs, "coefficient JSON")->required();
    la_classify->add_option("--max-odd", cfg.lambda_max_odd, "check Lambda2(2m+1) for m = 1..max-odd");
    la_classify->add_option("-o,--output", la_out, "output file (default stdout)");
    la_classify->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(la_coeffs, "--coeffs"));
        const ff::ConditionVerdict v = ff::classify(cp, cfg.lambda_max_odd);
        json zeros = json::array();
        for (const auto& z : v.zeros) zeros.push_back(json{{"x", z.x}, {"simple", z.simple}});
        emit(json{{"unique_simple_zero_at_two", v.unique_simple_zero_at_two},
                  {"odd_lambda2_nonzero", v.odd_lambda2_nonzero},
                  {"implication_holds", v.implication_holds},
                  {"symmetric_case", v.symmetric_case},
                  {"moment_case", v.moment_case},
                  {"shifted_case_hypotheses", v.shifted_case_hypotheses},
                  {"polya_pattern", v.polya_pattern},
                  {"scan_stable", v.scan_stable},
                  {"checked_m", v.checked_m},
                  {"strip_bound", v.strip_bound},
                  {"zeros", zeros},
                  {"caveat", v.caveat}},
             la_out);
    });

    auto* la_zeros = lambda->add_subcommand("zeros", "positive zeros of Lambda1");
    la_zeros->add_option("--coeffs", la_coeffs, "coefficient JSON")->required();
    la_zeros->add_option("--x-max", la_xmax, "scan at least up to this abscissa");
    la_zeros->add_option("--tol", cfg.lambda_tol, "bisection tolerance");
    la_zeros->add_option("-o,--output", la_out, "output file (default stdout)");
    la_zeros->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(la_coeffs, "--coeffs"));
        json zeros = json::array();
        for (const auto& z : ff::lambda1_positive_zeros(cp, la_xmax, cfg.lambda_tol))
            zeros.push_back(json{{"x", z.x}, {"simple", z.simple}});
        emit(json{{"strip_bound", ff::lambda1_strip_bound(cp)}, {"zeros", zeros}}, la_out);
    });

    auto* la_eval = lambda->add_subcommand("eval", "evaluate Lambda1 at a complex point or Lambda2 at an integer");
    la_eval->add_option("--coeffs", la_coeffs, "coefficient JSON")->required();
    la_eval->add_option("--re", la_re, "Re z for Lambda1");
    la_eval->add_option("--im", la_im, "Im z for Lambda1");
    la_eval->add_option("--m", la_m, "integer argument for Lambda2 (0 = skip)");
    la_eval->add_option("-o,--output", la_out, "output file (default stdout)");
    la_eval->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(la_coeffs, "--coeffs"));
        json out;
        const ff::cplx l1 = ff::lambda1(cp, ff::cplx(la_re, la_im));
        out["lambda1"] = json{{"re", l1.real()}, {"im", l1.imag()}};
        if (la_m >= 1) out["lambda2"] = ff::lambda2_int(cp, la_m);
        emit(out, la_out);
    });

    // ---- gallery -----------------------------------------------------------
    auto* gallery = app.add_subcommand("gallery", "special transforms and the linear-form identity residual");
    std::string ga_case, ga_coeffs, ga_out;
    double ga_gamma = 1.5, ga_rho = 0.5, ga_eps = 0.01, ga_radius = 40.0;
    int ga_m = 4, ga_samples = 20;
    gallery->add_option("--case", ga_case, "stable | constant | log | perturbed_stable | moment")->required();
    gallery->add_option("--coeffs", ga_coeffs, "coefficient JSON")->required();
    gallery->add_option("--gamma", ga_gamma, "stability index parameter");
    gallery->add_option("--rho", ga_rho, "asymmetry parameter");
    gallery->add_option("--eps", ga_eps, "perturbation size");
    gallery->add_option("--m", ga_m, "moment-case order");
    gallery->add_option("--samples", ga_samples, "number of arc sample points");
    gallery->add_option("--radius", ga_radius, "arc radius for the sample points");
    gallery->add_option("-o,--output", ga_out, "output file (default stdout)");
    gallery->callback([&] {
        const ff::CoeffPair cp = ff::coeffs_from_json(ff::json_from_arg(ga_coeffs, "--coeffs"));
        ff::GalleryParams params;
        params.gamma = ga_gamma;
        params.rho = ga_rho;
        params.eps = ga_eps;
        params.m = ga_m;
        const ff::GalleryPhi phi = ff::gallery_phi(ga_case, params);
        const auto samples = gallery_sample_ring(ga_samples, ga_radius);
        const double residual = ff::identity_residual(cp, phi, samples);
        emit(json{{"case", ga_case},
                  {"samples", ga_samples},
                  {"radius", ga_radius},
                  {"residual", residual}},
             ga_out);
    });

    // ---- convolve ----------------------------------------------------------
    auto* convolve = app.add_subcommand("convolve", "free additive convolution density");
    std::string cv_mu1, cv_mu2, cv_grid = "-4,4,1601", cv_eps, cv_out;
    convolve->add_option("--mu1", cv_mu1, "first measure JSON")->required();
    convolve->add_option("--mu2", cv_mu2, "second measure JSON")->required();
    convolve->add_option("--grid", cv_grid, "output grid xmin,xmax,N");
    convolve->add_option("--eps", cv_eps, "decreasing eps schedule");
    convolve->add_option("--tol", cfg.subordination_tol, "subordination tolerance");
    convolve->add_option("-o,--output", cv_out, "output CSV (default stdout)");
    convolve->callback([&] {
        const ff::Measure mu1 = ff::measure_from_json(ff::json_from_arg(cv_mu1, "--mu1"));
        const ff::Measure mu2 = ff::measure_from_json(ff::json_from_arg(cv_mu2, "--mu2"));
        const ff::GridSpec grid = parse_grid(cv_grid);
        if (!cv_eps.empty()) cfg.eps = parse_double_list(cv_eps, "--eps");
        ff::ConvolveOptions opt;
        opt.solver.tol = cfg.subordination_tol;
        opt.solver.max_iterations = cfg.subordination_max_iter;
        opt.chunk = cfg.chunk;
        ff::ConvolveDiagnostics diag;
        const ff::GridDensity out = ff::free_convolve(mu1, mu2, grid, cfg.eps, opt, &diag);
        std::string eps_str;
        for (std::size_t i = 0; i < cfg.eps.size(); ++i)
            eps_str += (i ? "," : "") + ff::format_double(cfg.eps[i]);
        ff::CsvWriter csv({"freeforms convolve", "grid=" + cv_grid, "eps=" + eps_str,
                           "raw_integral=" + ff::format_double(diag.raw_integral),
                           "max_iterations=" + std::to_string(diag.max_iterations)});
        csv.columns({"x", "density"});
        for (std::size_t i = 0; i < out.size(); ++i) csv.row({out.x(i), out.values()[i]});
        emit_csv(csv.str(), cv_out);
    });

    // ---- measure -----------------------------------------------------------
    auto* measure = app.add_subcommand("measure", "measure construction and raw moments");
    measure->require_subcommand(1);
    std::string me_measure, me_out;
    int me_n = 8, me_points = 4001;
    double me_a = 1.0, me_b = 0.0;

    auto* me_moments = measure->add_subcommand("moments", "raw moments m_0..m_n");
    me_moments->add_option("--measure", me_measure, "measure JSON")->required();
    me_moments->add_option("--n", me_n, "highest order");
    me_moments->add_option("-o,--output", me_out, "output file (default stdout)");
    me_moments->callback([&] {
        const ff::Measure mu = ff::measure_from_json(ff::json_from_arg(me_measure, "--measure"));
        emit(json{{"moments", ff::moments(mu, me_n)}}, me_out);
    });

    auto* me_semi = measure->add_subcommand("semicircular", "sampled semicircular density");
    me_semi->add_option("--a", me_a, "scale (radius 2a)");
    me_semi->add_option("--b", me_b, "center");
    me_semi->add_option("--points", me_points, "grid points");
    me_semi->add_option("-o,--output", me_out, "output file (default stdout)");
    me_semi->callback([&] { emit(ff::to_json(ff::semicircular(me_a, me_b, me_points)), me_out); });

    // ---- transform ---------------------------------------------------------
    auto* transform = app.add_subcommand("transform", "pointwise transforms of a measure");
    std::string tr_measure, tr_op = "cauchy", tr_out;
    double tr_re = 0.0, tr_im = 1.0;
    int tr_n = 1;
    transform->add_option("--measure", tr_measure, "measure JSON")->required();
    transform->add_option("--op", tr_op, "cauchy | reciprocal-f | voiculescu | asymptotics");
    transform->add_option("--re", tr_re, "Re z");
    transform->add_option("--im", tr_im, "Im z");
    transform->add_option("--n", tr_n, "order for asymptotics");
    transform->add_option("-o,--output", tr_out, "output file (default stdout)");
    transform->callback([&] {
        const ff::Measure mu = ff::measure_from_json(ff::json_from_arg(tr_measure, "--measure"));
        const ff::cplx z(tr_re, tr_im);
        json out;
        if (tr_op == "cauchy") {
            const ff::cplx g = ff::cauchy(mu, z);
            out = json{{"re", g.real()}, {"im", g.imag()}};
        } else if (tr_op == "reciprocal-f") {
            const ff::cplx f = ff::reciprocal_f(mu, z);
            out = json{{"re", f.real()}, {"im", f.imag()}};
        } else if (tr_op == "voiculescu") {
            const auto r = ff::voiculescu_of_measure(mu, z);
            out = json{{"re", r.phi.real()}, {"im", r.phi.imag()},
                       {"iterations", r.iterations}, {"residual", r.residual}};
        } else if (tr_op == "asymptotics") {
            const auto r = ff::moment_asymptotic_check(mu, tr_n);
            out = json{{"target", r.target},
                       {"values", r.values},
                       {"heights", r.heights},
                       {"max_deviation", r.max_deviation}};
        } else {
            throw ff::validation_error("transform: unknown --op '" + tr_op + "'");
        }
        emit(out, tr_out);
    });

    // --config may appear after a subcommand; let options fall through
    for (CLI::App* sub : app.get_subcommands([](const CLI::App*) { return true; })) {
        sub->fallthrough();
        for (CLI::App* nested : sub->get_subcommands([](const CLI::App*) { return true; }))
            nested->fallthrough();
    }

    // parse + dispatch with the documented exit codes
    try {
        // config file first, explicit flags override its values
        for (int i = 1; i + 1 < argc; ++i) {
            if (std::string(argv[i]) == "--config") apply_config_file(argv[i + 1], cfg);
        }
        app.parse(argc, argv);
        return 0;
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ExtrasError& e) {
        std::cerr << e.what() << "\n" << app.help() << std::flush;
        return 64;
    } catch (const CLI::RequiredError& e) {
        if (app.get_subcommands().empty()) {
            std::cerr << e.what() << "\n" << app.help() << std::flush;
            return 64;
        }
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 2;
    } catch (const ff::convergence_error& e) {
        const json diag{{"error", e.what()}, {"iterations", e.iterations}, {"residual", e.residual}};
        std::fputs((diag.dump(2) + "\n").c_str(), stdout);
        return 3;
    } catch (const ff::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
