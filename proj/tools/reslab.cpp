// Command-line front end for the resonance laboratory.  Five subcommands
// cover the library surface: airy-zeros (mode tables), bands (band/gap
// geometry for an obstacle), sphere-resonances (the production sweep), weyl
// (band census of a records file) and grushin-demo (model-operator checks).
//
// Exit codes: 0 on success, 1 on command-line errors, 2 on runtime failures;
// failures print a one-line JSON diagnostic to stdout so callers can parse
// the reason.  All output is deterministic for fixed flags (and fixed seed
// where one applies); RESLAB_THREADS caps the worker count without changing
// any bytes of output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reslab/airy.hpp"
#include "reslab/bands.hpp"
#include "reslab/geometry.hpp"
#include "reslab/grushin.hpp"
#include "reslab/sphere.hpp"

using nlohmann::json;
using namespace reslab;

namespace {

// "-" routes CSV writers (which take paths) to standard output.
std::string resolve_out(const std::string& out) {
    return out == "-" ? "/dev/stdout" : out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << text;
    if (!text.empty() && text.back() != '\n') os << '\n';
    if (!os) throw std::runtime_error("write failed on " + path);
}

ObstacleModel read_obstacle_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config " + path);
    json cfg = json::parse(is);
    const std::string kind = cfg.at("kind").get<std::string>();
    if (kind == "sphere") {
        return ObstacleModel::sphere(cfg.at("radius").get<double>());
    }
    if (kind == "ellipsoid") {
        return ObstacleModel::ellipsoid(cfg.at("a").get<double>(),
                                        cfg.at("b").get<double>(),
                                        cfg.at("c").get<double>());
    }
    if (kind == "explicit") {
        return ObstacleModel::explicit_bounds(
            cfg.at("q_min").get<double>(), cfg.at("q_max").get<double>(),
            cfg.at("surface_area").get<double>());
    }
    throw std::runtime_error("config kind must be sphere, ellipsoid or explicit");
}

json record_to_json(const ResonanceRecord& rec) {
    return json{{"bc", to_string(rec.bc)},
                {"l", rec.l},
                {"eta", rec.eta},
                {"re_lambda", rec.lambda.real()},
                {"im_lambda", rec.lambda.imag()},
                {"multiplicity", rec.multiplicity},
                {"band_kind", to_string(rec.band.kind)},
                {"band_index", rec.band.index}};
}

int run_airy_zeros(int j_max, const std::string& out, const std::string& format,
                   bool serial) {
    AiryZeroTable table =
        build_zero_table(j_max, serial ? ExecMode::Serial : ExecMode::Parallel);
    if (format == "csv") {
        write_zero_table_csv(table, resolve_out(out));
        return 0;
    }
    json rows = json::array();
    for (int j = 1; j <= table.count; ++j) {
        rows.push_back(json{{"j", j},
                            {"zeta", table.zeta(j)},
                            {"zeta_prime", table.zeta_prime(j)},
                            {"boundary_value", table.boundary_value(j)},
                            {"norm", table.norm(j)}});
    }
    write_text(out, rows.dump(2));
    return 0;
}

int run_bands(const std::string& config, const std::string& out,
              double c_margin, int j_count) {
    ObstacleModel model = read_obstacle_config(config);
    AiryZeroTable table = build_zero_table(500);
    BandConstants constants = band_constants(model, table);
    // Exact kinds ignore the sample count; ellipsoids resolve on this grid.
    CurvatureExtremes extremes = curvature_extremes(model, 40000);

    json head{{"kappa", constants.kappa},
              {"K_const", constants.K_const},
              {"j0", constants.j0},
              {"q_min", extremes.q_min},
              {"q_max", extremes.q_max},
              {"curvature_error_bound", extremes.error_bound},
              {"surface_area", model.surface_area},
              {"C_margin", c_margin}};
    write_text(out + ".constants.json", head.dump(2));

    // Edge curves on a logarithmic Re grid, one block per band index.
    std::ostringstream csv;
    csv << "j,re_lambda,band_lower,band_upper,gap_upper\n";
    char line[160];
    for (int j = 1; j <= j_count; ++j) {
        BandSpec spec = make_band_spec(j, constants, table, c_margin);
        for (int k = 0; k <= 60; ++k) {
            const double re = std::pow(10.0, k / 10.0);
            std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g\n", j,
                          re, spec.band_lower(re), spec.band_upper(re),
                          spec.gap_upper(re));
            csv << line;
        }
    }
    write_text(out + ".curves.csv", csv.str());
    return 0;
}

int run_sphere(const std::string& bc_name, int l_max, double radius, double eta,
               double c_margin, double tol, double depth_max, bool serial,
               const std::string& out, const std::string& format) {
    const BoundaryCondition bc = boundary_condition_from_string(bc_name);
    AiryZeroTable table = build_zero_table(500);
    BandConstants constants =
        band_constants(ObstacleModel::sphere(radius), table);
    const std::vector<double>& zero_seq = bc == BoundaryCondition::Dirichlet
                                              ? table.zeros_ai
                                              : table.zeros_ai_prime;
    SphereSweep sweep = compute_resonances(
        bc, radius, l_max, tol, constants, zero_seq, c_margin, eta, depth_max,
        serial ? ExecMode::Serial : ExecMode::Parallel);

    if (format == "csv") {
        write_records_csv(sweep.records, resolve_out(out));
    } else {
        json rows = json::array();
        for (const ResonanceRecord& rec : sweep.records)
            rows.push_back(record_to_json(rec));
        write_text(out, rows.dump(2));
    }
    if (!sweep.failed_l.empty()) {
        json diag{{"error", "some modes failed root certification"},
                  {"failed_l", sweep.failed_l}};
        std::cout << diag.dump() << "\n";
        return 2;
    }
    return 0;
}

int run_weyl(const std::string& in, double r, int band_j, double c_margin,
             double radius, int l_max_used, const std::string& out) {
    std::vector<ResonanceRecord> records = read_records_csv(in);
    AiryZeroTable table = build_zero_table(500);
    ObstacleModel model = ObstacleModel::sphere(radius);
    BandConstants constants = band_constants(model, table);
    // Dirichlet records are measured against Ai anchors, everything else
    // against Ai'; a mixed file cannot be censused coherently.
    bool any_dirichlet = false, any_other = false;
    for (const ResonanceRecord& rec : records) {
        (rec.bc == BoundaryCondition::Dirichlet ? any_dirichlet : any_other) =
            true;
    }
    if (any_dirichlet && any_other)
        throw std::runtime_error(
            "records mix Dirichlet and derivative-type boundary conditions");
    const std::vector<double>& zero_seq =
        any_dirichlet ? table.zeros_ai : table.zeros_ai_prime;
    WeylCount count =
        weyl_count(records, r, band_j, constants, zero_seq, c_margin,
                   model.surface_area, radius, l_max_used);
    json report{{"r", r},
                {"band_j", band_j},
                {"count", count.count},
                {"predicted", count.predicted},
                {"ratio", count.ratio}};
    write_text(out, report.dump(2));
    return 0;
}

int run_grushin_demo(double mu, double z_re, double z_im, double c1, int trials,
                     std::uint64_t seed, int j_trunc, bool serial,
                     const std::string& out) {
    AiryZeroTable table = build_zero_table(500);
    const ExecMode mode = serial ? ExecMode::Serial : ExecMode::Parallel;
    ModelParameters params =
        make_model_parameters(0.0, Complex(z_re, z_im), mu, c1, table);
    if (j_trunc <= 0) j_trunc = default_j_trunc(params);

    WellposednessReport wp = verify_wellposedness(params, trials, j_trunc, seed,
                                                  table, {0.0, 10.0, 40.0, 160.0},
                                                  mode);

    // Tail sums along the sweep, reported with the <lambda>^{3/2} weight the
    // estimates carry.
    json tails = json::array();
    for (double lambda : wp.lambda_sweep) {
        ModelParameters pl = params;
        pl.lambda = lambda;
        const double s = tail_sum(pl, params.N, table);
        const double w = std::sqrt(1.0 + lambda * lambda);
        tails.push_back(json{{"lambda", lambda},
                             {"tail_sum", s},
                             {"weighted", s * w * std::sqrt(w)}});
    }

    const Complex z(z_re, z_im);
    const Complex e_toy = interval_toy_e_minus_plus(z, 256);
    const double toy_defect = std::abs(e_toy - kPi * z);

    json report{{"parameters",
                 json{{"mu", mu},
                      {"z", {z_re, z_im}},
                      {"C1", c1},
                      {"N", params.N},
                      {"J_trunc", j_trunc},
                      {"trials", trials},
                      {"seed", seed}}},
                {"wellposedness", json::parse(wp.to_json())},
                {"tail_sums", tails},
                {"interval_toy_defect", toy_defect}};
    write_text(out, report.dump(2));
    if (!wp.pass || !(toy_defect < 1e-9)) {
        json diag{{"error", "model-operator check failed"},
                  {"wellposedness_pass", wp.pass},
                  {"interval_toy_defect", toy_defect}};
        std::cout << diag.dump() << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scattering-resonance laboratory for convex obstacles"};
    app.require_subcommand(1);

    auto* airy = app.add_subcommand(
        "airy-zeros", "Tabulate Airy derivative zeros and transverse-mode data");
    int airy_j = 100;
    std::string airy_out = "-", airy_format = "csv";
    bool airy_serial = false;
    airy->add_option("--j", airy_j, "number of zeros (1..500)")
        ->check(CLI::Range(1, 500));
    airy->add_option("--out", airy_out, "output path, - for stdout");
    airy->add_option("--format", airy_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    airy->add_flag("--serial", airy_serial, "disable the parallel kernel");

    auto* bands = app.add_subcommand(
        "bands", "Band/gap geometry constants and edge curves for an obstacle");
    std::string bands_config, bands_out;
    double bands_c = 1.0;
    int bands_j = 3;
    bands->add_option("--config", bands_config, "obstacle JSON config")
        ->required();
    bands->add_option("--out", bands_out,
                      "output prefix; writes <out>.constants.json and "
                      "<out>.curves.csv")
        ->required();
    bands->add_option("--c-margin", bands_c, "collar width")
        ->check(CLI::NonNegativeNumber);
    bands->add_option("--j", bands_j, "number of band curves")
        ->check(CLI::Range(1, 400));

    auto* sphere = app.add_subcommand(
        "sphere-resonances", "Sweep sphere resonances over angular momentum");
    std::string sph_bc = "neumann", sph_out = "-", sph_format = "csv";
    int sph_lmax = 120;
    double sph_radius = 1.0, sph_eta = 0.0, sph_c = 1.0, sph_tol = 1e-4;
    double sph_depth = 14.0;
    bool sph_serial = false;
    sphere->add_option("--bc", sph_bc, "dirichlet, neumann or robin")
        ->check(CLI::IsMember({"dirichlet", "neumann", "robin"}));
    sphere->add_option("--l-max", sph_lmax, "largest angular momentum (0..400)")
        ->check(CLI::Range(0, 400));
    sphere->add_option("--radius", sph_radius, "sphere radius a")
        ->check(CLI::PositiveNumber);
    sphere->add_option("--eta", sph_eta, "Robin coefficient");
    sphere->add_option("--c-margin", sph_c, "band collar for classification")
        ->check(CLI::NonNegativeNumber);
    sphere->add_option("--tol", sph_tol, "scale-free residual gate")
        ->check(CLI::PositiveNumber);
    sphere->add_option("--depth-max", sph_depth, "keep roots with -Im lambda "
                       "below this depth")
        ->check(CLI::PositiveNumber);
    sphere->add_flag("--serial", sph_serial, "disable the parallel sweep");
    sphere->add_option("--out", sph_out, "output path, - for stdout");
    sphere->add_option("--format", sph_format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));

    auto* weyl = app.add_subcommand(
        "weyl", "Count band resonances in a records file against the area law");
    std::string weyl_in, weyl_out = "-";
    double weyl_r = 0.0, weyl_c = 1.0, weyl_radius = 1.0;
    int weyl_j = 1, weyl_lmax = 0;
    weyl->add_option("--in", weyl_in, "records CSV from sphere-resonances")
        ->required();
    weyl->add_option("--r", weyl_r, "count |lambda| <= r")
        ->required()
        ->check(CLI::PositiveNumber);
    weyl->add_option("--l-max", weyl_lmax,
                     "largest l the sweep covered (completeness proof)")
        ->required();
    weyl->add_option("--j", weyl_j, "band index")->check(CLI::Range(1, 400));
    weyl->add_option("--c-margin", weyl_c, "band collar")
        ->check(CLI::NonNegativeNumber);
    weyl->add_option("--radius", weyl_radius, "sphere radius the records used")
        ->check(CLI::PositiveNumber);
    weyl->add_option("--out", weyl_out, "output path, - for stdout");

    auto* demo = app.add_subcommand(
        "grushin-demo", "Bordered-system checks for the model operator");
    double demo_mu = 1.0, demo_zre = 0.3, demo_zim = 0.3, demo_c1 = 6.0;
    int demo_trials = 100, demo_jtrunc = 0;
    std::uint64_t demo_seed = 1;
    bool demo_serial = false;
    std::string demo_out = "-";
    demo->add_option("--mu", demo_mu, "curvature scale in [0.1, 10]");
    demo->add_option("--z-re", demo_zre, "Re z");
    demo->add_option("--z-im", demo_zim, "Im z (|Im z| < C1)");
    demo->add_option("--c1", demo_c1, "bordering threshold C1");
    demo->add_option("--trials", demo_trials, "random right-hand sides per lambda")
        ->check(CLI::Range(100, 100000));
    demo->add_option("--seed", demo_seed, "base RNG seed");
    demo->add_option("--j-trunc", demo_jtrunc,
                     "basis truncation; 0 picks N + 60");
    demo->add_flag("--serial", demo_serial, "disable the parallel trials");
    demo->add_option("--out", demo_out, "output path, - for stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (airy->parsed())
            return run_airy_zeros(airy_j, airy_out, airy_format, airy_serial);
        if (bands->parsed())
            return run_bands(bands_config, bands_out, bands_c, bands_j);
        if (sphere->parsed())
            return run_sphere(sph_bc, sph_lmax, sph_radius, sph_eta, sph_c,
                              sph_tol, sph_depth, sph_serial, sph_out,
                              sph_format);
        if (weyl->parsed())
            return run_weyl(weyl_in, weyl_r, weyl_j, weyl_c, weyl_radius,
                            weyl_lmax, weyl_out);
        if (demo->parsed())
            return run_grushin_demo(demo_mu, demo_zre, demo_zim, demo_c1,
                                    demo_trials, demo_seed, demo_jtrunc,
                                    demo_serial, demo_out);
    } catch (const std::exception& e) {
        json diag{{"error", e.what()}};
        std::cout << diag.dump() << "\n";
        return 2;
    }
    return 1;
}
