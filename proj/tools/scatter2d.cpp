// Command-line front end: synthesize far-field datasets from a phantom
// potential, invert them (Born and fixed-point refinement), run parameter
// sweeps, and execute the verification suites. Every run writes a resolved
// config echo beside its outputs, sufficient to reproduce the run.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "scatter2d/born.hpp"
#include "scatter2d/forward.hpp"
#include "scatter2d/geometry.hpp"
#include "scatter2d/grid.hpp"
#include "scatter2d/iterate.hpp"
#include "scatter2d/metrics.hpp"
#include "scatter2d/phantom.hpp"
#include "scatter2d/verify.hpp"

namespace fs = std::filesystem;
using namespace scatter2d;

namespace {

constexpr int exit_usage = 2;
constexpr int exit_solver = 3;
constexpr int exit_verification = 4;

struct Options {
    double R = 2.1;
    int N = 32;
    std::string scenario = "backscattering";
    double k0 = 10.0;
    std::string theta0 = "1:0";
    std::string angles = "10";
    std::string phantom = "paper";
    double noise = 0.0;
    std::optional<std::int64_t> seed;
    double tol = 1e-7;
    int iters = 6;
    std::string out = ".";
    int fine_factor = 2;
    int threads = 1;
    std::string noise_mode = "dataset";
    bool linearized = false;
    bool restrict_support = false;
    std::string reference;
    std::string k_list = "10:100:1000";
    std::string n_list;
    std::string mode = "fixed-energy";
    std::string suite = "all";
    std::vector<std::string> inputs;
};

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::string item;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ',' || text[i] == ':') {
            if (!item.empty()) out.push_back(std::stod(item));
            item.clear();
        } else {
            item += text[i];
        }
    }
    if (out.empty()) throw CLI::ValidationError("empty numeric list: " + text);
    return out;
}

Vec2 parse_direction(const std::string& text) {
    const auto values = parse_list(text);
    if (values.size() == 1) return {std::cos(values[0]), std::sin(values[0])};
    if (values.size() == 2) return {values[0], values[1]};
    throw CLI::ValidationError("direction must be an angle or x:y pair: " + text);
}

ScatteringScenario make_scenario(const Options& opt) {
    if (opt.scenario == "fixed-energy") return FixedEnergy(opt.k0);
    if (opt.scenario == "fixed-angle") return FixedAngle(parse_direction(opt.theta0));
    if (opt.scenario == "backscattering") return Backscattering{};
    if (opt.scenario == "full-data") {
        const auto values = parse_list(opt.angles);
        if (values.size() == 1 && values[0] == std::floor(values[0]) && values[0] >= 1.0)
            return FullData::equispaced(static_cast<int>(values[0]));
        std::vector<Vec2> dirs;
        for (double a : values) dirs.push_back({std::cos(a), std::sin(a)});
        return FullData(std::move(dirs));
    }
    throw CLI::ValidationError("unknown scenario: " + opt.scenario);
}

NodalField load_reference(const std::string& ref, const GridSpec& grid) {
    if (ref.size() > 4 && ref.substr(ref.size() - 4) == ".csv") {
        NodalField field = load_nodal(ref);
        if (!(field.grid == grid))
            throw std::invalid_argument("reference grid does not match dataset grid");
        return field;
    }
    return build_phantom(ref, grid);
}

void add_common_options(CLI::App* cmd, Options& opt) {
    // config entries are injected before the command-line flags, so take-last
    // gives the flags precedence
    auto last = [](CLI::Option* o) { o->multi_option_policy(CLI::MultiOptionPolicy::TakeLast); };
    last(cmd->add_option("--R", opt.R, "half side length of the computational square"));
    last(cmd->add_option("--N", opt.N, "nodes per axis (even, >= 4)"));
    last(cmd->add_option("--scenario", opt.scenario,
                         "fixed-energy | fixed-angle | backscattering | full-data"));
    last(cmd->add_option("--k0", opt.k0, "wavenumber for fixed-energy"));
    last(cmd->add_option("--theta0", opt.theta0,
                         "incident direction (angle or x:y) for fixed-angle"));
    last(cmd->add_option("--angles", opt.angles, "full-data: angle count or list of angles"));
    last(cmd->add_option("--phantom", opt.phantom,
                         "paper | zero | gaussian | scaled:<f>:<name> | <file>.csv"));
    last(cmd->add_option("--noise", opt.noise, "multiplicative Gaussian noise level"));
    last(cmd->add_option("--seed", opt.seed, "noise seed (64-bit)"));
    last(cmd->add_option("--tol", opt.tol, "linear solver relative tolerance"));
    last(cmd->add_option("--iters", opt.iters, "refinement iterations K"));
    last(cmd->add_option("--out", opt.out, "output directory"));
    last(cmd->add_option("--fine-factor", opt.fine_factor,
                         "fine/coarse mesh ratio for aliasing runs"));
    last(cmd->add_option("--threads", opt.threads, "worker threads for per-frequency solves"));
    last(cmd->add_option("--noise-mode", opt.noise_mode,
                         "dataset (scale far-field values) | nodal (scale scattered field)"));
    last(cmd->add_flag("--linearized", opt.linearized, "synthesize with u = u_i (no solves)"));
    last(cmd->add_flag("--restrict-support", opt.restrict_support,
                       "restrict correction quadrature to the unit disk"));
    last(cmd->add_option("--reference", opt.reference,
                         "phantom name or nodal CSV for error reporting"));
    last(cmd->add_option("--k", opt.k_list, "wavenumber list for sweeps"));
    last(cmd->add_option("--N-list", opt.n_list, "mesh-size list for sweeps (defaults to --N)"));
    last(cmd->add_option("--mode", opt.mode, "sweep mode: scenario name | aliasing | sampling"));
    last(cmd->add_option("--suite", opt.suite,
                         "verify suite: geometry | solver | sampling | all"));
    cmd->add_option("--config", "flat key = value file applied before the flags")
        ->expected(1)
        ->each([](const std::string&) {});  // consumed during pre-parse expansion
}

// --------- flat config files ---------
// One "key = value" per line, # comments; keys are the long flag names. The
// file contents are spliced in front of the explicit flags.

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::pair<std::string, std::string>> read_flat_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw CLI::ValidationError("cannot read config file: " + path);
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    while (std::getline(is, line)) {
        const std::string body = trim(line);
        if (body.empty() || body[0] == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("config line without '=': " + line);
        out.emplace_back(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
    }
    return out;
}

std::vector<std::string> expand_config(std::vector<std::string> args) {
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ValidationError("--config needs a file path");
            path = args[i + 1];
            args.erase(args.begin() + i, args.begin() + i + 2);
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + i);
            break;
        }
    }
    if (path.empty()) return args;
    if (args.empty() || args[0].empty() || args[0][0] == '-')
        throw CLI::ValidationError("--config requires a subcommand");
    bool user_inputs = false;
    for (const auto& a : args)
        if (a == "--in" || a.rfind("--in=", 0) == 0) user_inputs = true;
    std::vector<std::string> merged;
    merged.push_back(args[0]);
    for (const auto& [key, value] : read_flat_config(path)) {
        if (key == "config") continue;
        if (key == "in" && user_inputs) continue;  // explicit inputs replace the config's
        merged.push_back("--" + key + "=" + value);
    }
    merged.insert(merged.end(), args.begin() + 1, args.end());
    return merged;
}

void write_config_echo(const Options& opt, const std::string& command) {
    std::ofstream os(fs::path(opt.out) / "config.txt");
    if (!os) throw std::runtime_error("cannot write config echo in " + opt.out);
    os << "# scatter2d " << command << " --config config.txt\n";
    os << "R = " << detail::fmt_g17(opt.R) << "\n";
    os << "N = " << opt.N << "\n";
    os << "scenario = " << opt.scenario << "\n";
    os << "k0 = " << detail::fmt_g17(opt.k0) << "\n";
    os << "theta0 = " << opt.theta0 << "\n";
    os << "angles = " << opt.angles << "\n";
    os << "phantom = " << opt.phantom << "\n";
    os << "noise = " << detail::fmt_g17(opt.noise) << "\n";
    if (opt.seed) os << "seed = " << *opt.seed << "\n";
    os << "tol = " << detail::fmt_g17(opt.tol) << "\n";
    os << "iters = " << opt.iters << "\n";
    os << "fine-factor = " << opt.fine_factor << "\n";
    os << "threads = " << opt.threads << "\n";
    os << "noise-mode = " << opt.noise_mode << "\n";
    os << "linearized = " << (opt.linearized ? "true" : "false") << "\n";
    os << "restrict-support = " << (opt.restrict_support ? "true" : "false") << "\n";
    if (!opt.reference.empty()) os << "reference = " << opt.reference << "\n";
    os << "k = " << opt.k_list << "\n";
    if (!opt.n_list.empty()) os << "N-list = " << opt.n_list << "\n";
    os << "mode = " << opt.mode << "\n";
    os << "suite = " << opt.suite << "\n";
    for (const auto& path : opt.inputs) os << "in = " << path << "\n";
}

SynthesisOptions make_synthesis_options(const Options& opt) {
    SynthesisOptions s;
    s.tol = opt.tol;
    s.linearized = opt.linearized;
    // linearized data is the plain discrete transform; quadrature must see the
    // whole cell or potentials reconstructed from data would not round-trip
    if (opt.linearized) s.support_radius = inf;
    s.threads = opt.threads;
    s.noise = opt.noise;
    s.seed = opt.seed;
    if (opt.noise_mode == "nodal")
        s.noise_mode = NoiseMode::nodal;
    else if (opt.noise_mode != "dataset")
        throw CLI::ValidationError("unknown noise mode: " + opt.noise_mode);
    return s;
}

std::string angle_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "dataset_angle%02zu.csv", i);
    return buf;
}

int cmd_synthesize(const Options& opt) {
    fs::create_directories(opt.out);
    const GridSpec grid(opt.R, opt.N);
    if (opt.R <= 2.0)
        std::cerr << "warning: R <= 2 breaks the periodization argument for unit-disk "
                     "potentials\n";
    const ScatteringScenario scenario = make_scenario(opt);
    if (const auto* fe = std::get_if<FixedEnergy>(&scenario)) {
        const int max_n = max_full_mesh_N(*fe, opt.R);
        if (opt.N > max_n)
            std::cerr << "note: N=" << opt.N << " exceeds the full-coverage bound 4Rk/pi ("
                      << max_n << "); frequencies outside the disk are zero-filled\n";
    }
    const NodalField V = load_reference(opt.phantom, grid);  // name or nodal CSV
    const SynthesisOptions sopt = make_synthesis_options(opt);
    if (const auto* fd = std::get_if<FullData>(&scenario)) {
        const auto datasets = synthesize_full_data(V, *fd, sopt);
        for (std::size_t i = 0; i < datasets.size(); ++i)
            save_dataset(datasets[i], (fs::path(opt.out) / angle_file_name(i)).string());
        std::cout << "wrote " << datasets.size() << " datasets to " << opt.out << "\n";
    } else {
        const FarFieldDataset d = synthesize_dataset(V, scenario, sopt);
        save_dataset(d, (fs::path(opt.out) / "dataset.csv").string());
        std::cout << "wrote " << (fs::path(opt.out) / "dataset.csv").string() << "\n";
    }
    write_config_echo(opt, "synthesize");
    return 0;
}

int cmd_born(const Options& opt) {
    if (opt.inputs.empty()) throw CLI::ValidationError("born: need at least one --in dataset");
    fs::create_directories(opt.out);
    std::vector<FarFieldDataset> datasets;
    for (const auto& path : opt.inputs) datasets.push_back(load_dataset(path));
    const BornResult result =
        datasets.size() == 1 ? born_invert(datasets.front()) : born_full_data(datasets);
    save_field(result.potential, (fs::path(opt.out) / "potential.csv").string());
    std::cout << "zero-filled mesh points: " << result.zero_filled_count << "\n";
    if (!opt.reference.empty()) {
        const NodalField ref = load_reference(opt.reference, result.potential.grid);
        const double err = l2_error(result.potential, ref);
        std::cout << "error = " << detail::fmt_g17(err) << "\n";
        std::ofstream os(fs::path(opt.out) / "errors.csv");
        os << "n,error\n1," << detail::fmt_g17(err) << "\n";
    }
    write_config_echo(opt, "born");
    return 0;
}

std::string iterate_file_name(std::size_t n) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "iterate_%02zu.csv", n);
    return buf;
}

void write_run_outputs(const ReconstructionRun& run, const std::string& out) {
    for (std::size_t n = 0; n < run.iterates.size(); ++n)
        save_field(run.iterates[n], (fs::path(out) / iterate_file_name(n)).string());
    if (!run.errors.empty()) {
        std::ofstream os(fs::path(out) / "errors.csv");
        os << "n,error\n";
        for (std::size_t n = 0; n < run.errors.size(); ++n)
            os << n << ',' << detail::fmt_g17(run.errors[n]) << "\n";
    }
}

int cmd_iterate(const Options& opt) {
    if (opt.inputs.empty()) throw CLI::ValidationError("iterate: need at least one --in dataset");
    fs::create_directories(opt.out);
    std::vector<FarFieldDataset> datasets;
    for (const auto& path : opt.inputs) datasets.push_back(load_dataset(path));
    const GridSpec grid = datasets.front().grid;

    IterateOptions iopt;
    iopt.tol = opt.tol;
    iopt.threads = opt.threads;
    if (opt.restrict_support) iopt.support_radius = 1.0;

    std::optional<NodalField> reference;
    if (!opt.reference.empty()) reference = load_reference(opt.reference, grid);
    const NodalField* ref = reference ? &*reference : nullptr;

    try {
        const ReconstructionRun result = datasets.size() == 1
                                             ? run(datasets.front(), opt.iters, ref, iopt)
                                             : run_full_data(datasets, opt.iters, ref, iopt);
        write_run_outputs(result, opt.out);
        std::cout << "iterates: " << result.iterates.size() << ", solves: " << result.total_solves
                  << "\n";
        if (!result.errors.empty())
            std::cout << "final error = " << detail::fmt_g17(result.errors.back()) << "\n";
    } catch (const IterateError& e) {
        std::cerr << "iterate failed: " << e.what() << "\n";
        if (e.partial) write_run_outputs(*e.partial, opt.out);
        write_config_echo(opt, "iterate");
        return exit_solver;
    }
    write_config_echo(opt, "iterate");
    return 0;
}

int sweep_scenarios(const Options& opt) {
    const std::vector<double> ks =
        opt.mode == "fixed-energy" ? parse_list(opt.k_list) : std::vector<double>{opt.k0};
    const std::vector<double> ns =
        opt.n_list.empty() ? std::vector<double>{static_cast<double>(opt.N)}
                           : parse_list(opt.n_list);

    std::ofstream os(fs::path(opt.out) / "errors.csv");
    os << "k,N,n,error\n";
    std::vector<std::pair<double, double>> final_errors;
    for (double n_raw : ns) {
        const int N = static_cast<int>(n_raw);
        const GridSpec grid(opt.R, N);
        const NodalField V = load_reference(opt.phantom, grid);
        for (double k : ks) {
            Options cell = opt;
            cell.N = N;
            cell.k0 = k;
            const ScatteringScenario scenario = make_scenario(cell);
            const SynthesisOptions sopt = make_synthesis_options(cell);
            IterateOptions iopt;
            iopt.tol = opt.tol;
            iopt.threads = opt.threads;
            if (opt.restrict_support) iopt.support_radius = 1.0;

            ReconstructionRun result = [&] {
                if (const auto* fd = std::get_if<FullData>(&scenario))
                    return run_full_data(synthesize_full_data(V, *fd, sopt), opt.iters, &V, iopt);
                return run(synthesize_dataset(V, scenario, sopt), opt.iters, &V, iopt);
            }();
            for (std::size_t n = 1; n < result.errors.size(); ++n)
                os << detail::fmt_g17(k) << ',' << N << ',' << n << ','
                   << detail::fmt_g17(result.errors[n]) << "\n";
            final_errors.emplace_back(k, result.errors.back());
            std::cout << "k=" << k << " N=" << N
                      << " final error = " << detail::fmt_g17(result.errors.back()) << "\n";
        }
    }
    if (opt.mode == "fixed-energy" && ks.size() >= 2 && ns.size() == 1) {
        const RateFit fit = fit_rate(final_errors);
        std::cout << "rate fit: error ~ k^-" << detail::fmt_g17(fit.exponent)
                  << " (rms log residual " << detail::fmt_g17(fit.residual) << ")\n";
    }
    return 0;
}

int sweep_aliasing(const Options& opt) {
    if (opt.fine_factor != 2)
        throw CLI::ValidationError("aliasing sweep requires --fine-factor 2");
    const GridSpec fine(opt.R, 2 * opt.N);
    const NodalField V = load_reference(opt.phantom, fine);
    Options cell = opt;
    const ScatteringScenario scenario = make_scenario(cell);
    if (std::holds_alternative<FullData>(scenario))
        throw CLI::ValidationError("aliasing sweep needs a pointwise scenario");
    const FarFieldDataset d = synthesize_dataset(V, scenario, make_synthesis_options(cell));
    const AliasingErrors errs = aliasing_study(V, d, opt.N);
    std::ofstream os(fs::path(opt.out) / "study.csv");
    os << "study,param,value\n";
    os << "aliasing,vs_coarse," << detail::fmt_g17(errs.vs_coarse) << "\n";
    os << "aliasing,vs_fine," << detail::fmt_g17(errs.vs_fine) << "\n";
    os << "aliasing,vs_fine_lowpass," << detail::fmt_g17(errs.vs_fine_lowpass) << "\n";
    std::cout << "vs coarse " << errs.vs_coarse << ", vs fine " << errs.vs_fine
              << ", vs low-passed fine " << errs.vs_fine_lowpass << "\n";
    return 0;
}

int sweep_sampling(const Options& opt) {
    std::ofstream os(fs::path(opt.out) / "study.csv");
    os << "study,param,value\n";
    const auto hat = sampling_study(detail::hat_transform, detail::hat_function, opt.R,
                                    {16, 32, 64, 128}, 1);
    for (const auto& [N, e] : hat.errors)
        os << "sampling-hat,N" << N << ',' << detail::fmt_g17(e) << "\n";
    os << "sampling-hat,order," << detail::fmt_g17(hat.fitted_order) << "\n";
    const auto gauss = sampling_study(detail::gauss_transform, detail::gauss_function, opt.R,
                                      {16, 32, 64, 128}, 2);
    for (const auto& [N, e] : gauss.errors)
        os << "sampling-gaussian,N" << N << ',' << detail::fmt_g17(e) << "\n";
    os << "sampling-gaussian,order," << detail::fmt_g17(gauss.fitted_order) << "\n";
    std::cout << "hat order " << hat.fitted_order << ", gaussian order " << gauss.fitted_order
              << "\n";
    return 0;
}

int cmd_sweep(const Options& opt) {
    fs::create_directories(opt.out);
    int rc;
    if (opt.mode == "aliasing")
        rc = sweep_aliasing(opt);
    else if (opt.mode == "sampling")
        rc = sweep_sampling(opt);
    else
        rc = sweep_scenarios(opt);
    write_config_echo(opt, "sweep");
    return rc;
}

int cmd_verify(const Options& opt) {
    std::vector<CheckResult> results;
    auto append = [&](std::vector<CheckResult> more) {
        results.insert(results.end(), more.begin(), more.end());
    };
    if (opt.suite == "geometry" || opt.suite == "all") append(verify_geometry());
    if (opt.suite == "solver" || opt.suite == "all") append(verify_solver());
    if (opt.suite == "sampling" || opt.suite == "all") append(verify_sampling());
    if (results.empty()) throw CLI::ValidationError("unknown verify suite: " + opt.suite);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : exit_verification;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"2-D quantum scattering: far-field synthesis and potential reconstruction"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* synthesize = app.add_subcommand("synthesize", "simulate a far-field dataset");
    CLI::App* born = app.add_subcommand("born", "invert a dataset (Born approximation)");
    CLI::App* iterate = app.add_subcommand("iterate", "fixed-point refinement of the inversion");
    CLI::App* sweep = app.add_subcommand("sweep", "parameter sweeps and studies");
    CLI::App* verify = app.add_subcommand("verify", "run the self-check suites");
    for (CLI::App* cmd : {synthesize, born, iterate, sweep, verify}) add_common_options(cmd, opt);
    born->add_option("--in", opt.inputs, "input dataset CSV (repeat for full data)");
    iterate->add_option("--in", opt.inputs, "input dataset CSV (repeat for full data)");

    try {
        std::vector<std::string> args = expand_config({argv + 1, argv + argc});
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : exit_usage;
    }

    try {
        if (synthesize->parsed()) return cmd_synthesize(opt);
        if (born->parsed()) return cmd_born(opt);
        if (iterate->parsed()) return cmd_iterate(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
        if (verify->parsed()) return cmd_verify(opt);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const SolverError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return exit_solver;
    } catch (const IterateError& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return exit_solver;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_usage;
}
