// stls: shuffled total-least-squares experiments from the command line.
//
//   stls gen        --out DIR            synthetic instance + observations
//   stls estimate   --in DIR             estimate a permutation from Y1/Y2
//   stls sweep      --sweep AXIS --grid  Monte-Carlo sweep to CSV (+ summary, svg)
//   stls bound      --sigma --eta        Procrustes-loss bound calculator
//   stls bruteforce                      exhaustive estimator + optimality certificate
//   stls lemma      --kind K             lemma verification sweeps
//
// Exit codes: 0 success, 1 usage, 2 numerical failure, 3 verification violation.

#include "stls/csv_io.hpp"
#include "stls/errors.hpp"
#include "stls/estimators.hpp"
#include "stls/eval.hpp"
#include "stls/experiment.hpp"
#include "stls/model.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <thread>

namespace fs = std::filesystem;
using namespace stls;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitViolation = 3;

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ContractError("cannot open '" + path + "' for writing");
    return out;
}

std::string with_suffix(const std::string& path, const std::string& suffix, const std::string& ext) {
    fs::path p(path);
    const std::string stem = p.stem().string();
    return (p.parent_path() / (stem + suffix + ext)).string();
}

Matrix isotropic(std::size_t p, double sigma) {
    const auto d = static_cast<Eigen::Index>(p);
    return sigma * sigma * Matrix::Identity(d, d);
}

struct GenArgs {
    std::size_t n = 60, p = 2;
    double sigma = 0.2;
    std::string sigma_file;
    double theta = 60.0;
    std::uint64_t seed = 1;
    std::string truth = "identity";
    std::string out;
};

int run_gen(const GenArgs& a) {
    if (a.n < a.p || a.p < 1) throw ContractError("gen: requires n >= p >= 1");
    const Rng base(a.seed);
    Rng design_rng = base.derive(1);
    ProblemInstance inst;
    inst.X = generate_design(a.n, a.p, design_rng);
    inst.R = a.p == 2 ? rotation_2d(a.theta * std::numbers::pi / 180.0) : random_orthogonal(a.p, design_rng);
    Rng truth_rng = base.derive(2);
    if (a.truth == "identity") {
        inst.pi_star = Permutation::identity(a.n);
    } else if (a.truth == "random") {
        inst.pi_star = random_permutation(a.n, truth_rng);
    } else {
        throw ContractError("gen: --truth must be identity or random");
    }
    inst.Sigma = a.sigma_file.empty() ? isotropic(a.p, a.sigma) : io::read_matrix(a.sigma_file);
    require_covariance(inst.Sigma, a.p);
    Rng noise_rng = base.derive(3);
    const Observations obs = generate_observations(inst, noise_rng);

    fs::create_directories(a.out);
    const fs::path dir(a.out);
    io::write_matrix((dir / "X.csv").string(), inst.X);
    io::write_matrix((dir / "R.csv").string(), inst.R);
    io::write_matrix((dir / "Sigma.csv").string(), inst.Sigma);
    io::write_permutation((dir / "pi_star.txt").string(), inst.pi_star);
    io::write_matrix((dir / "Y1.csv").string(), obs.Y1);
    io::write_matrix((dir / "Y2.csv").string(), obs.Y2);
    std::cout << "wrote instance n=" << a.n << " p=" << a.p << " snr=" << io::format_double(snr(inst.X, inst.Sigma))
              << " to " << a.out << '\n';
    return 0;
}

struct EstimateArgs {
    std::string in;
    std::string estimator = "alta";
    std::string cost = "c3";
    std::string init = "identity";
    std::uint64_t seed = 1;
    std::size_t max_iter = 50;
    double tol = 1e-10;
    std::string out;
};

int run_estimate(const EstimateArgs& a) {
    const fs::path dir(a.in);
    const Matrix Y1 = io::read_matrix((dir / "Y1.csv").string());
    const Matrix Y2 = io::read_matrix((dir / "Y2.csv").string());
    const auto n = static_cast<std::size_t>(Y1.rows());
    const bool has_truth = fs::exists(dir / "pi_star.txt");
    const bool has_design = fs::exists(dir / "X.csv");
    const Permutation truth = has_truth ? io::read_permutation((dir / "pi_star.txt").string()) : Permutation::identity(n);

    const InitSpec init = parse_init(a.init);
    if (init.mode == InitMode::Truth && !has_truth) throw ContractError("estimate: --init truth needs pi_star.txt");
    Rng rng = Rng(a.seed).derive(4);
    Permutation start = Permutation::identity(n);
    switch (init.mode) {
    case InitMode::Truth: start = truth; break;
    case InitMode::Identity: break;
    case InitMode::Partial: start = truth.compose(partial_shuffle(n, std::min(init.k, n), rng)); break;
    case InitMode::Random: start = random_permutation(n, rng); break;
    }

    const IterationLimits limits{a.max_iter, a.tol};
    EstimateResult est;
    std::string label = a.estimator;
    if (a.estimator == "alta") {
        const CostKind kind = parse_cost_kind(a.cost);
        est = alta(Y1, Y2, start, kind, limits);
        label += "_" + std::string(to_string(kind));
    } else if (a.estimator == "aloa") {
        est = aloa(Y1, Y2, start, limits);
    } else if (a.estimator == "brute") {
        est = brute_force_tls(Y1, Y2);
    } else {
        throw ContractError("estimate: --estimator must be alta, aloa or brute");
    }

    std::cout << "estimator      " << label << '\n'
              << "objective      " << io::format_double(est.objective) << '\n'
              << "tls_objective  " << io::format_double(est.tls_objective) << '\n'
              << "iterations     " << est.iterations << '\n'
              << "converged      " << (est.converged ? "yes" : "no") << '\n';
    if (est.failure) std::cout << "failure        " << *est.failure << '\n';
    if (has_truth) std::cout << "hamming        " << hamming(est.perm, truth) << '\n';
    if (has_truth && has_design) {
        const Matrix X = io::read_matrix((dir / "X.csv").string());
        std::cout << "procrustes     " << io::format_double(procrustes_loss(X, truth, est.perm)) << '\n'
                  << "quadratic      " << io::format_double(quadratic_loss(X, truth, est.perm)) << '\n';
    }
    if (!a.out.empty()) io::write_permutation(a.out, est.perm);
    return 0;
}

struct SweepArgs {
    ExperimentConfig config;
    std::string preset;
    std::string sigma_file;
    std::vector<std::string> estimators{"alta"};
    std::vector<std::string> costs{"c3"};
    std::string init = "truth";
    std::string axis = "noise";
    std::string truth = "identity";
    std::string fresh = "true";
    std::string out = "sweep.csv";
    bool svg = false;
    bool no_timing = false;
};

int run_sweep_cmd(SweepArgs& a, bool n_given, bool grid_given) {
    ExperimentConfig& c = a.config;
    if (!a.preset.empty()) {
        if (a.preset == "smoke") {
            if (!n_given) c.n = 60;
        } else if (a.preset == "full") {
            if (!n_given) c.n = 300;
        } else {
            throw ContractError("sweep: --preset must be smoke or full");
        }
    }
    c.axis = parse_sweep_axis(a.axis);
    c.init = parse_init(a.init);
    if (a.truth != "identity" && a.truth != "random") throw ContractError("sweep: --truth must be identity or random");
    c.random_truth = a.truth == "random";
    if (a.fresh != "true" && a.fresh != "false") throw ContractError("sweep: --fresh-design must be true or false");
    c.fresh_design = a.fresh == "true";
    if (!a.sigma_file.empty()) c.Sigma = io::read_matrix(a.sigma_file);
    if (!grid_given) throw ContractError("sweep: --grid is required");

    c.estimators.clear();
    for (const auto& name : a.estimators) {
        if (name == "alta") {
            for (const auto& cost : a.costs) c.estimators.push_back({EstimatorSpec::Method::Alta, parse_cost_kind(cost)});
        } else {
            c.estimators.push_back(parse_estimator(name));
        }
    }
    if (c.threads == 0) c.threads = std::max(1u, std::thread::hardware_concurrency());

    const SweepResult result = run_sweep(c);
    {
        auto out = open_output(a.out);
        write_trials_csv(out, c, result.records, !a.no_timing);
    }
    const std::string summary_path = with_suffix(a.out, "_summary", ".csv");
    {
        auto out = open_output(summary_path);
        write_summary_csv(out, c, result.summary);
    }
    if (a.svg) {
        auto out = open_output(with_suffix(a.out, "", ".svg"));
        write_svg(out, c, result.summary);
    }
    for (const auto& s : result.summary) {
        std::cout << to_string(c.axis) << '=' << io::format_double(s.sweep_value) << ' ' << s.estimator
                  << " mean=" << io::format_double(s.mean_procrustes)
                  << " median=" << io::format_double(s.median_procrustes) << '\n';
    }
    std::cout << "wrote " << a.out << " and " << summary_path << '\n';
    return 0;
}

int run_bound_cmd(const BoundConfig& config, const std::string& out_path) {
    const auto rows = run_bound(config);
    write_bound_report(std::cout, rows);
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        write_bound_csv(out, rows);
    }
    return 0;
}

int run_bruteforce_cmd(const std::string& in_dir, const CertificateConfig& config, const std::string& out_path) {
    if (!in_dir.empty()) {
        EstimateArgs a;
        a.in = in_dir;
        a.estimator = "brute";
        a.out = out_path;
        return run_estimate(a);
    }
    const auto rows = run_certificate(config);
    std::size_t violations = 0, exceed = 0;
    for (const auto& r : rows) {
        violations += r.certificate_ok ? 0 : 1;
        exceed += r.exceeds_bound ? 1 : 0;
    }
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        write_certificate_csv(out, rows);
    }
    std::cout << "bruteforce: " << rows.size() << " instances, " << violations
              << " certificate violations, " << exceed << " bound exceedances\n";
    return violations == 0 ? 0 : kExitViolation;
}

int run_lemma_cmd(const LemmaConfig& config, const std::string& out_path) {
    const LemmaReport report = run_lemma_suite(config);
    if (!out_path.empty()) {
        auto out = open_output(out_path);
        write_lemma_csv(out, report);
    }
    std::cout << report.summary << '\n';
    return report.violations == 0 ? 0 : kExitViolation;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shuffled total least squares: estimators, bounds and Monte-Carlo sweeps"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic instance and its observations");
    gen_cmd->add_option("--n", gen.n, "Rows");
    gen_cmd->add_option("--p", gen.p, "Columns");
    gen_cmd->add_option("--sigma", gen.sigma, "Noise standard deviation (Sigma = sigma^2 I)");
    gen_cmd->add_option("--sigma-file", gen.sigma_file, "Noise covariance matrix CSV");
    gen_cmd->add_option("--theta", gen.theta, "Rotation angle of R in degrees (p = 2)");
    gen_cmd->add_option("--seed", gen.seed, "RNG seed");
    gen_cmd->add_option("--truth", gen.truth, "identity or random")->check(CLI::IsMember({"identity", "random"}));
    gen_cmd->add_option("--out", gen.out, "Output directory")->required();

    EstimateArgs est;
    auto* est_cmd = app.add_subcommand("estimate", "Estimate the permutation from Y1.csv / Y2.csv");
    est_cmd->add_option("--in", est.in, "Directory with Y1.csv, Y2.csv (and optionally X.csv, pi_star.txt)")->required();
    est_cmd->add_option("--estimator", est.estimator, "alta, aloa or brute")->check(CLI::IsMember({"alta", "aloa", "brute"}));
    est_cmd->add_option("--cost", est.cost, "ALTA cost matrix")->check(CLI::IsMember({"c1", "c2", "c3", "c4"}));
    est_cmd->add_option("--init", est.init, "truth, identity, partial=K or random");
    est_cmd->add_option("--seed", est.seed, "RNG seed for random initializations");
    est_cmd->add_option("--max-iter", est.max_iter, "Iteration cap");
    est_cmd->add_option("--tol", est.tol, "Relative stall tolerance");
    est_cmd->add_option("--out", est.out, "Write the estimated permutation here");

    SweepArgs sw;
    auto* sw_cmd = app.add_subcommand("sweep", "Monte-Carlo sweep over noise, n, snr or shuffle fraction");
    auto* sw_n = sw_cmd->add_option("--n", sw.config.n, "Rows (base n for the snr axis)");
    sw_cmd->add_option("--p", sw.config.p, "Columns");
    sw_cmd->add_option("--sigma", sw.config.sigma, "Noise standard deviation (base sigma for the snr axis)");
    sw_cmd->add_option("--sigma-file", sw.sigma_file, "Noise covariance CSV (n and shuffle axes only)");
    sw_cmd->add_option("--theta", sw.config.theta_degrees, "Rotation angle of R in degrees (p = 2)");
    sw_cmd->add_option("--trials", sw.config.trials, "Trials per grid value");
    sw_cmd->add_option("--seed", sw.config.seed, "RNG seed");
    sw_cmd->add_option("--cost", sw.costs, "ALTA cost matrices, comma separated")->delimiter(',');
    sw_cmd->add_option("--estimator", sw.estimators, "alta, aloa, brute; comma separated")->delimiter(',');
    sw_cmd->add_option("--init", sw.init, "truth, identity, partial=K or random");
    sw_cmd->add_option("--truth", sw.truth, "identity or random true permutation");
    sw_cmd->add_option("--sweep", sw.axis, "noise, n, snr or shuffle")->check(CLI::IsMember({"noise", "n", "snr", "shuffle"}));
    auto* sw_grid = sw_cmd->add_option("--grid", sw.config.grid, "Grid values, comma separated")->delimiter(',');
    sw_cmd->add_option("--out", sw.out, "Per-trial CSV path (summary goes to <stem>_summary.csv)");
    sw_cmd->add_flag("--svg", sw.svg, "Also write <stem>.svg");
    sw_cmd->add_option("--fresh-design", sw.fresh, "Redraw X every trial (true/false)");
    sw_cmd->add_option("--preset", sw.preset, "smoke (n=60) or full (n=300)");
    sw_cmd->add_option("--threads", sw.config.threads, "Worker threads (0 = all cores)");
    sw_cmd->add_option("--max-iter", sw.config.limits.max_iter, "Iteration cap");
    sw_cmd->add_option("--tol", sw.config.limits.tol, "Relative stall tolerance");
    sw_cmd->add_flag("--no-timing", sw.no_timing, "Omit the wall_ms column");
    sw.config.threads = 0;

    BoundConfig bc;
    std::string bound_out;
    auto* bound_cmd = app.add_subcommand("bound", "Evaluate the Procrustes-loss bound");
    bound_cmd->add_option("--n", bc.n, "Rows");
    bound_cmd->add_option("--p", bc.p, "Columns");
    bound_cmd->add_option("--sigma", bc.sigmas, "Noise standard deviations, comma separated")->delimiter(',');
    bound_cmd->add_option("--eta", bc.etas, "Confidence parameters, comma separated")->delimiter(',');
    bound_cmd->add_option("--c", bc.c, "Tail constant");
    bound_cmd->add_option("--theta", bc.theta_degrees, "Rotation angle of R in degrees (p = 2)");
    bound_cmd->add_option("--seed", bc.seed, "RNG seed for the design");
    bound_cmd->add_option("--out", bound_out, "CSV output path");

    CertificateConfig cc;
    std::string bf_in, bf_out;
    auto* bf_cmd = app.add_subcommand("bruteforce", "Exhaustive TLS estimator with optimality certificate");
    bf_cmd->add_option("--in", bf_in, "Run on Y1.csv / Y2.csv in this directory instead");
    bf_cmd->add_option("--n", cc.ns, "Instance sizes, comma separated (<= 9)")->delimiter(',');
    bf_cmd->add_option("--p", cc.p, "Columns");
    bf_cmd->add_option("--sigma", cc.sigmas, "Noise levels, comma separated")->delimiter(',');
    bf_cmd->add_option("--trials", cc.trials, "Instances");
    bf_cmd->add_option("--seed", cc.seed, "RNG seed");
    bf_cmd->add_option("--theta", cc.theta_degrees, "Rotation angle of R in degrees (p = 2)");
    bf_cmd->add_option("--eta", cc.eta, "Bound confidence parameter");
    bf_cmd->add_option("--out", bf_out, "CSV output path (permutation file with --in)");

    LemmaConfig lc;
    std::string lemma_kind = "pql", lemma_out;
    auto* lemma_cmd = app.add_subcommand("lemma", "Lemma verification sweeps");
    lemma_cmd->add_option("--kind", lemma_kind, "pql, maxuv or eigtail")->check(CLI::IsMember({"pql", "maxuv", "eigtail"}));
    lemma_cmd->add_option("--trials", lc.trials, "Random instances (noise draws for eigtail)");
    lemma_cmd->add_option("--seed", lc.seed, "RNG seed");
    lemma_cmd->add_option("--samples", lc.samples, "maxuv: random feasible pairs per instance");
    lemma_cmd->add_option("--max-n", lc.max_n, "pql/maxuv: largest n");
    lemma_cmd->add_option("--max-p", lc.max_p, "pql/maxuv: largest p");
    lemma_cmd->add_option("--n", lc.tail_n, "eigtail: rows");
    lemma_cmd->add_option("--p", lc.tail_p, "eigtail: columns");
    lemma_cmd->add_option("--eps", lc.tail_eps, "eigtail: relative deviation");
    lemma_cmd->add_option("--c", lc.c, "eigtail: tail constant");
    lemma_cmd->add_option("--out", lemma_out, "CSV output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*est_cmd) return run_estimate(est);
        if (*sw_cmd) return run_sweep_cmd(sw, sw_n->count() > 0, sw_grid->count() > 0);
        if (*bound_cmd) return run_bound_cmd(bc, bound_out);
        if (*bf_cmd) return run_bruteforce_cmd(bf_in, cc, bf_out);
        if (*lemma_cmd) {
            lc.kind = parse_lemma_kind(lemma_kind);
            return run_lemma_cmd(lc, lemma_out);
        }
    } catch (const ContractError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}
