#include "stls/experiment.hpp"

#include "stls/csv_io.hpp"
#include "stls/errors.hpp"
#include "stls/eval.hpp"
#include "stls/model.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cctype>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>
#include <tuple>

namespace stls {

namespace {

// Stream tags mixed into the per-trial RNG path.
enum StreamTag : std::uint64_t { kDesign = 1, kTruth = 2, kNoise = 3, kInit = 4, kLemma = 5 };

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

using io::format_double;

struct GridPoint {
    std::size_t n;
    double sigma;
    std::optional<std::size_t> shuffled_rows; // shuffle axis only
};

GridPoint resolve(const ExperimentConfig& config, double value) {
    switch (config.axis) {
    case SweepAxis::Noise: return {config.n, value, std::nullopt};
    case SweepAxis::SampleSize: return {static_cast<std::size_t>(std::llround(value)), config.sigma, std::nullopt};
    case SweepAxis::Snr: {
        const auto n = static_cast<std::size_t>(std::llround(value));
        return {n, config.sigma * static_cast<double>(config.n) / static_cast<double>(n), std::nullopt};
    }
    case SweepAxis::Shuffle: {
        const auto k = static_cast<std::size_t>(std::llround(value * static_cast<double>(config.n)));
        return {config.n, config.sigma, std::min(k, config.n)};
    }
    }
    throw ContractError("unknown sweep axis");
}

Matrix covariance_for(const ExperimentConfig& config, double sigma) {
    if (config.Sigma) return *config.Sigma;
    const auto p = static_cast<Eigen::Index>(config.p);
    return sigma * sigma * Matrix::Identity(p, p);
}

Matrix coefficient_matrix(std::size_t p, double theta_degrees, Rng& rng) {
    if (p == 2) return rotation_2d(theta_degrees * std::numbers::pi / 180.0);
    return random_orthogonal(p, rng);
}

Permutation initial_permutation(const InitSpec& init, const Permutation& truth, Rng& rng) {
    const std::size_t n = truth.size();
    switch (init.mode) {
    case InitMode::Truth: return truth;
    case InitMode::Identity: return Permutation::identity(n);
    case InitMode::Partial: return truth.compose(partial_shuffle(n, std::min(init.k, n), rng));
    case InitMode::Random: return random_permutation(n, rng);
    }
    throw ContractError("unknown init mode");
}

std::vector<TrialRecord> run_trial(const ExperimentConfig& config, std::size_t grid_index, std::size_t trial) {
    const double value = config.grid[grid_index];
    const GridPoint point = resolve(config, value);
    const Rng base(config.seed);

    Rng design_rng = config.fresh_design ? base.derive({grid_index, trial, kDesign})
                                         : base.derive({grid_index, kDesign});
    ProblemInstance inst;
    inst.X = generate_design(point.n, config.p, design_rng);
    inst.R = coefficient_matrix(config.p, config.theta_degrees, design_rng);
    Rng truth_rng = base.derive({grid_index, trial, kTruth});
    inst.pi_star = config.random_truth ? random_permutation(point.n, truth_rng) : Permutation::identity(point.n);
    inst.Sigma = covariance_for(config, point.sigma);

    Rng noise_rng = base.derive({grid_index, trial, kNoise});
    const Observations obs = generate_observations(inst, noise_rng);

    Rng init_rng = base.derive({grid_index, trial, kInit});
    const InitSpec init = point.shuffled_rows ? InitSpec{InitMode::Partial, *point.shuffled_rows} : config.init;
    const Permutation start = initial_permutation(init, inst.pi_star, init_rng);

    std::vector<TrialRecord> out;
    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        const EstimatorSpec& spec = config.estimators[e];
        const auto t0 = std::chrono::steady_clock::now();
        EstimateResult est;
        switch (spec.method) {
        case EstimatorSpec::Method::Alta: est = alta(obs.Y1, obs.Y2, start, spec.cost, config.limits); break;
        case EstimatorSpec::Method::Aloa: est = aloa(obs.Y1, obs.Y2, start, config.limits); break;
        case EstimatorSpec::Method::Brute: est = brute_force_tls(obs.Y1, obs.Y2); break;
        }
        const auto t1 = std::chrono::steady_clock::now();

        TrialRecord r;
        r.grid_index = grid_index;
        r.sweep_value = value;
        r.n = point.n;
        r.sigma = point.sigma;
        r.estimator = spec.label();
        r.estimator_index = e;
        r.trial = trial;
        r.procrustes_loss = procrustes_loss(inst.X, inst.pi_star, est.perm);
        r.quadratic_loss = quadratic_loss(inst.X, inst.pi_star, est.perm);
        r.hamming = hamming(est.perm, inst.pi_star);
        r.tls_objective = est.tls_objective;
        r.iterations = est.iterations;
        r.converged = est.converged;
        r.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        out.push_back(std::move(r));
    }
    return out;
}

std::string header_comment(const ExperimentConfig& config) {
    std::ostringstream ss;
    ss << "# stls-sweep v1 axis=" << to_string(config.axis) << " n=" << config.n << " p=" << config.p
       << " sigma=" << (config.Sigma ? std::string("file") : format_double(config.sigma))
       << " theta=" << format_double(config.theta_degrees) << " trials=" << config.trials
       << " seed=" << config.seed << " init=" << to_string(config.init)
       << " truth=" << (config.random_truth ? "random" : "identity")
       << " fresh_design=" << (config.fresh_design ? "true" : "false")
       << " max_iter=" << config.limits.max_iter << " tol=" << format_double(config.limits.tol);
    return ss.str();
}

} // namespace

std::string EstimatorSpec::label() const {
    switch (method) {
    case Method::Alta: return "alta_" + std::string(to_string(cost));
    case Method::Aloa: return "aloa";
    case Method::Brute: return "brute";
    }
    return "?";
}

std::string_view to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::Noise: return "noise";
    case SweepAxis::SampleSize: return "n";
    case SweepAxis::Snr: return "snr";
    case SweepAxis::Shuffle: return "shuffle";
    }
    return "?";
}

SweepAxis parse_sweep_axis(std::string_view text) {
    const std::string t = lower(text);
    if (t == "noise") return SweepAxis::Noise;
    if (t == "n") return SweepAxis::SampleSize;
    if (t == "snr") return SweepAxis::Snr;
    if (t == "shuffle") return SweepAxis::Shuffle;
    throw ContractError("unknown sweep axis '" + std::string(text) + "'");
}

std::string to_string(const InitSpec& init) {
    switch (init.mode) {
    case InitMode::Truth: return "truth";
    case InitMode::Identity: return "identity";
    case InitMode::Partial: return "partial=" + std::to_string(init.k);
    case InitMode::Random: return "random";
    }
    return "?";
}

InitSpec parse_init(std::string_view text) {
    const std::string t = lower(text);
    if (t == "truth") return {InitMode::Truth, 0};
    if (t == "identity") return {InitMode::Identity, 0};
    if (t == "random") return {InitMode::Random, 0};
    if (t.rfind("partial=", 0) == 0) {
        const std::string digits = t.substr(8);
        if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
            throw ContractError("init 'partial=K' needs a non-negative integer K");
        }
        return {InitMode::Partial, static_cast<std::size_t>(std::stoull(digits))};
    }
    throw ContractError("unknown init '" + std::string(text) + "'");
}

EstimatorSpec parse_estimator(std::string_view text) {
    const std::string t = lower(text);
    if (t == "aloa") return {EstimatorSpec::Method::Aloa, CostKind::C3};
    if (t == "brute") return {EstimatorSpec::Method::Brute, CostKind::C3};
    if (t.rfind("alta_", 0) == 0) return {EstimatorSpec::Method::Alta, parse_cost_kind(t.substr(5))};
    throw ContractError("unknown estimator '" + std::string(text) + "'");
}

void validate(const ExperimentConfig& config) {
    if (config.p < 1) throw ContractError("p must be at least 1");
    if (config.trials < 1) throw ContractError("trials must be at least 1");
    if (config.grid.empty()) throw ContractError("grid must not be empty");
    if (config.estimators.empty()) throw ContractError("at least one estimator is required");
    if (config.limits.max_iter < 1) throw ContractError("max_iter must be at least 1");
    if (!(config.sigma >= 0.0) || !std::isfinite(config.sigma)) throw ContractError("sigma must be finite and >= 0");
    if (config.Sigma) {
        require_covariance(*config.Sigma, config.p);
        if (config.axis == SweepAxis::Noise || config.axis == SweepAxis::Snr) {
            throw ContractError("noise and snr sweeps scale sigma; they cannot use a covariance file");
        }
    }
    const bool brute = std::any_of(config.estimators.begin(), config.estimators.end(),
                                   [](const EstimatorSpec& e) { return e.method == EstimatorSpec::Method::Brute; });
    for (double value : config.grid) {
        if (!std::isfinite(value)) throw ContractError("grid values must be finite");
        if (config.axis == SweepAxis::Noise && value < 0.0) throw ContractError("noise grid values must be >= 0");
        if ((config.axis == SweepAxis::SampleSize || config.axis == SweepAxis::Snr) &&
            (value < 1.0 || std::abs(value - std::round(value)) > 1e-9)) {
            throw ContractError("sample-size grid values must be positive integers");
        }
        if (config.axis == SweepAxis::Shuffle && (value < 0.0 || value > 1.0)) {
            throw ContractError("shuffle grid values are fractions in [0, 1]");
        }
        const GridPoint point = resolve(config, value);
        if (point.n < 2 * config.p) throw ContractError("every grid point needs n >= 2p");
        if (brute && point.n > 9) throw ContractError("brute estimator needs n <= 9");
    }
    if (config.init.mode == InitMode::Partial && config.init.k > config.n && config.axis != SweepAxis::SampleSize &&
        config.axis != SweepAxis::Snr) {
        throw ContractError("partial=K needs K <= n");
    }
}

SweepResult run_sweep(const ExperimentConfig& config) {
    validate(config);
    const std::size_t tasks = config.grid.size() * config.trials;
    std::vector<std::vector<TrialRecord>> slots(tasks);

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t task = next++; task < tasks; task = next++) {
            try {
                slots[task] = run_trial(config, task / config.trials, task % config.trials);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = tasks;
            }
        }
    };
    const std::size_t threads = std::max<std::size_t>(1, std::min(config.threads, tasks));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    SweepResult result;
    for (auto& slot : slots)
        for (auto& r : slot) result.records.push_back(std::move(r));
    std::sort(result.records.begin(), result.records.end(), [](const TrialRecord& a, const TrialRecord& b) {
        return std::tie(a.grid_index, a.estimator_index, a.trial) < std::tie(b.grid_index, b.estimator_index, b.trial);
    });

    for (std::size_t g = 0; g < config.grid.size(); ++g) {
        for (std::size_t e = 0; e < config.estimators.size(); ++e) {
            std::vector<double> losses;
            SummaryRow row;
            double quad = 0.0, ham = 0.0, conv = 0.0;
            for (const auto& r : result.records) {
                if (r.grid_index != g || r.estimator_index != e) continue;
                losses.push_back(r.procrustes_loss);
                quad += r.quadratic_loss;
                ham += static_cast<double>(r.hamming);
                conv += r.converged ? 1.0 : 0.0;
                row.n = r.n;
                row.sigma = r.sigma;
            }
            const auto count = static_cast<double>(losses.size());
            row.sweep_value = config.grid[g];
            row.estimator = config.estimators[e].label();
            row.trials = losses.size();
            double total = 0.0;
            for (double l : losses) total += l;
            row.mean_procrustes = total / count;
            row.q25_procrustes = quantile(losses, 0.25);
            row.median_procrustes = quantile(losses, 0.5);
            row.q75_procrustes = quantile(losses, 0.75);
            row.mean_quadratic = quad / count;
            row.mean_hamming = ham / count;
            row.converged_fraction = conv / count;
            result.summary.push_back(std::move(row));
        }
    }
    return result;
}

double quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ContractError("quantile: no data");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

void write_trials_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<TrialRecord>& records, bool timing) {
    out << header_comment(config) << '\n';
    out << "sweep_value,n,sigma,estimator,trial,procrustes_loss,quadratic_loss,hamming,tls_objective,iterations,converged";
    if (timing) out << ",wall_ms";
    out << '\n';
    for (const auto& r : records) {
        out << format_double(r.sweep_value) << ',' << r.n << ',' << format_double(r.sigma) << ',' << r.estimator << ','
            << r.trial << ',' << format_double(r.procrustes_loss) << ',' << format_double(r.quadratic_loss) << ','
            << r.hamming << ',' << format_double(r.tls_objective) << ',' << r.iterations << ','
            << (r.converged ? 1 : 0);
        if (timing) out << ',' << format_double(r.wall_ms);
        out << '\n';
    }
}

void write_summary_csv(std::ostream& out, const ExperimentConfig& config, const std::vector<SummaryRow>& summary) {
    out << header_comment(config) << '\n';
    out << "sweep_value,n,sigma,estimator,trials,mean_procrustes,q25_procrustes,median_procrustes,q75_procrustes,"
           "mean_quadratic,mean_hamming,converged_fraction\n";
    for (const auto& s : summary) {
        out << format_double(s.sweep_value) << ',' << s.n << ',' << format_double(s.sigma) << ',' << s.estimator << ','
            << s.trials << ',' << format_double(s.mean_procrustes) << ',' << format_double(s.q25_procrustes) << ','
            << format_double(s.median_procrustes) << ',' << format_double(s.q75_procrustes) << ','
            << format_double(s.mean_quadratic) << ',' << format_double(s.mean_hamming) << ','
            << format_double(s.converged_fraction) << '\n';
    }
}

void write_svg(std::ostream& out, const ExperimentConfig& config, const std::vector<SummaryRow>& summary) {
    constexpr double width = 640, height = 400, left = 60, right = 150, top = 30, bottom = 50;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    static const char* const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

    const auto [xmin_it, xmax_it] = std::minmax_element(config.grid.begin(), config.grid.end());
    const double xmin = *xmin_it;
    const double xmax = *xmax_it > xmin ? *xmax_it : xmin + 1.0;
    double ymax = 0.0;
    for (const auto& s : summary) ymax = std::max({ymax, s.q75_procrustes, s.mean_procrustes});
    if (ymax <= 0.0) ymax = 1.0;

    auto sx = [&](double x) { return left + (x - xmin) / (xmax - xmin) * plot_w; };
    auto sy = [&](double y) { return top + plot_h - y / ymax * plot_h; };
    auto num = [](double v) {
        std::ostringstream ss;
        ss.setf(std::ios::fixed);
        ss.precision(2);
        ss << v;
        return ss.str();
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
        << top + plot_h << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
        << "\" stroke=\"black\"/>\n";
    for (double x : config.grid) {
        out << "<text x=\"" << num(sx(x)) << "\" y=\"" << top + plot_h + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
            << format_double(x) << "</text>\n";
    }
    for (int k = 0; k <= 4; ++k) {
        const double y = ymax * k / 4.0;
        out << "<text x=\"" << left - 6 << "\" y=\"" << num(sy(y) + 3) << "\" font-size=\"10\" text-anchor=\"end\">"
            << num(y) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10 << "\" font-size=\"12\" text-anchor=\"middle\">"
        << to_string(config.axis) << "</text>\n";
    out << "<text x=\"14\" y=\"" << top + plot_h / 2 << "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 14 "
        << top + plot_h / 2 << ")\">normalized Procrustes loss</text>\n";

    for (std::size_t e = 0; e < config.estimators.size(); ++e) {
        const char* colour = palette[e % std::size(palette)];
        out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
            const SummaryRow& s = summary[g * config.estimators.size() + e];
            out << num(sx(s.sweep_value)) << ',' << num(sy(s.mean_procrustes)) << ' ';
        }
        out << "\"/>\n";
        for (std::size_t g = 0; g < config.grid.size(); ++g) {
            const SummaryRow& s = summary[g * config.estimators.size() + e];
            out << "<line x1=\"" << num(sx(s.sweep_value)) << "\" y1=\"" << num(sy(s.q25_procrustes)) << "\" x2=\""
                << num(sx(s.sweep_value)) << "\" y2=\"" << num(sy(s.q75_procrustes)) << "\" stroke=\"" << colour
                << "\"/>\n";
        }
        out << "<text x=\"" << left + plot_w + 10 << "\" y=\"" << top + 14 * (e + 1) << "\" font-size=\"11\" fill=\""
            << colour << "\">" << config.estimators[e].label() << "</text>\n";
    }
    out << "</svg>\n";
}

// ---------------------------------------------------------------------------

std::vector<BoundRow> run_bound(const BoundConfig& config) {
    if (config.n < 1 || config.p < 1 || config.n < config.p) throw ContractError("bound: requires n >= p >= 1");
    if (config.sigmas.empty() || config.etas.empty()) throw ContractError("bound: sigma and eta lists must be non-empty");
    Rng rng = Rng(config.seed).derive(kDesign);
    const Matrix X = generate_design(config.n, config.p, rng);
    const Matrix R = coefficient_matrix(config.p, config.theta_degrees, rng);
    const auto pdim = static_cast<Eigen::Index>(config.p);

    std::vector<BoundRow> rows;
    for (double sigma : config.sigmas) {
        for (double eta : config.etas) {
            BoundInputs in{X, R, sigma * sigma * Matrix::Identity(pdim, pdim), eta, config.c};
            const BoundValue v = loss_bound(in);
            BoundRow row;
            row.sigma = sigma;
            row.eta = eta;
            row.n = config.n;
            row.p = config.p;
            row.x_norm_sq = X.squaredNorm();
            row.lambda1 = sigma * sigma;
            row.a_n = v.a_n;
            row.snr = v.snr;
            row.bound = v.bound;
            row.probability_statement = v.probability_statement;
            row.probability_derivation = v.probability_derivation;
            row.noiseless = v.noiseless;
            rows.push_back(row);
        }
    }
    return rows;
}

void write_bound_csv(std::ostream& out, const std::vector<BoundRow>& rows) {
    out << "sigma,eta,n,p,x_norm_sq,lambda1,a_n,snr,bound,probability_statement,probability_derivation,noiseless\n";
    for (const auto& r : rows) {
        out << format_double(r.sigma) << ',' << format_double(r.eta) << ',' << r.n << ',' << r.p << ','
            << format_double(r.x_norm_sq) << ',' << format_double(r.lambda1) << ',' << format_double(r.a_n) << ','
            << format_double(r.snr) << ',' << format_double(r.bound) << ','
            << format_double(r.probability_statement) << ',' << format_double(r.probability_derivation) << ','
            << (r.noiseless ? 1 : 0) << '\n';
    }
}

void write_bound_report(std::ostream& out, const std::vector<BoundRow>& rows) {
    auto clip = [](double v) { return std::clamp(v, 0.0, 1.0); };
    for (const auto& r : rows) {
        out << "n=" << r.n << " p=" << r.p << " sigma=" << format_double(r.sigma) << " eta=" << format_double(r.eta)
            << "\n  bound                  = " << format_double(r.bound)
            << "\n  a_n                    = " << format_double(r.a_n)
            << "\n  snr                    = " << format_double(r.snr)
            << "\n  probability (stated)   >= " << format_double(clip(r.probability_statement))
            << "\n  probability (derived)  >= " << format_double(clip(r.probability_derivation))
            << (r.noiseless ? "\n  (noiseless: bound is 0)" : "") << '\n';
    }
}

// ---------------------------------------------------------------------------

std::string_view to_string(LemmaKind kind) {
    switch (kind) {
    case LemmaKind::Pql: return "pql";
    case LemmaKind::MaxUv: return "maxuv";
    case LemmaKind::EigTail: return "eigtail";
    }
    return "?";
}

LemmaKind parse_lemma_kind(std::string_view text) {
    const std::string t = lower(text);
    if (t == "pql") return LemmaKind::Pql;
    if (t == "maxuv") return LemmaKind::MaxUv;
    if (t == "eigtail") return LemmaKind::EigTail;
    throw ContractError("unknown lemma kind '" + std::string(text) + "'");
}

LemmaReport run_lemma_suite(const LemmaConfig& config) {
    if (config.trials < 1) throw ContractError("lemma: trials must be at least 1");
    const Rng base(config.seed);
    LemmaReport report;

    // Random (n, p) with p <= max_p and p <= n <= max_n.
    auto draw_shape = [&](Rng& rng) {
        const std::size_t p = 1 + rng.below(config.max_p);
        const std::size_t lo = std::max<std::size_t>(p, 2);
        if (config.max_n < lo) throw ContractError("lemma: max_n too small for max_p");
        const std::size_t n = lo + rng.below(config.max_n - lo + 1);
        return std::pair{n, p};
    };

    switch (config.kind) {
    case LemmaKind::Pql: {
        report.header = {"trial", "n", "p", "lhs", "rhs", "ok"};
        for (std::size_t t = 0; t < config.trials; ++t) {
            Rng rng = base.derive({t, kLemma});
            const auto [n, p] = draw_shape(rng);
            const Matrix X = generate_design(n, p, rng);
            const Permutation pi = random_permutation(n, rng);
            const LemmaSides s = procrustes_gap(X, pi);
            const bool ok = s.lhs <= s.rhs + 1e-9;
            ++report.checks;
            report.violations += ok ? 0 : 1;
            report.rows.push_back({std::to_string(t), std::to_string(n), std::to_string(p), format_double(s.lhs),
                                   format_double(s.rhs), ok ? "1" : "0"});
        }
        break;
    }
    case LemmaKind::MaxUv: {
        report.header = {"trial", "n", "p", "sampled", "constructed", "nuclear", "ok"};
        for (std::size_t t = 0; t < config.trials; ++t) {
            Rng rng = base.derive({t, kLemma});
            const auto [n, p] = draw_shape(rng);
            const Matrix X = generate_design(n, p, rng);
            // Trial 0 pins the identity case.
            const Permutation pi = t == 0 ? Permutation::identity(n) : random_permutation(n, rng);
            const MaxUvSides s = trace_max_check(X, pi, rng, config.samples);
            const double slack = 1e-9 * std::max(1.0, s.rhs);
            const bool ok = s.lhs <= s.rhs + slack && s.lhs >= s.rhs - 0.02 * std::abs(s.rhs) &&
                            std::abs(s.constructed - s.rhs) <= slack;
            ++report.checks;
            report.violations += ok ? 0 : 1;
            report.rows.push_back({std::to_string(t), std::to_string(n), std::to_string(p), format_double(s.lhs),
                                   format_double(s.constructed), format_double(s.rhs), ok ? "1" : "0"});
        }
        break;
    }
    case LemmaKind::EigTail: {
        report.header = {"n", "p", "eps", "c", "draws", "threshold", "freq_sum", "freq_joint", "rhs", "ok"};
        const auto pdim = static_cast<Eigen::Index>(config.tail_p);
        const Matrix Sigma = Matrix::Identity(pdim, pdim);
        Rng rng = base.derive(kLemma);
        const TailBound rhs = eig_tail_rhs(Sigma, config.tail_n, config.tail_eps, config.c);
        const TailFrequency f = eig_tail_empirical(Sigma, config.tail_n, config.tail_eps, config.trials, rng);
        const bool ok = f.frequency_sum() <= rhs.raw;
        report.checks = 1;
        report.violations = ok ? 0 : 1;
        report.rows.push_back({std::to_string(config.tail_n), std::to_string(config.tail_p),
                               format_double(config.tail_eps), format_double(config.c), std::to_string(f.draws),
                               format_double(f.threshold), format_double(f.frequency_sum()),
                               format_double(f.frequency_joint()), format_double(rhs.raw), ok ? "1" : "0"});
        break;
    }
    }

    std::ostringstream ss;
    ss << "lemma " << to_string(config.kind) << ": " << report.checks << " checks, " << report.violations
       << " violations";
    report.summary = ss.str();
    return report;
}

void write_lemma_csv(std::ostream& out, const LemmaReport& report) {
    for (std::size_t i = 0; i < report.header.size(); ++i) out << (i ? "," : "") << report.header[i];
    out << '\n';
    for (const auto& row : report.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

// ---------------------------------------------------------------------------

std::vector<CertificateRow> run_certificate(const CertificateConfig& config) {
    if (config.ns.empty() || config.sigmas.empty()) throw ContractError("certificate: ns and sigmas must be non-empty");
    for (auto n : config.ns) {
        if (n < 2 * config.p || n > 9) throw ContractError("certificate: each n must satisfy 2p <= n <= 9");
    }
    const Rng base(config.seed);
    const auto pdim = static_cast<Eigen::Index>(config.p);
    std::vector<CertificateRow> rows;
    for (std::size_t t = 0; t < config.trials; ++t) {
        CertificateRow row;
        row.trial = t;
        row.n = config.ns[t % config.ns.size()];
        row.sigma = config.sigmas[(t / config.ns.size()) % config.sigmas.size()];

        Rng design_rng = base.derive({t, kDesign});
        ProblemInstance inst;
        inst.X = generate_design(row.n, config.p, design_rng);
        inst.R = coefficient_matrix(config.p, config.theta_degrees, design_rng);
        Rng truth_rng = base.derive({t, kTruth});
        inst.pi_star = random_permutation(row.n, truth_rng);
        inst.Sigma = row.sigma * row.sigma * Matrix::Identity(pdim, pdim);
        Rng noise_rng = base.derive({t, kNoise});
        const Observations obs = generate_observations(inst, noise_rng);

        const EstimateResult est = brute_force_tls(obs.Y1, obs.Y2);
        row.objective_hat = est.objective;
        row.objective_truth = tls_objective(obs.Y2, inst.pi_star.apply(obs.Y1));
        row.certificate_ok = row.objective_hat <= row.objective_truth + 1e-10;
        row.procrustes_loss = procrustes_loss(inst.X, inst.pi_star, est.perm);
        row.quadratic_loss = quadratic_loss(inst.X, inst.pi_star, est.perm);
        row.hamming = hamming(est.perm, inst.pi_star);
        row.bound = loss_bound({inst.X, inst.R, inst.Sigma, config.eta, config.c}).bound;
        // Noiseless rows have bound 0; allow rounding in the loss.
        row.exceeds_bound = row.procrustes_loss > row.bound + 1e-12;
        rows.push_back(row);
    }
    return rows;
}

void write_certificate_csv(std::ostream& out, const std::vector<CertificateRow>& rows) {
    out << "trial,n,sigma,objective_hat,objective_truth,certificate_ok,procrustes_loss,quadratic_loss,hamming,bound,"
           "exceeds_bound\n";
    for (const auto& r : rows) {
        out << r.trial << ',' << r.n << ',' << format_double(r.sigma) << ',' << format_double(r.objective_hat) << ','
            << format_double(r.objective_truth) << ',' << (r.certificate_ok ? 1 : 0) << ','
            << format_double(r.procrustes_loss) << ',' << format_double(r.quadratic_loss) << ',' << r.hamming << ','
            << format_double(r.bound) << ',' << (r.exceeds_bound ? 1 : 0) << '\n';
    }
}

} // namespace stls
