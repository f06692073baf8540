#pragma once

#include "stls/estimators.hpp"
#include "stls/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace stls {

enum class SweepAxis { Noise, SampleSize, Snr, Shuffle };

enum class InitMode { Truth, Identity, Partial, Random };

struct InitSpec {
    InitMode mode = InitMode::Truth;
    std::size_t k = 0; // rows shuffled for InitMode::Partial
};

struct EstimatorSpec {
    enum class Method { Alta, Aloa, Brute };
    Method method = Method::Alta;
    CostKind cost = CostKind::C3; // used by Alta only

    [[nodiscard]] std::string label() const;
};

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view text);
std::string to_string(const InitSpec& init);
/// "truth", "identity", "random" or "partial=K".
InitSpec parse_init(std::string_view text);
/// "alta_c3", "aloa", "brute"; ALTA labels need a cost suffix.
EstimatorSpec parse_estimator(std::string_view text);

struct ExperimentConfig {
    std::size_t n = 60;
    std::size_t p = 2;
    double sigma = 0.2;
    std::optional<Matrix> Sigma; // full covariance; replaces sigma^2 I
    double theta_degrees = 60.0;
    std::vector<EstimatorSpec> estimators;
    InitSpec init;
    bool random_truth = false; // pi_star identity unless set
    std::size_t trials = 10;
    std::uint64_t seed = 1;
    SweepAxis axis = SweepAxis::Noise;
    std::vector<double> grid;
    bool fresh_design = true;
    IterationLimits limits;
    std::size_t threads = 1;
};

/// Throws ContractError describing the first problem found.
void validate(const ExperimentConfig& config);

struct TrialRecord {
    std::size_t grid_index = 0;
    double sweep_value = 0.0;
    std::size_t n = 0;
    double sigma = 0.0;
    std::string estimator;
    std::size_t estimator_index = 0;
    std::size_t trial = 0;
    double procrustes_loss = 0.0;
    double quadratic_loss = 0.0;
    std::size_t hamming = 0;
    double tls_objective = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double wall_ms = 0.0;
};

struct SummaryRow {
    double sweep_value = 0.0;
    std::size_t n = 0;
    double sigma = 0.0;
    std::string estimator;
    std::size_t trials = 0;
    double mean_procrustes = 0.0;
    double q25_procrustes = 0.0;
    double median_procrustes = 0.0;
    double q75_procrustes = 0.0;
    double mean_quadratic = 0.0;
    double mean_hamming = 0.0;
    double converged_fraction = 0.0;
};

struct SweepResult {
    std::vector<TrialRecord> records; // sorted by (grid, estimator, trial)
    std::vector<SummaryRow> summary;  // one row per (grid, estimator)
};

/// Runs every (grid value, trial) pair, each on its own RNG stream keyed by
/// (seed, grid index, trial index). Output is independent of `threads`.
SweepResult run_sweep(const ExperimentConfig& config);

/// Linear-interpolation quantile of unsorted data, q in [0, 1].
double quantile(std::vector<double> values, double q);

void write_trials_csv(std::ostream& out, const ExperimentConfig& config,
                      const std::vector<TrialRecord>& records, bool timing);
void write_summary_csv(std::ostream& out, const ExperimentConfig& config,
                       const std::vector<SummaryRow>& summary);
/// Line chart of mean Procrustes loss per estimator with (25%, 75%) bars.
void write_svg(std::ostream& out, const ExperimentConfig& config,
               const std::vector<SummaryRow>& summary);

// ---------------------------------------------------------------------------

struct BoundConfig {
    std::size_t n = 300;
    std::size_t p = 2;
    std::vector<double> sigmas{0.2};
    std::vector<double> etas{1.0};
    double c = 1.0 / 32.0;
    double theta_degrees = 60.0;
    std::uint64_t seed = 1;
};

struct BoundRow {
    double sigma = 0.0;
    double eta = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
    double x_norm_sq = 0.0;
    double lambda1 = 0.0;
    double a_n = 0.0;
    double snr = 0.0;
    double bound = 0.0;
    double probability_statement = 0.0;
    double probability_derivation = 0.0;
    bool noiseless = false;
};

std::vector<BoundRow> run_bound(const BoundConfig& config);
void write_bound_csv(std::ostream& out, const std::vector<BoundRow>& rows);
void write_bound_report(std::ostream& out, const std::vector<BoundRow>& rows);

// ---------------------------------------------------------------------------

enum class LemmaKind { Pql, MaxUv, EigTail };
std::string_view to_string(LemmaKind kind);
LemmaKind parse_lemma_kind(std::string_view text);

struct LemmaConfig {
    LemmaKind kind = LemmaKind::Pql;
    std::size_t trials = 1000;
    std::uint64_t seed = 1;
    std::size_t max_n = 12;      // pql / maxuv
    std::size_t max_p = 3;       // pql / maxuv
    std::size_t samples = 5000;  // maxuv random pairs per trial
    std::size_t tail_n = 2000;   // eigtail
    std::size_t tail_p = 2;      // eigtail
    double tail_eps = 0.5;       // eigtail
    double c = 1.0 / 32.0;       // eigtail
};

struct LemmaReport {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
    std::size_t checks = 0;
    std::size_t violations = 0;
    std::string summary;
};

LemmaReport run_lemma_suite(const LemmaConfig& config);
void write_lemma_csv(std::ostream& out, const LemmaReport& report);

// ---------------------------------------------------------------------------

struct CertificateConfig {
    std::vector<std::size_t> ns{4, 5, 6, 7, 8};
    std::size_t p = 2;
    std::vector<double> sigmas{0.0, 0.1, 0.3};
    std::size_t trials = 200;
    std::uint64_t seed = 1;
    double theta_degrees = 60.0;
    double eta = 1.0;
    double c = 1.0 / 32.0;
};

struct CertificateRow {
    std::size_t trial = 0;
    std::size_t n = 0;
    double sigma = 0.0;
    double objective_hat = 0.0;
    double objective_truth = 0.0;
    bool certificate_ok = false;
    double procrustes_loss = 0.0;
    double quadratic_loss = 0.0;
    std::size_t hamming = 0;
    double bound = 0.0;
    bool exceeds_bound = false;
};

/// Exhaustive TLS estimates on small random instances (random pi_star,
/// condition-number-1 design), checked against the objective at the truth
/// and against the Procrustes-loss bound. Trial t uses n = ns[t % |ns|] and
/// sigma = sigmas[(t / |ns|) % |sigmas|].
std::vector<CertificateRow> run_certificate(const CertificateConfig& config);
void write_certificate_csv(std::ostream& out, const std::vector<CertificateRow>& rows);

} // namespace stls
