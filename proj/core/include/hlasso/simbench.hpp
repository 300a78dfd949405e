#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <hlasso/engine.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/types.hpp>

namespace hlasso::sim {

/// 16 latent covariates: X1..X8 continuous, X9..X16 quartile-discretized.
inline constexpr Index n_raw = 16;
/// 8 continuous groups x (x, x^2, x^3, x^4) + 8 categorical groups x 3 dummies.
inline constexpr Index n_expanded = 56;
inline constexpr Index n_groups = 16;

enum class Method { hlasso, adaptive_hlasso, lasso, ols };

std::string to_string(Method m);
Method parse_method(const std::string& name);  ///< Throws InputError.

struct Covariates
{
    Matrix raw;       ///< n x 16
    Matrix expanded;  ///< n x 56, grouped column order
};

/// Z_1..Z_16, W iid N(0,1); X_j = (Z_j + W) / sqrt(2); X_9..X_16 cut at the
/// standard-normal quartiles into {0,1,2,3}. Continuous columns expand to raw
/// powers 1..4, categorical ones to indicators of levels 0, 1, 2.
Covariates gen_covariates(Index n, std::mt19937_64& rng);
Covariates gen_covariates(Index n, std::uint64_t seed);

/// Expanded design column layout as a group structure (K = 16).
GroupStructure design_groups();

/// Printed coefficients of the two simulation cases on the expanded basis.
Vector true_beta(int sim_case);

/// y = X beta_true + N(0, sigma^2) noise.
Vector gen_response(const Matrix& expanded, int sim_case, double sigma, std::mt19937_64& rng);
Vector gen_response(const Matrix& expanded, int sim_case, double sigma, std::uint64_t seed);

/// sigma = sqrt(Var(X'beta) / snr) with Var estimated from mc_n fresh draws.
double calibrate_sigma(const Vector& beta, Index mc_n, std::uint64_t seed, double snr = 3.0);
double calibrate_sigma(int sim_case, Index mc_n, std::uint64_t seed = 20240601, double snr = 3.0);

/// mean over rows of (intercept + x'beta_hat - x'beta_true)^2, all on the raw scale.
double model_error(const Matrix& X, const Vector& beta_hat, double intercept, const Vector& beta_true);

/// Lambda grid: explicit log-spaced [min, max] when both are set, otherwise
/// data-driven from the training set.
struct GridSpec
{
    int count = 50;
    double ratio = 1e-4;
    std::optional<double> min;
    std::optional<double> max;

    std::vector<double> explicit_grid() const;  ///< Requires min and max.
    static GridSpec parse(const std::string& text);  ///< "min:max:count"
};

struct BenchConfig
{
    int sim_case = 1;
    Method method = Method::hlasso;
    int reps = 50;
    GridSpec grid;
    std::uint64_t seed = 1;
    int jobs = 0;                   ///< 0 = hardware concurrency
    Index n_train = 400;
    Index n_valid = 200;
    Index n_test = 10000;
    double gamma = 1.0;             ///< Adaptive weight exponent.
    std::optional<double> sigma;    ///< Calibrated when unset.
    Index sigma_mc_n = 1'000'000;
    FitOptions fit;
};

struct RepResult
{
    int rep = 0;
    bool ok = false;
    std::string error;
    double mse = 0.0;
    double zero_var_pct = 0.0;
    double nonzero_var_pct = 0.0;
    double lambda = 0.0;
    std::vector<bool> selected;

    // Fit diagnostics over every hierarchical-lasso fit of the rep's path.
    int fits = 0;
    int converged_fits = 0;
    double max_identity_residual = 0.0;  ///< Over converged fits with lambda > 0.
    int ascent_violations = 0;
};

struct Summary
{
    double mean = 0.0;
    double se = 0.0;  ///< sd / sqrt(reps)
};

struct SimReport
{
    BenchConfig config;
    double sigma = 0.0;
    std::vector<RepResult> reps;
    Summary mse;
    Summary zero_var_pct;
    Summary nonzero_var_pct;
    int failed_reps = 0;
};

/// Selection metrics on the expanded coefficient vector.
double zero_var_pct(const Vector& beta_hat, const Vector& beta_true);
double nonzero_var_pct(const Vector& beta_hat, const Vector& beta_true);

/// One replication: simulate, tune lambda on the validation set, score on
/// the test set. Never throws; failures come back with ok = false.
RepResult run_replication(const BenchConfig& cfg, double sigma, int rep);

SimReport run_benchmark(const BenchConfig& cfg);

Summary summarize(const std::vector<double>& values);

} // namespace hlasso::sim
