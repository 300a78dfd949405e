#include <hlasso/tuning.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include <hlasso/errors.hpp>
#include <hlasso/penalty.hpp>

namespace hlasso {

namespace {

Matrix take_rows(const Matrix& X, const std::vector<Index>& rows)
{
    Matrix out(static_cast<Index>(rows.size()), X.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = X.row(rows[i]);
    return out;
}

Vector take(const Vector& y, const std::vector<Index>& rows)
{
    Vector out(static_cast<Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = y(rows[i]);
    return out;
}

bool both_classes(const Vector& y)
{
    return (y.array() == 0.0).any() && (y.array() == 1.0).any();
}

Vector weights_for(const TuneConfig& cfg, const StandardizedDataset& ds)
{
    if (cfg.method == sim::Method::adaptive_hlasso) return make_weights(OlsPowerWeights{cfg.gamma}, ds);
    return Vector::Ones(ds.n_vars());
}

/// Held-out loss for each lambda of a descending grid.
std::vector<double> fold_losses(const TuneConfig& cfg, const GroupStructure& g, const std::vector<double>& grid,
                                const Matrix& X_train, const Vector& y_train, const Matrix& X_test,
                                const Vector& y_test)
{
    const StandardizedDataset ds = StandardizedDataset::standardize(X_train, y_train, cfg.mode);
    const Vector w = weights_for(cfg, ds);
    const double n_test = static_cast<double>(y_test.size());
    std::vector<double> losses;
    losses.reserve(grid.size());

    if (cfg.mode == ResponseMode::binary) {
        const Matrix Xs = ds.transform(X_test);
        for (const auto& f : fit_logistic_path(ds, g, grid, w, cfg.options)) {
            const Vector eta = (Xs * f.beta).array() + f.intercept;
            losses.push_back(-logistic_loglik(eta, y_test) / n_test);
        }
        return losses;
    }

    auto squared_error = [&](const Vector& beta_std) {
        const auto orig = destandardize(beta_std, 0.0, ds);
        const Vector pred = (X_test * orig.beta).array() + orig.intercept;
        return (y_test - pred).squaredNorm() / n_test;
    };
    if (cfg.method == sim::Method::lasso) {
        Vector warm;
        for (double lambda : grid) {
            const LinearFit f = fit_lasso(ds, lambda, {}, warm, cfg.options.fit.inner);
            warm = f.beta;
            losses.push_back(squared_error(f.beta));
        }
        return losses;
    }
    for (const auto& f : fit_path(ds, g, grid, w, cfg.options.fit)) losses.push_back(squared_error(f.beta));
    return losses;
}

} // namespace

std::vector<int> make_folds(const Vector& y, int k, bool stratified, std::uint64_t seed)
{
    const Index n = y.size();
    if (k < 2) throw InputError("k-fold tuning needs k >= 2");
    if (n < k) throw InputError("k-fold tuning needs at least k rows");
    std::mt19937_64 rng(seed);
    std::vector<int> fold(static_cast<std::size_t>(n));

    std::vector<std::vector<Index>> strata(stratified ? 2 : 1);
    for (Index i = 0; i < n; ++i) {
        const std::size_t s = stratified ? static_cast<std::size_t>(y(i) == 1.0) : 0;
        strata[s].push_back(i);
    }
    int next = 0;
    for (auto& rows : strata) {
        std::shuffle(rows.begin(), rows.end(), rng);
        for (Index i : rows) {
            fold[static_cast<std::size_t>(i)] = next;
            next = (next + 1) % k;
        }
    }
    return fold;
}

TuneResult tune_kfold(const Matrix& X_raw, const Vector& y_raw, const GroupStructure& g, const TuneConfig& cfg)
{
    if (cfg.method == sim::Method::ols) throw InputError("ols has no tuning parameter");
    const bool binary = cfg.mode == ResponseMode::binary;
    if (binary && cfg.method == sim::Method::lasso) {
        throw InputError("binary responses are tuned with hlasso or adaptive_hlasso");
    }
    if (X_raw.rows() != y_raw.size()) throw InputError("design rows and response length differ");
    if (cfg.k < 2 || X_raw.rows() < cfg.k) throw InputError("k-fold tuning needs 2 <= k <= n");

    TuneResult result;
    result.grid = cfg.grid;
    if (result.grid.empty()) {
        const StandardizedDataset full = StandardizedDataset::standardize(X_raw, y_raw, cfg.mode);
        const Vector w = weights_for(cfg, full);
        result.grid = binary ? logistic_lambda_grid(full, w)
                     : cfg.method == sim::Method::lasso ? lasso_lambda_grid(full)
                                                         : hlasso_lambda_grid(full, w);
    }
    for (double l : result.grid) {
        if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("lambda values must be finite and >= 0");
    }
    std::vector<double> unique = result.grid;
    std::sort(unique.begin(), unique.end(), std::greater<>());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<int> fold;
    for (int attempt = 0;; ++attempt) {
        if (attempt == 10) throw InputError("could not draw folds whose training sets contain both classes");
        fold = make_folds(y_raw, cfg.k, binary, cfg.seed + static_cast<std::uint64_t>(attempt));
        bool good = true;
        for (int f = 0; f < cfg.k && binary; ++f) {
            std::vector<Index> train;
            for (Index i = 0; i < y_raw.size(); ++i) {
                if (fold[static_cast<std::size_t>(i)] != f) train.push_back(i);
            }
            good = good && both_classes(take(y_raw, train));
        }
        if (good) break;
        ++result.refolds;
    }

    std::vector<std::vector<double>> per_fold;
    for (int f = 0; f < cfg.k; ++f) {
        std::vector<Index> train, test;
        for (Index i = 0; i < y_raw.size(); ++i) (fold[static_cast<std::size_t>(i)] == f ? test : train).push_back(i);
        per_fold.push_back(fold_losses(cfg, g, unique, take_rows(X_raw, train), take(y_raw, train),
                                       take_rows(X_raw, test), take(y_raw, test)));
    }

    std::vector<double> mean(unique.size(), 0.0), se(unique.size(), 0.0);
    for (std::size_t l = 0; l < unique.size(); ++l) {
        std::vector<double> v;
        for (const auto& pf : per_fold) v.push_back(pf[l]);
        const sim::Summary s = sim::summarize(v);
        mean[l] = s.mean;
        se[l] = s.se;
    }
    // unique is descending, so the first minimum is the largest lambda among ties.
    std::size_t best = 0;
    for (std::size_t l = 1; l < unique.size(); ++l) {
        if (mean[l] < mean[best]) best = l;
    }
    result.lambda = unique[best];

    for (double l : result.grid) {
        const auto pos = static_cast<std::size_t>(std::find(unique.begin(), unique.end(), l) - unique.begin());
        result.cv_mean.push_back(mean[pos]);
        result.cv_se.push_back(se[pos]);
    }
    return result;
}

} // namespace hlasso
