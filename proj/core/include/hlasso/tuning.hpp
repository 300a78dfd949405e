#pragma once

#include <cstdint>
#include <vector>

#include <hlasso/dataset.hpp>
#include <hlasso/engine.hpp>
#include <hlasso/group_structure.hpp>
#include <hlasso/logistic.hpp>
#include <hlasso/simbench.hpp>

namespace hlasso {

struct TuneConfig
{
    sim::Method method = sim::Method::hlasso;  ///< ols has no tuning parameter and is rejected.
    int k = 5;
    std::vector<double> grid;                  ///< Any order, duplicates allowed; empty = data-driven.
    std::uint64_t seed = 1;
    ResponseMode mode = ResponseMode::gaussian;
    double gamma = 1.0;
    LogisticOptions options;
};

struct TuneResult
{
    double lambda = 0.0;
    std::vector<double> grid;     ///< As evaluated, same order as the input grid.
    std::vector<double> cv_mean;  ///< Mean held-out loss per grid entry.
    std::vector<double> cv_se;
    int refolds = 0;              ///< Extra fold draws needed to give every training fold both classes.
};

/// k-fold cross-validation on raw data. Folds are stratified by class for
/// binary responses. Loss is squared error (Gaussian) or mean negative
/// log-likelihood (binary). The minimizing lambda wins; ties go to the larger
/// lambda.
TuneResult tune_kfold(const Matrix& X_raw, const Vector& y_raw, const GroupStructure& g, const TuneConfig& cfg);

/// Fold label per row.
std::vector<int> make_folds(const Vector& y, int k, bool stratified, std::uint64_t seed);

} // namespace hlasso
