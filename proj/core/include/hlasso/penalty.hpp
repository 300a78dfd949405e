#pragma once

#include <variant>
#include <vector>

#include <hlasso/dataset.hpp>
#include <hlasso/types.hpp>

namespace hlasso {

struct UnitWeights {};

/// w_j = 1 / |beta_ols_j|^gamma.
struct OlsPowerWeights
{
    double gamma = 1.0;
};

/// w_j = 1 / |beta_ridge_j|^gamma with ridge penalty `ridge` on the
/// standardized scale.
struct RidgePowerWeights
{
    double gamma = 1.0;
    double ridge = 1.0;
};

using WeightRecipe = std::variant<UnitWeights, OlsPowerWeights, RidgePowerWeights>;

/// Penalty level(s) and per-variable weights. All-ones weights give the plain
/// hierarchical lasso.
struct PenaltySpec
{
    std::vector<double> lambdas;
    Vector weights;
    WeightRecipe recipe = UnitWeights{};

    /// Single-lambda spec with unit weights over n_vars variables.
    static PenaltySpec plain(double lambda, Index n_vars);

    double lambda() const;  ///< Throws InputError unless exactly one lambda.
    void validate(Index n_vars) const;
};

/// w_j = 1 / max(|beta_pilot_j|, floor)^gamma.
Vector adaptive_weights(const Vector& beta_pilot, double gamma, double floor = 1e-8);

/// Least-squares pilot on the standardized design (requires n > P).
Vector ols_estimate(const StandardizedDataset& ds);

/// Ridge pilot: (X'X + ridge I)^{-1} X'y on the standardized design.
Vector ridge_estimate(const StandardizedDataset& ds, double ridge);

/// Evaluates a recipe on the standardized data.
Vector make_weights(const WeightRecipe& recipe, const StandardizedDataset& ds, double floor = 1e-8);

} // namespace hlasso
