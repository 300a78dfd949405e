#include <hlasso/penalty.hpp>

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <hlasso/errors.hpp>

namespace hlasso {

PenaltySpec PenaltySpec::plain(double lambda, Index n_vars)
{
    return PenaltySpec{{lambda}, Vector::Ones(n_vars), UnitWeights{}};
}

double PenaltySpec::lambda() const
{
    if (lambdas.size() != 1) {
        throw InputError("expected a single lambda, got " + std::to_string(lambdas.size()));
    }
    return lambdas.front();
}

void PenaltySpec::validate(Index n_vars) const
{
    for (double l : lambdas) {
        if (!(l >= 0.0) || !std::isfinite(l)) throw InputError("lambda must be finite and >= 0");
    }
    if (weights.size() != n_vars) {
        throw InputError("weight vector has length " + std::to_string(weights.size()) + ", expected " +
                         std::to_string(n_vars));
    }
    if (!weights.allFinite() || (weights.array() <= 0.0).any()) {
        throw InputError("weights must be finite and positive");
    }
    auto check_gamma = [](double g) {
        if (!(g > 0.0)) throw InputError("gamma must be positive");
    };
    if (auto* o = std::get_if<OlsPowerWeights>(&recipe)) check_gamma(o->gamma);
    if (auto* r = std::get_if<RidgePowerWeights>(&recipe)) {
        check_gamma(r->gamma);
        if (!(r->ridge > 0.0)) throw InputError("ridge penalty must be positive");
    }
}

Vector adaptive_weights(const Vector& beta_pilot, double gamma, double floor)
{
    if (!(gamma > 0.0)) throw InputError("gamma must be positive");
    if (!(floor > 0.0)) throw InputError("weight floor must be positive");
    Vector w(beta_pilot.size());
    for (Index j = 0; j < w.size(); ++j) {
        w(j) = std::pow(std::max(std::abs(beta_pilot(j)), floor), -gamma);
    }
    return w;
}

Vector ols_estimate(const StandardizedDataset& ds)
{
    if (ds.n() <= ds.n_vars()) {
        throw InputError("least squares pilot needs n > P (n=" + std::to_string(ds.n()) +
                         ", P=" + std::to_string(ds.n_vars()) + ")");
    }
    return ds.X().colPivHouseholderQr().solve(ds.y());
}

Vector ridge_estimate(const StandardizedDataset& ds, double ridge)
{
    if (!(ridge > 0.0)) throw InputError("ridge penalty must be positive");
    Matrix gram = ds.X().transpose() * ds.X();
    gram.diagonal().array() += ridge;
    return gram.llt().solve(ds.X().transpose() * ds.y());
}

Vector make_weights(const WeightRecipe& recipe, const StandardizedDataset& ds, double floor)
{
    if (std::holds_alternative<UnitWeights>(recipe)) return Vector::Ones(ds.n_vars());
    if (auto* o = std::get_if<OlsPowerWeights>(&recipe)) {
        return adaptive_weights(ols_estimate(ds), o->gamma, floor);
    }
    const auto& r = std::get<RidgePowerWeights>(recipe);
    return adaptive_weights(ridge_estimate(ds, r.ridge), r.gamma, floor);
}

} // namespace hlasso
