#include <hlasso/dataset.hpp>

#include <cmath>
#include <string>

#include <hlasso/errors.hpp>

namespace hlasso {

namespace {

constexpr double degenerate_norm = 1e-12;

void require_finite(const Matrix& X, const Vector& y)
{
    if (!X.allFinite()) throw InputError("design matrix contains NaN or Inf");
    if (!y.allFinite()) throw InputError("response contains NaN or Inf");
}

} // namespace

StandardizedDataset StandardizedDataset::standardize(const Matrix& X_raw, const Vector& y_raw,
                                                     ResponseMode mode)
{
    const Index n = X_raw.rows();
    if (n < 2) throw InputError("need at least two samples, got " + std::to_string(n));
    if (y_raw.size() != n) {
        throw InputError("response length " + std::to_string(y_raw.size()) + " does not match " +
                         std::to_string(n) + " design rows");
    }
    if (X_raw.cols() < 1) throw InputError("design matrix has no columns");
    require_finite(X_raw, y_raw);

    StandardizedDataset ds;
    ds.mode_ = mode;
    ds.means_ = X_raw.colwise().mean().transpose();
    ds.X_ = X_raw.rowwise() - ds.means_.transpose();
    ds.norms_ = ds.X_.colwise().norm().transpose();
    for (Index j = 0; j < ds.norms_.size(); ++j) {
        // Relative to the raw magnitude so that large constant columns are caught too.
        const double scale = std::max(1.0, X_raw.col(j).cwiseAbs().maxCoeff());
        if (!(ds.norms_(j) > degenerate_norm * scale)) {
            throw InputError("degenerate column " + std::to_string(j) + " (zero variance)");
        }
        ds.X_.col(j) /= ds.norms_(j);
    }

    ds.y_mean_ = y_raw.mean();
    if (mode == ResponseMode::gaussian) {
        ds.y_ = y_raw.array() - ds.y_mean_;
    } else {
        for (Index i = 0; i < n; ++i) {
            if (y_raw(i) != 0.0 && y_raw(i) != 1.0) {
                throw InputError("binary response must be 0/1; row " + std::to_string(i) + " has " +
                                 std::to_string(y_raw(i)));
            }
        }
        ds.y_ = y_raw;
    }
    return ds;
}

Matrix StandardizedDataset::transform(const Matrix& X_raw) const
{
    if (X_raw.cols() != n_vars()) {
        throw InputError("expected " + std::to_string(n_vars()) + " columns, got " +
                         std::to_string(X_raw.cols()));
    }
    return (X_raw.rowwise() - means_.transpose()).array().rowwise() / norms_.transpose().array();
}

StandardizedDataset StandardizedDataset::select_columns(std::span<const Index> keep) const
{
    StandardizedDataset out;
    out.mode_ = mode_;
    out.y_ = y_;
    out.y_mean_ = y_mean_;
    out.X_.resize(n(), static_cast<Index>(keep.size()));
    out.means_.resize(out.X_.cols());
    out.norms_.resize(out.X_.cols());
    for (std::size_t c = 0; c < keep.size(); ++c) {
        const Index j = keep[c];
        if (j < 0 || j >= n_vars()) throw InputError("column index " + std::to_string(j) + " out of range");
        const auto col = static_cast<Index>(c);
        out.X_.col(col) = X_.col(j);
        out.means_(col) = means_(j);
        out.norms_(col) = norms_(j);
    }
    return out;
}

OriginalScaleCoefficients destandardize(const Vector& beta_std, double intercept_std,
                                        const StandardizedDataset& ds)
{
    if (beta_std.size() != ds.n_vars()) {
        throw InputError("coefficient length " + std::to_string(beta_std.size()) + " does not match " +
                         std::to_string(ds.n_vars()) + " columns");
    }
    OriginalScaleCoefficients out;
    out.beta = beta_std.cwiseQuotient(ds.column_norms());
    const double offset = ds.mode() == ResponseMode::gaussian ? ds.y_mean() + intercept_std : intercept_std;
    out.intercept = offset - out.beta.dot(ds.column_means());
    return out;
}

} // namespace hlasso
