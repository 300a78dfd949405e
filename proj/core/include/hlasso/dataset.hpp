#pragma once

#include <span>

#include <hlasso/types.hpp>

namespace hlasso {

enum class ResponseMode { gaussian, binary };

/// Coefficients and intercept on the caller's original data scale.
struct OriginalScaleCoefficients
{
    Vector beta;
    double intercept = 0.0;
};

/**
 * Centered, unit-L2-norm design plus the affine map back to the raw scale.
 *
 * Gaussian mode also centers y. Binary mode leaves y as 0/1; its intercept is
 * estimated by the logistic solver. Immutable once built.
 */
class StandardizedDataset
{
public:
    /// Throws InputError for n < 2, mismatched sizes, NaN/Inf, non-0/1
    /// responses in binary mode, and constant ("degenerate") columns.
    static StandardizedDataset standardize(const Matrix& X_raw, const Vector& y_raw,
                                           ResponseMode mode = ResponseMode::gaussian);

    const Matrix& X() const noexcept { return X_; }
    const Vector& y() const noexcept { return y_; }
    const Vector& column_means() const noexcept { return means_; }
    const Vector& column_norms() const noexcept { return norms_; }
    double y_mean() const noexcept { return y_mean_; }
    Index n() const noexcept { return X_.rows(); }
    Index n_vars() const noexcept { return X_.cols(); }
    ResponseMode mode() const noexcept { return mode_; }

    /// Applies the stored column transform to new raw rows.
    Matrix transform(const Matrix& X_raw) const;

    /// Column subset, keeping the transform of the retained columns.
    StandardizedDataset select_columns(std::span<const Index> keep) const;

private:
    StandardizedDataset() = default;

    Matrix X_;
    Vector y_;
    Vector means_;
    Vector norms_;
    double y_mean_ = 0.0;
    ResponseMode mode_ = ResponseMode::gaussian;
};

/// beta_orig_j = beta_j / norm_j; intercept = offset - sum_j beta_orig_j * mean_j,
/// where offset is y_mean (Gaussian) or the fitted standardized-scale intercept
/// (binary).
OriginalScaleCoefficients destandardize(const Vector& beta_std, double intercept_std,
                                        const StandardizedDataset& ds);

} // namespace hlasso
