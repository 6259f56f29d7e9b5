#include "lpvkit/metrics.hpp"

#include <cmath>
#include <limits>

#include "lpvkit/errors.hpp"

namespace lpv {

namespace {

void check_paths(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat) {
    if (y.rows() != y_hat.rows() || y.cols() != y_hat.cols())
        throw ShapeError("paths must have identical shape");
    if (y.rows() < 2) throw RangeError("need at least two samples");
}

}  // namespace

Vector bfr(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat) {
    check_paths(y, y_hat);
    Vector out(y.cols());
    for (Index j = 0; j < y.cols(); ++j) {
        const double mean = y.col(j).mean();
        const double denom = (y.col(j).array() - mean).matrix().squaredNorm();
        if (denom <= 0.0)
            throw ValidationError("BFR undefined for a constant output channel");
        const double num = (y.col(j) - y_hat.col(j)).squaredNorm();
        out(j) = std::max(1.0 - std::sqrt(num / denom), 0.0) * 100.0;
    }
    return out;
}

Vector vaf(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat) {
    check_paths(y, y_hat);
    const auto var = [](const Vector& v) {
        const double mean = v.mean();
        return (v.array() - mean).matrix().squaredNorm() / static_cast<double>(v.size());
    };
    Vector out(y.cols());
    for (Index j = 0; j < y.cols(); ++j) {
        const double vy = var(y.col(j));
        if (vy <= 0.0) throw ValidationError("VAF undefined for a constant output channel");
        out(j) = std::max(1.0 - var(y.col(j) - y_hat.col(j)) / vy, 0.0) * 100.0;
    }
    return out;
}

FitReport fit_report(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat) {
    return {bfr(y, y_hat), vaf(y, y_hat)};
}

double snr_db(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& e) {
    if (y.rows() != e.rows() || y.cols() != e.cols())
        throw ShapeError("signal and noise paths must have identical shape");
    const double noise = e.squaredNorm();
    const double signal = (y - e).squaredNorm();
    if (noise <= 0.0) return std::numeric_limits<double>::infinity();
    if (signal <= 0.0) return -std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / noise);
}

}  // namespace lpv
