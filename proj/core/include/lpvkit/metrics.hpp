#pragma once

#include "lpvkit/words.hpp"

namespace lpv {

/// Per-channel fit quality in percent; clamped to [0, 100].
struct FitReport {
    Vector bfr;
    Vector vaf;

    double mean_bfr() const { return bfr.mean(); }
    double mean_vaf() const { return vaf.mean(); }
};

/// Best Fit Rate per channel:
///   max{ 1 - sqrt( sum (y - yhat)^2 / sum (y - ymean)^2 ), 0 } * 100
/// ymean is the sample mean over the validation set. Constant y raises
/// ValidationError (degenerate denominator).
Vector bfr(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat);

/// Variance Accounted For per channel:
///   max{ 1 - var(y - yhat) / var(y), 0 } * 100
/// using the population variance convention (divide by N).
Vector vaf(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat);

FitReport fit_report(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& y_hat);

/// SNR = 10 log10( sum (y - e)^2 / sum e^2 ). Zero noise returns +infinity;
/// a signal-free path (y = e) returns -infinity.
double snr_db(const Eigen::Ref<const Matrix>& y, const Eigen::Ref<const Matrix>& e);

}  // namespace lpv
