#include "lpvkit/series.hpp"

namespace lpv {

void MatrixSeries::set(const ScheduleWord& w, Matrix value) {
    if (value.rows() != rows_ || value.cols() != cols_)
        throw ShapeError("series entry for \"" + w.str() + "\" has shape " +
                         std::to_string(value.rows()) + "x" + std::to_string(value.cols()) +
                         ", expected " + std::to_string(rows_) + "x" + std::to_string(cols_));
    entries_[w] = std::move(value);
}

const Matrix& MatrixSeries::at(const ScheduleWord& w) const {
    auto it = entries_.find(w);
    if (it == entries_.end()) throw MissingWordError(w.str());
    return it->second;
}

SecondMomentSet::SecondMomentSet(std::vector<Matrix> moments) : moments_(std::move(moments)) {
    if (moments_.empty()) throw ValidationError("second moment set is empty");
    for (const auto& t : moments_) {
        if (t.rows() != t.cols()) throw ShapeError("second moments must be square");
        if ((t - t.transpose()).cwiseAbs().maxCoeff() > 1e-10)
            throw ValidationError("second moment not symmetric within 1e-10");
    }
}

const Matrix& SecondMomentSet::of(int letter) const {
    if (letter < 1 || letter > alphabet_size())
        throw RangeError("letter " + std::to_string(letter) + " outside alphabet");
    return moments_[static_cast<std::size_t>(letter - 1)];
}

}  // namespace lpv
