#include "lpvkit/words.hpp"

#include <algorithm>
#include <cmath>

namespace lpv {

ScheduleWord::ScheduleWord(std::vector<int> letters) : letters_(std::move(letters)) {
    for (int s : letters_) {
        if (s < 1) throw RangeError("word letter " + std::to_string(s) + " is not >= 1");
    }
}

ScheduleWord ScheduleWord::parse(const std::string& text) {
    if (text == "e" || text.empty()) return {};
    std::vector<int> letters;
    letters.reserve(text.size());
    for (char c : text) {
        if (c < '1' || c > '9') throw ParseError("invalid word text \"" + text + "\"");
        letters.push_back(c - '0');
    }
    return ScheduleWord(std::move(letters));
}

std::string ScheduleWord::str() const {
    if (letters_.empty()) return "e";
    std::string out;
    out.reserve(letters_.size());
    for (int s : letters_) {
        if (s > 9) throw RangeError("letters above 9 have no digit form");
        out.push_back(static_cast<char>('0' + s));
    }
    return out;
}

ScheduleWord ScheduleWord::concat(const ScheduleWord& other) const {
    std::vector<int> letters = letters_;
    letters.insert(letters.end(), other.letters_.begin(), other.letters_.end());
    return ScheduleWord(std::move(letters));
}

ScheduleWord ScheduleWord::prefixed(int letter) const {
    std::vector<int> letters;
    letters.reserve(letters_.size() + 1);
    letters.push_back(letter);
    letters.insert(letters.end(), letters_.begin(), letters_.end());
    return ScheduleWord(std::move(letters));
}

ScheduleWord ScheduleWord::suffixed(int letter) const {
    std::vector<int> letters = letters_;
    letters.push_back(letter);
    return ScheduleWord(std::move(letters));
}

ScheduleWord ScheduleWord::tail(std::size_t i) const {
    return ScheduleWord(std::vector<int>(letters_.begin() + static_cast<std::ptrdiff_t>(i),
                                         letters_.end()));
}

std::strong_ordering ScheduleWord::operator<=>(const ScheduleWord& other) const {
    if (auto c = letters_.size() <=> other.letters_.size(); c != 0) return c;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
        if (auto c = letters_[i] <=> other.letters_[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
}

ScheduleWeights::ScheduleWeights(Vector p) : p_(std::move(p)) {
    if (p_.size() < 1) throw ValidationError("weights need at least one channel");
    if (p_(0) != 1.0) throw ValidationError("p_1 must be exactly 1");
    for (Index i = 0; i < p_.size(); ++i) {
        if (!(p_(i) > 0.0)) throw ValidationError("weights must be strictly positive");
    }
}

double ScheduleWeights::of(int letter) const {
    if (letter < 1 || letter > alphabet_size())
        throw RangeError("letter " + std::to_string(letter) + " outside alphabet");
    return p_(letter - 1);
}

double ScheduleWeights::of_word(const ScheduleWord& w) const {
    double out = 1.0;
    for (int s : w) out *= of(s);
    return out;
}

std::vector<ScheduleWord> enumerate_words(int n_mu, int max_len) {
    if (n_mu < 1) throw RangeError("alphabet size must be >= 1");
    if (max_len < 0) throw RangeError("max_len must be >= 0");
    std::vector<ScheduleWord> out;
    out.emplace_back();
    std::vector<ScheduleWord> level{ScheduleWord{}};
    for (int len = 1; len <= max_len; ++len) {
        std::vector<ScheduleWord> next;
        next.reserve(level.size() * static_cast<std::size_t>(n_mu));
        for (const auto& w : level) {
            for (int s = 1; s <= n_mu; ++s) next.push_back(w.suffixed(s));
        }
        out.insert(out.end(), next.begin(), next.end());
        level = std::move(next);
    }
    return out;
}

double mu_product(const ScheduleWord& w, const Eigen::Ref<const Matrix>& mu, Index t) {
    if (w.empty()) return 1.0;
    const Index k = static_cast<Index>(w.size());
    if (t - k + 1 < 0 || t >= mu.rows())
        throw RangeError("mu_product window [" + std::to_string(t - k + 1) + ", " +
                         std::to_string(t) + "] outside the sample path");
    double out = 1.0;
    for (Index j = 0; j < k; ++j) {
        const int s = w.at(static_cast<std::size_t>(j));
        if (s > mu.cols()) throw RangeError("letter exceeds scheduling dimension");
        out *= mu(t - k + 1 + j, s - 1);
    }
    return out;
}

Matrix word_matrix_product(const ScheduleWord& w, std::span<const Matrix> family) {
    if (family.empty()) throw ShapeError("empty matrix family");
    const Index n = family[0].rows();
    for (const auto& m : family) {
        if (m.rows() != n || m.cols() != n)
            throw ShapeError("matrix family must be square with equal dimensions");
    }
    Matrix out = Matrix::Identity(n, n);
    for (int s : w) {
        if (s > static_cast<int>(family.size()))
            throw RangeError("letter " + std::to_string(s) + " exceeds family size");
        out = family[static_cast<std::size_t>(s - 1)] * out;
    }
    return out;
}

}  // namespace lpv
