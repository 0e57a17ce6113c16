#include "epicure/statistics.hpp"

#include <cmath>

namespace epicure {

double Summary::standard_error() const {
    return count == 0 ? 0.0 : std::sqrt(variance / static_cast<double>(count));
}

Summary summarize(std::span<const double> values, std::size_t censored) {
    Summary s;
    s.count = values.size();
    s.censored = censored;
    if (values.empty()) return s;

    double sum = 0.0;
    for (double x : values) sum += x;
    s.mean = sum / static_cast<double>(s.count);
    if (s.count > 1) {
        double ss = 0.0;
        for (double x : values) ss += (x - s.mean) * (x - s.mean);
        s.variance = ss / static_cast<double>(s.count - 1);
    }
    s.half_width = kZ99 * s.standard_error();
    return s;
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

const char* to_string(BoundDirection d) { return d == BoundDirection::Upper ? "upper" : "lower"; }

Verdict decide(BoundDirection direction, double bound, const Summary& s) {
    if (direction == BoundDirection::Upper) return s.mean - s.half_width <= bound ? Verdict::Pass : Verdict::Fail;
    return s.mean + s.half_width >= bound ? Verdict::Pass : Verdict::Fail;
}

}  // namespace epicure
