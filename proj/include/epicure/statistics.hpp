#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>

namespace epicure {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Sample statistics with a 99% normal-approximation half-width,
/// z * sqrt(variance / count). Variance uses the n - 1 denominator and is
/// 0 for fewer than two samples.
struct Summary {
    double mean = 0.0;
    double variance = 0.0;
    std::size_t count = 0;
    double half_width = 0.0;
    std::size_t censored = 0;

    double standard_error() const;
};

/// Values are accumulated in the order given, so a summary recomputed from
/// the same sequence is bit-identical.
Summary summarize(std::span<const double> values, std::size_t censored = 0);

enum class BoundDirection { Upper, Lower };
enum class Verdict { Pass, Fail, Inconclusive };

const char* to_string(Verdict v);
const char* to_string(BoundDirection d);

struct BoundReport {
    std::string name;
    BoundDirection direction = BoundDirection::Upper;
    double bound = 0.0;
    std::map<std::string, double> inputs;
    Summary empirical;
    Verdict verdict = Verdict::Inconclusive;
    std::string note;
};

/// Upper bound: pass iff mean - half_width <= bound. Lower bound: pass iff
/// mean + half_width >= bound.
Verdict decide(BoundDirection direction, double bound, const Summary& s);

}  // namespace epicure
