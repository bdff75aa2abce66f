#pragma once

#include <span>
#include <string>
#include <vector>

namespace dnsqd {

struct MannWhitneyResult {
    // min(U_a, U_b), ties counting one half.
    double u = 0.;
    // Two-sided.
    double p_value = 1.;
    bool exact = false;
};

/// Largest per-sample size for which the null distribution is enumerated exactly.
inline constexpr std::size_t kExactMannWhitneyLimit = 8;

enum class MannWhitneyMethod { automatic, exact, normal };

/// Two-sided Mann-Whitney U test. Exact (permutation distribution of the observed
/// midranks) when both samples have at most 8 values, otherwise a normal
/// approximation with tie and continuity corrections. `method` forces either one.
MannWhitneyResult mann_whitney_u(std::span<const double> a, std::span<const double> b, MannWhitneyMethod method = MannWhitneyMethod::automatic);

/// Holm's step-down procedure. Flags are returned in input order; a p-value equal to
/// its threshold is rejected.
std::vector<bool> holm_bonferroni(std::span<const double> p_values, double alpha);

struct ComparisonResult {
    std::string label;
    double u = 0.;
    double p_value = 1.;
    bool reject = false;
    double alpha = 0.05;
};

/// All pairwise Mann-Whitney tests between groups, Holm-corrected as one family.
std::vector<ComparisonResult> compare_groups(const std::vector<std::string>& labels, const std::vector<std::vector<double>>& samples, double alpha);

} // namespace dnsqd
