#pragma once

// Oracle and property suites shared by `permsym validate` and the acceptance
// binary. Each check runs to completion and reports the worst deviation seen.

#include <string>
#include <vector>

namespace permsym::checks {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

/// Orbit operations on [2,2]^{⊗n} against dense matrices, n ≤ max_n.
CheckResult dense_equivalence(int max_n);
/// Orbit counts 136/816/3876 and flagged 36/120/330.
CheckResult dimension_anchors();
/// Method 1 ≡ Method 2 for every SSYT pair, d=2 up to n2, d=3 up to n3.
CheckResult method_agreement(int n2, int n3);
/// ψ̃ multiplicativity, unit, trace, HS and PSD preservation (d=2, n ≤ max_n).
CheckResult star_isomorphism(int max_n);
/// Σ m_λ² and Σ m_λ f_λ for d ∈ {2,3}, n ≤ max_n.
CheckResult schur_weyl_dimensions(int max_n);
/// Recorded fidelities never decrease by more than 1e−9 over `runs` random seesaw runs.
CheckResult monotonicity(int runs, int max_n);
/// Identity, replacement, uncoded ADC and the F_E/F_D dimension ratio.
CheckResult fidelity_anchors();
/// F_D(N₁⊗N₂) = F_D(N₁)F_D(N₂) on random qubit pairs, relative error < 1e−4.
CheckResult multiplicativity(int pairs);
/// F_D of a flagged channel equals Σ p_i F_D(N^i) within 1e−6.
CheckResult flagged_additivity(int trials);
/// ADC(γ) seesaw for n = 1..max_n: best over n must beat n = 1 within the time limit.
CheckResult scale_demo(double gamma, int max_n, int seeds, double limit_seconds);

}  // namespace permsym::checks
