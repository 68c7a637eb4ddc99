#pragma once

// Single-copy channels as unnormalized Choi matrices Γ on in ⊗ out, composite
// index a * d_out + b. Tr_out Γ = 1_in for every valid channel.

#include <Eigen/Dense>

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace permsym {

using cplx = std::complex<double>;

/// Output of a flagged channel: ⊕_i C^{block_dims[i]}, flag i taken with probs[i].
struct FlagStructure {
    std::vector<int> block_dims;
    std::vector<double> probs;
};

struct ChoiMatrix {
    int d_in = 0;
    int d_out = 0;
    Eigen::MatrixXcd gamma;
    std::optional<FlagStructure> flags;
};

ChoiMatrix identity_channel(int d);
/// Amplitude damping with decay probability γ from |1⟩ to |0⟩.
ChoiMatrix adc(double gamma);
/// ρ ↦ (1−p)ρ + p·Tr[ρ]·1/2.
ChoiMatrix depolarizing(double p);
/// ρ ↦ Tr[ρ]·1/d_out.
ChoiMatrix replacement(int d_in, int d_out);
/// Block-diagonal Choi with blocks p_i Γ^{N_i}; all inputs share d_in.
ChoiMatrix flagged(const std::vector<ChoiMatrix>& channels, const std::vector<double>& probs);
/// Choi of N1 ⊗ N2 on (in1 in2) ⊗ (out1 out2).
ChoiMatrix tensor_product(const ChoiMatrix& a, const ChoiMatrix& b);

/// Entrywise max of Tr_out Γ − 1 and the negative part of the spectrum.
struct ChoiResidual {
    double trace = 0.0;
    double min_eigenvalue = 0.0;
};
ChoiResidual choi_residual(const ChoiMatrix& c);
/// Throws ArgumentError unless the residuals are within `tol`.
void validate_channel(const ChoiMatrix& c, double tol = 1e-10);

/// ⟨Φ^d|Φ^N|Φ^d⟩ = (1/d²) Σ_{i,j} Γ_{(i,i),(j,j)}; requires d_in = d_out.
double entanglement_fidelity(const ChoiMatrix& c);

/// Closed-form baselines.
double adc_uncoded(double gamma);
double depolarizing_uncoded(double p);
/// Four-qubit amplitude-damping code.
double leung4(double gamma);
/// Five-qubit code on the depolarizing channel.
double fivequbit(double p);
enum class ReferenceKind { Leung4, FiveQubit };
double reference_curve(ReferenceKind kind, double param);

/// JSON channel spec: {"d_in","d_out","entries":[{"row","col","re","im"}],
/// "normalization":"gamma"|"phi", "flags":[{"prob","entries"}]}. Errors name
/// the first offending location.
ChoiMatrix channel_from_json(const nlohmann::json& j);
nlohmann::json channel_to_json(const ChoiMatrix& c);

}  // namespace permsym
