#pragma once

#include "aijam/types.hpp"

#include <complex>
#include <optional>
#include <span>
#include <vector>

namespace aijam {

using Symbol = std::complex<double>;

struct GdbnMatrices {
    Mat4 A;
    Mat4 B;
    Mat4 H;
    Mat4 Sigma_w;
    Mat4 Sigma_v;

    // position += derivative, derivative persists; B = H = I
    static GdbnMatrices constant_velocity(double process_var, double noise_var);

    void validate() const;
    Mat4 H_inverse() const;
};

Symbol qpsk_symbol(Rng& rng);
std::vector<Symbol> qpsk_stream(std::size_t n_symbols, Rng& rng);

// Derivatives are zero at t = 0.
GeneralizedState to_generalized(std::span<const Symbol> symbols, std::size_t t);
GeneralizedState to_generalized(Symbol current, Symbol previous);

// Per-component noise variance of a unit-energy complex symbol at the given SNR.
double noise_variance_for_snr(double snr_db);

// Received jammer symbols are scaled by sqrt(JSR) and rotated by a fixed
// carrier phase offset relative to the C2 link.
struct JammerLink {
    double amplitude = 1.0;
    double phase_rad = 0.0;

    static JammerLink from_jsr(double jsr_db, double phase_rad);
    Symbol apply(Symbol s) const { return s * std::polar(amplitude, phase_rad); }
};

// Noise is drawn even when `with_noise` is false so replays stay aligned.
GeneralizedState observe(const GeneralizedState& x_uav,
                         const std::optional<GeneralizedState>& x_jam,
                         const GdbnMatrices& m, Rng& rng, bool with_noise = true);

}  // namespace aijam
