#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sccs/coupling.hpp"
#include "sccs/distribution.hpp"

namespace sccs {

// Stream-id tags for the counter-based generator; fixed so codebooks are
// reproducible bit-exactly across runs and implementations of the samplers.
inline constexpr std::uint64_t kStreamCodebook = 1;
inline constexpr std::uint64_t kStreamSoftcoverWord = 2;
inline constexpr std::uint64_t kStreamSoftcoverBaseWord = 3;
inline constexpr std::uint64_t kStreamRelay = 4;
inline constexpr std::uint64_t kStreamSample = 5;

struct CodebookRates {
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
};

/// ceil(2^(n*rate)) with a snap to the nearest integer at 1e-9 relative slop,
/// so rates that are exact logs of integers produce exact index counts.
std::uint64_t rate_index_count(double rate_bits, unsigned n);

/// Two-layer random codebook: base words v^n(m_b, k) drawn iid from Q_V,
/// per-parent words u^n(m_a, m_b, k) drawn through Q_{U|V}.
class SuperpositionCodebook {
 public:
  unsigned n = 0;
  CodebookRates rates;
  std::uint64_t seed = 0;
  std::size_t nk = 1, na = 1, nb = 1;
  std::size_t u_card = 1, v_card = 1;

  std::span<const std::uint32_t> v_word(std::size_t mb, std::size_t k) const {
    const std::size_t off = (mb * nk + k) * n;
    return {v_words.data() + off, n};
  }
  std::span<const std::uint32_t> u_word(std::size_t ma, std::size_t mb,
                                        std::size_t k) const {
    const std::size_t off = (((ma * nb) + mb) * nk + k) * n;
    return {u_words.data() + off, n};
  }

  std::vector<std::uint32_t> v_words;  // [(mb*nk + k)*n + t]
  std::vector<std::uint32_t> u_words;  // [((ma*nb + mb)*nk + k)*n + t]
};

SuperpositionCodebook sample_codebook(const AuxiliaryCoupling& coupling, unsigned n,
                                      CodebookRates rates, std::uint64_t seed,
                                      std::uint64_t index_guard = kDefaultSizeGuard);

/// Recursive (m-1)-layer codebook for the m-node cascade. Layer 0 is the base
/// (the last auxiliary); layer l draws conditioned on all lower layers.
class LayeredCodebook {
 public:
  unsigned n = 0;
  std::uint64_t seed = 0;
  std::size_t nk = 1;
  std::vector<std::size_t> counts;  // per-layer message counts, base first
  std::vector<std::size_t> cards;   // symbol alphabets, base first

  std::size_t layers() const noexcept { return counts.size(); }

  /// Word of layer `l` for message tuple (msgs[0] = base message, ...,
  /// msgs[l] = this layer's message) and common randomness k.
  std::span<const std::uint32_t> word(std::size_t l,
                                      std::span<const std::size_t> msgs,
                                      std::size_t k) const;

  std::vector<std::vector<std::uint32_t>> words;  // per layer, flat
};

/// Sample the layered codebook for a coupling over (X, Y1..Y_{m-1},
/// U1..U_{m-1}). comm_rates = (R_1, ..., R_{m-1}), nonincreasing.
LayeredCodebook sample_layered_codebook(const JointDistribution& coupling_joint,
                                        unsigned m, unsigned n, double r0,
                                        std::span<const double> comm_rates,
                                        std::uint64_t seed,
                                        std::uint64_t index_guard = kDefaultSizeGuard);

}  // namespace sccs
