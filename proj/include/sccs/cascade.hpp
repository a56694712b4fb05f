#pragma once

#include <optional>
#include <unordered_map>

#include "sccs/codebook.hpp"
#include "sccs/coupling.hpp"

namespace sccs {

/// A 3-node system ready to run: target, coupling (whose chains make the
/// channel decouple as Q_{X|UV} Q_{Y|UV} Q_{Z|V}), codebook and block length.
class CascadeSystem {
 public:
  CascadeSystem(AuxiliaryCoupling coupling, SuperpositionCodebook codebook,
                double chain_tol = 1e-6);

  const AuxiliaryCoupling& coupling() const noexcept { return coupling_; }
  const SuperpositionCodebook& codebook() const noexcept { return codebook_; }
  const JointDistribution& target() const noexcept { return coupling_.target(); }
  unsigned n() const noexcept { return codebook_.n; }

  std::size_t x_card() const noexcept { return cx_; }
  std::size_t y_card() const noexcept { return cy_; }
  std::size_t z_card() const noexcept { return cz_; }

  double qx_uv(std::size_t u, std::size_t v, std::size_t x) const {
    return qx_.row(u * codebook_.v_card + v)[x];
  }
  double qy_uv(std::size_t u, std::size_t v, std::size_t y) const {
    return qy_.row(u * codebook_.v_card + v)[y];
  }
  double qz_v(std::size_t v, std::size_t z) const { return qz_.row(v)[z]; }
  const std::vector<double>& qx_letter() const noexcept { return qx_letter_; }

 private:
  AuxiliaryCoupling coupling_;
  SuperpositionCodebook codebook_;
  Channel qx_, qy_, qz_;
  std::vector<double> qx_letter_;
  std::size_t cx_, cy_, cz_;
};

/// Posterior over the message pair given the source block and the common
/// randomness index; entry (m_a, m_b) lives at m_a * nb + m_b.
FiniteDistribution likelihood_encoder_posterior(std::span<const std::uint32_t> x_block,
                                                std::size_t k,
                                                const CascadeSystem& sys);

/// Exact induced law of the operational scheme over blocks and messages,
/// stored sparsely with the common-randomness view retained.
class InducedDistribution {
 public:
  unsigned n = 0;
  std::uint64_t cxn = 1, cyn = 1, czn = 1;
  std::size_t na = 1, nb = 1, nk = 1;

  std::uint64_t pack(std::uint64_t xb, std::uint64_t yb, std::uint64_t zb,
                     std::size_t ma, std::size_t mb, std::size_t k) const {
    return ((((xb * cyn + yb) * czn + zb) * na + ma) * nb + mb) * nk + k;
  }

  const std::unordered_map<std::uint64_t, double>& mass_with_k() const {
    return mass_;
  }
  /// Marginalized over K, keyed by pack(..., k = 0) with nk treated as 1.
  std::unordered_map<std::uint64_t, double> mass_marginal() const;

  double total() const;
  std::vector<double> x_marginal() const;  // over xb
  JointDistribution to_joint(bool include_k) const;

  std::unordered_map<std::uint64_t, double> mass_;
};

InducedDistribution induced_distribution_exact(const CascadeSystem& sys,
                                               std::uint64_t size_guard = kDefaultSizeGuard);

/// TV between the induced (X^n,Y^n,Z^n,M1,M2) law and P_{M1 M2} x prod Q_XYZ.
double secrecy_tv(const InducedDistribution& induced, const JointDistribution& target);

struct CascadeSample {
  std::vector<std::uint32_t> xb, yb, zb;
  std::size_t ma = 0, mb = 0, k = 0;
};

std::vector<CascadeSample> sample_operational(const CascadeSystem& sys,
                                              std::size_t count, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Arbitrary-length cascades

class GeneralCascadeSystem {
 public:
  GeneralCascadeSystem(JointDistribution coupling_joint, unsigned m,
                       LayeredCodebook codebook, double chain_tol = 1e-6);

  const JointDistribution& coupling() const noexcept { return coupling_; }
  const JointDistribution& target() const noexcept { return target_; }
  const LayeredCodebook& codebook() const noexcept { return codebook_; }
  unsigned m() const noexcept { return m_; }
  unsigned n() const noexcept { return codebook_.n; }

  const Channel& x_channel() const noexcept { return qx_; }
  const Channel& y_channel(std::size_t i) const { return qy_.at(i); }  // Y_{i+1}
  std::size_t x_card() const noexcept { return cx_; }
  std::size_t y_card(std::size_t i) const { return cy_.at(i); }
  const std::vector<double>& qx_letter() const noexcept { return qx_letter_; }

 private:
  JointDistribution coupling_;
  JointDistribution target_;
  LayeredCodebook codebook_;
  unsigned m_;
  Channel qx_;               // X given (U_{m-1}, ..., U_1), base first
  std::vector<Channel> qy_;  // Y_{i+1} given (U_{m-1}, ..., U_{i+1})
  std::size_t cx_;
  std::vector<std::size_t> cy_;
  std::vector<double> qx_letter_;
};

/// Exact induced law over (x^n, y_1^n..y_{m-1}^n, m'_1..m'_{m-1}), K retained.
class GeneralInduced {
 public:
  unsigned n = 0, m = 0;
  std::uint64_t cxn = 1;
  std::vector<std::uint64_t> cyn;      // per output block
  std::vector<std::size_t> counts;     // per-layer message counts, top first
  std::size_t nk = 1;

  std::uint64_t pack(std::uint64_t xb, std::span<const std::uint64_t> ybs,
                     std::span<const std::size_t> msgs_top_first,
                     std::size_t k) const;

  double total() const;
  std::vector<double> x_marginal() const;

  std::unordered_map<std::uint64_t, double> mass_;
};

GeneralInduced general_cascade_exact(const GeneralCascadeSystem& sys,
                                     std::uint64_t size_guard = kDefaultSizeGuard);

double general_secrecy_tv(const GeneralInduced& induced,
                          const JointDistribution& target);

}  // namespace sccs
