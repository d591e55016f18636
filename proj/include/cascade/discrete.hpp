// Molecular sums over point clouds: form factor, integrated Green's function,
// the double-sum k-space Green's function, the two-molecule tensor and the
// three-body cascading factor.
#ifndef CASCADE_DISCRETE_HPP
#define CASCADE_DISCRETE_HPP

#include "cascade/beams.hpp"
#include "cascade/geometry.hpp"
#include "cascade/kernels.hpp"

#include <string>
#include <vector>

namespace cascade {

enum class KernelKind { Scalar, Vector };

inline const char* to_string(KernelKind k) noexcept { return k == KernelKind::Scalar ? "Scalar" : "Vector"; }

/// Summation controls shared by all molecular sums.
struct SumOptions {
  bool reproducible = false;  // sequential compensated sum in index order
  int threads = 1;            // partitions for the tree reduction
  bool exclude_self = true;   // drop a cloud point coinciding with r_a
};

struct IntegratedGreen {
  Tensor3 tensor = Tensor3::Zero();  // scalar mode stores value * identity
  Complex scalar{0.0, 0.0};          // scalar mode only
  Vector3 r_a = Vector3::Zero();
  KernelKind kind = KernelKind::Scalar;
  Normalization normalization = Normalization::Bare;
  std::size_t n_b = 0;
};

/// sum_a e^{i k . r_a}.
Complex form_factor(const MoleculeCloud& cloud, const Vector3& k, const SumOptions& opts = {});

/// I(r_a) = sum_b e^{i k_b . (r_b - r_a)} G(r_a, r_b, omega_b) over the whole cloud.
IntegratedGreen integrated_green_discrete(const MoleculeCloud& cloud, const Vector3& r_a, const BeamSet& beams,
                                          KernelKind kind, const KernelConfig& cfg = {},
                                          const SumOptions& opts = {});

/// I at every molecule of the cloud, excluding b == a by index.
std::vector<IntegratedGreen> integrated_green_at_molecules(const MoleculeCloud& cloud, const BeamSet& beams,
                                                           KernelKind kind, const KernelConfig& cfg = {},
                                                           const SumOptions& opts = {});

/// sum_{a != b} e^{-i (k . r_a + k' . r_b)} G(r_a, r_b, omega).
Tensor3 kspace_green_discrete(const MoleculeCloud& cloud, const Vector3& k, const Vector3& k_prime, double omega,
                              KernelKind kind, const KernelConfig& cfg = {}, const SumOptions& opts = {});

/// Diagonal tensor for two molecules separated along z, including the phase
/// e^{i ((omega_b/c) r - k_b . r z)}.
Tensor3 two_molecule_green(double separation, const Vector3& k_b, double omega_b, const KernelConfig& cfg = {});

/// Full three-body tensor T(3 nu + nu', 3 mu + mu') =
/// sum_a e^{i (k_a + k_b + k_c - k_s) . r_a} I_b^{nu nu'}(r_a) I_c^{mu mu'}(r_a).
/// k_a, k_s, k_b and omega_b come from beams_b; k_c and omega_c are beams_c.k_b and beams_c.omega_b.
Eigen::Matrix<Complex, 9, 9> three_body_factor(const MoleculeCloud& cloud, const BeamSet& beams_b,
                                               const BeamSet& beams_c, KernelKind kind,
                                               const KernelConfig& cfg = {}, const SumOptions& opts = {});

/// Same sum contracted on the fly: sum_a phase_a (A : I_b)(B : I_c).
Complex three_body_contracted(const MoleculeCloud& cloud, const BeamSet& beams_b, const BeamSet& beams_c,
                              const Tensor3& A, const Tensor3& B, KernelKind kind, const KernelConfig& cfg = {},
                              const SumOptions& opts = {});

/// JSON record {operation, inputs_digest, tensor, meta} as text.
std::string to_json(const IntegratedGreen& ig, const std::string& inputs_digest);

}  // namespace cascade

#endif  // CASCADE_DISCRETE_HPP
