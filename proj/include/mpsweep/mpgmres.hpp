#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mpsweep/dense.hpp"
#include "mpsweep/linear_operator.hpp"
#include "mpsweep/types.hpp"

namespace mpsweep {

enum class Variant { Standard, Selective, Complete };

struct SolverConfig {
  double tol = 1e-6;
  std::size_t max_it = 200;
  Variant variant = Variant::Selective;
  /// Drop a new basis column when orthogonalisation shrinks it below this
  /// fraction of its original norm.
  double deflation_tol = 1e-10;
  /// Complete variant only: maximum total number of basis columns.
  std::size_t complete_cap = 512;
  /// Preconditioner applications and matvecs within an iteration run on up to
  /// this many threads.
  unsigned threads = 1;
  /// Second Gram-Schmidt pass against earlier blocks (changes the counters).
  bool reorthogonalize = false;
  /// Record x_k after every iteration.
  bool keep_iterates = false;
  /// Return V, Z and H in the result.
  bool keep_basis = false;
};

struct SolveStats {
  std::size_t iterations = 0;
  /// Projected ||b - A x_k|| / ||b|| per iteration.
  std::vector<double> residual_history;
  std::size_t matvecs = 0;
  std::size_t prec_applies = 0;
  std::size_t inner_products = 0;
  std::vector<std::size_t> inner_products_per_iteration;
  /// Column count of each V block, starting with the single column of V_1.
  std::vector<std::size_t> block_columns;
  double setup_seconds = 0.0;
  double solve_seconds = 0.0;
  /// ||b - A x|| / ||b|| recomputed from the returned x.
  double final_rel_residual = 0.0;
  bool converged = false;
  /// Every new direction of some block was deflated.
  bool exhausted = false;
  /// The true residual exceeds 10x the tolerance although the projected one converged.
  bool residual_warning = false;
};

/// Orthonormal basis V (grouped in blocks), stored directions Z and the
/// block Hessenberg H with A Z = V H.
struct KrylovBasis {
  std::vector<ComplexVector> v;
  std::vector<ComplexVector> z;
  DenseMatrix h;
  std::vector<std::size_t> block_columns;
};

struct SolveResult {
  ComplexVector x;
  SolveStats stats;
  std::vector<ComplexVector> iterates;
  std::optional<KrylovBasis> basis;
};

/// The newest basis block V_k; origin[c] is the preconditioner whose
/// direction produced column c (kNoOrigin for v_1).
struct KrylovBlock {
  static constexpr std::size_t kNoOrigin = std::numeric_limits<std::size_t>::max();
  std::vector<ComplexVector> columns;
  std::vector<std::size_t> origin;
};

/// Complete variant would outgrow `complete_cap`.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Source vector for each of the t preconditioners at iteration k (1-based).
///
/// k = 1: every preconditioner gets v_1. Afterwards with t = 1 the newest
/// column; t = 2 the cross rule (M_1 gets the column produced by M_2 and vice
/// versa, or the survivor when one was deflated); t >= 3 the sum of all
/// columns of V_k.
std::vector<ComplexVector> select_directions(Variant variant, std::size_t t, const KrylovBlock& vk,
                                             std::size_t k);

struct ExpandedSource {
  std::size_t preconditioner;
  const ComplexVector* source;
};

/// Complete variant: every preconditioner applied to every column of V_k,
/// grouped by column. Throws CapacityError when the basis would exceed `cap`.
std::vector<ExpandedSource> complete_expand(std::size_t t, const KrylovBlock& vk,
                                            std::size_t total_columns, std::size_t cap);

/// Right-preconditioned (multipreconditioned) GMRES from x_0 = 0.
///
/// Each outer iteration applies the preconditioners to the selected sources,
/// multiplies by A, orthogonalises the block against all earlier columns by
/// modified Gram-Schmidt, then within itself by Gram-Schmidt QR, and solves
/// the projected least-squares problem from scratch.
SolveResult mpgmres(const LinearOperator& a, std::span<const LinearOperator* const> preconditioners,
                    std::span<const Complex> b, const SolverConfig& cfg);

/// Textbook count of inner products at iteration k with t preconditioners
/// and no deflation: (k - 1/2) t^2 + 3t/2.
std::size_t expected_inner_products(std::size_t k, std::size_t t);

}  // namespace mpsweep
