#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mpsweep/linear_operator.hpp"
#include "mpsweep/strip_decomposition.hpp"
#include "mpsweep/types.hpp"

namespace mpsweep {

/// LR/RL sweep X strips (left to right / right to left), BT/TB sweep Y strips.
enum class Direction { LR, RL, BT, TB };

struct SweepKind {
  Direction direction = Direction::LR;
  bool double_sweep = false;

  Axis axis() const { return direction == Direction::LR || direction == Direction::RL ? Axis::X : Axis::Y; }
  bool reversed() const { return direction == Direction::RL || direction == Direction::TB; }
  /// "LR", "LRL", "BT", "BTB", ...
  std::string name() const;
  bool operator==(const SweepKind&) const = default;
};

/// Counters filled by one application.
struct SweepTrace {
  std::size_t local_solves = 0;
};

/// Per-subdomain local solutions, indexed by subdomain (not by sweep position).
using LocalSolutions = std::vector<ComplexVector>;

/// A single or double sweep over a factored strip decomposition, applied as
/// z = M^{-1} r.
///
/// Forward pass: subdomains are solved in sweep order; each one takes its
/// upstream interface data from the previously solved neighbour and a
/// homogeneous impedance condition downstream. Backward pass (double sweep):
/// the last subdomain keeps its forward solution, every earlier one reuses
/// its forward upstream data and takes downstream data from the neighbour
/// just solved on the way back. Overlaps keep the most recent solve.
///
/// Holds no mutable state; distinct instances may run concurrently.
class SweepPreconditioner final : public LinearOperator {
 public:
  SweepPreconditioner(SweepKind kind, std::shared_ptr<const SubdomainSet> subdomains);

  const SweepKind& kind() const { return kind_; }
  const SubdomainSet& subdomains() const { return *set_; }
  std::size_t size() const override { return n_; }

  /// Subdomain indices in sweep order.
  const std::vector<std::size_t>& order() const { return order_; }

  LocalSolutions forward_sweep(std::span<const Complex> r, SweepTrace* trace = nullptr) const;
  LocalSolutions backward_sweep(std::span<const Complex> r, const LocalSolutions& forward,
                                SweepTrace* trace = nullptr) const;

  void apply(std::span<const Complex> r, std::span<Complex> z) const override;
  void apply(std::span<const Complex> r, std::span<Complex> z, SweepTrace* trace) const;
  ComplexVector apply(std::span<const Complex> r) const;

  /// Local solves per application: N for a single sweep, 2N - 1 for a double.
  std::size_t solves_per_apply() const;

 private:
  Side upstream_side() const { return kind_.reversed() ? Side::Plus : Side::Minus; }
  Side downstream_side() const { return kind_.reversed() ? Side::Minus : Side::Plus; }
  ComplexVector restrict_rhs(const SubdomainOperator& op, std::span<const Complex> r) const;
  ComplexVector trace_from(const SubdomainOperator& from, const ComplexVector& solution,
                           const SubdomainOperator& to, Side side_of_to) const;
  LocalSolutions forward_impl(std::span<const Complex> r, std::vector<ComplexVector>* upstream,
                              SweepTrace* trace) const;

  SweepKind kind_;
  std::shared_ptr<const SubdomainSet> set_;
  std::vector<std::size_t> order_;
  std::size_t n_ = 0;
};

}  // namespace mpsweep
