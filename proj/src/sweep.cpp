#include "mpsweep/sweep.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mpsweep {

std::string SweepKind::name() const {
  switch (direction) {
    case Direction::LR: return double_sweep ? "LRL" : "LR";
    case Direction::RL: return double_sweep ? "RLR" : "RL";
    case Direction::BT: return double_sweep ? "BTB" : "BT";
    case Direction::TB: return double_sweep ? "TBT" : "TB";
  }
  return "?";
}

SweepPreconditioner::SweepPreconditioner(SweepKind kind, std::shared_ptr<const SubdomainSet> subdomains)
    : kind_(kind), set_(std::move(subdomains)) {
  if (!set_) throw std::invalid_argument("SweepPreconditioner: no subdomains");
  if (set_->decomposition.axis != kind_.axis()) {
    throw std::invalid_argument("SweepPreconditioner: " + kind_.name() +
                                " does not match the decomposition axis");
  }
  for (const auto& op : set_->subdomains) {
    if (op.factor.size() != op.size()) {
      throw std::invalid_argument("SweepPreconditioner: subdomain " + std::to_string(op.index) +
                                  " is not factored");
    }
  }
  n_ = set_->decomposition.grid.unknowns();
  order_.resize(set_->subdomains.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (kind_.reversed()) std::reverse(order_.begin(), order_.end());
}

std::size_t SweepPreconditioner::solves_per_apply() const {
  const std::size_t n = order_.size();
  return kind_.double_sweep ? 2 * n - 1 : n;
}

ComplexVector SweepPreconditioner::restrict_rhs(const SubdomainOperator& op,
                                                std::span<const Complex> r) const {
  ComplexVector local(op.size());
  for (std::size_t l = 0; l < local.size(); ++l) local[l] = r[op.local_to_global[l]];
  return local;
}

ComplexVector SweepPreconditioner::trace_from(const SubdomainOperator& from, const ComplexVector& solution,
                                              const SubdomainOperator& to, Side side_of_to) const {
  const std::size_t line = side_of_to == Side::Minus ? to.first : to.last;
  ComplexVector g(to.cross_count);
  auto value = [&](std::size_t along, std::size_t cross) { return solution[from.local_index(along, cross)]; };
  interface_trace(set_->decomposition.grid.scheme, side_of_to, line, to.cross_count, set_->h, set_->k, value, g);
  return g;
}

LocalSolutions SweepPreconditioner::forward_impl(std::span<const Complex> r,
                                                 std::vector<ComplexVector>* upstream,
                                                 SweepTrace* trace) const {
  require_size(r.size(), n_, "forward_sweep residual");
  const auto& subs = set_->subdomains;
  LocalSolutions v(subs.size());
  if (upstream) upstream->assign(subs.size(), {});
  for (std::size_t q = 0; q < order_.size(); ++q) {
    const auto& op = subs[order_[q]];
    auto rhs = restrict_rhs(op, r);
    if (q > 0) {
      const auto& prev = subs[order_[q - 1]];
      auto g = trace_from(prev, v[prev.index], op, upstream_side());
      op.impose_interface_data(upstream_side(), g, rhs);
      if (upstream) (*upstream)[op.index] = std::move(g);
    }
    op.impose_interface_data(downstream_side(), {}, rhs);
    v[op.index] = op.factor.solve(rhs);
    if (trace) ++trace->local_solves;
  }
  return v;
}

LocalSolutions SweepPreconditioner::forward_sweep(std::span<const Complex> r, SweepTrace* trace) const {
  return forward_impl(r, nullptr, trace);
}

LocalSolutions SweepPreconditioner::backward_sweep(std::span<const Complex> r, const LocalSolutions& forward,
                                                   SweepTrace* trace) const {
  require_size(r.size(), n_, "backward_sweep residual");
  const auto& subs = set_->subdomains;
  require_size(forward.size(), subs.size(), "backward_sweep forward solutions");
  LocalSolutions u(subs.size());
  const std::size_t last = order_.size() - 1;
  u[order_[last]] = forward[order_[last]];
  for (std::size_t q = last; q-- > 0;) {
    const auto& op = subs[order_[q]];
    auto rhs = restrict_rhs(op, r);
    if (q > 0) {
      const auto& prev = subs[order_[q - 1]];
      op.impose_interface_data(upstream_side(), trace_from(prev, forward[prev.index], op, upstream_side()),
                               rhs);
    }
    const auto& next = subs[order_[q + 1]];
    op.impose_interface_data(downstream_side(), trace_from(next, u[next.index], op, downstream_side()),
                             rhs);
    u[op.index] = op.factor.solve(rhs);
    if (trace) ++trace->local_solves;
  }
  return u;
}

void SweepPreconditioner::apply(std::span<const Complex> r, std::span<Complex> z, SweepTrace* trace) const {
  require_size(z.size(), n_, "sweep output");
  const auto& subs = set_->subdomains;
  std::vector<ComplexVector> upstream;
  auto v = forward_impl(r, kind_.double_sweep ? &upstream : nullptr, trace);

  auto scatter = [&](const SubdomainOperator& op, const ComplexVector& local) {
    for (std::size_t l = 0; l < local.size(); ++l) z[op.local_to_global[l]] = local[l];
  };
  if (!kind_.double_sweep) {
    for (const auto s : order_) scatter(subs[s], v[s]);
    return;
  }

  // Backward pass; the forward upstream data is reused rather than recomputed.
  const std::size_t last = order_.size() - 1;
  scatter(subs[order_[last]], v[order_[last]]);
  ComplexVector u_next = std::move(v[order_[last]]);
  for (std::size_t q = last; q-- > 0;) {
    const auto& op = subs[order_[q]];
    auto rhs = restrict_rhs(op, r);
    if (q > 0) op.impose_interface_data(upstream_side(), upstream[op.index], rhs);
    const auto& next = subs[order_[q + 1]];
    op.impose_interface_data(downstream_side(), trace_from(next, u_next, op, downstream_side()), rhs);
    auto u = op.factor.solve(rhs);
    if (trace) ++trace->local_solves;
    scatter(op, u);
    u_next = std::move(u);
  }
}

void SweepPreconditioner::apply(std::span<const Complex> r, std::span<Complex> z) const {
  apply(r, z, nullptr);
}

ComplexVector SweepPreconditioner::apply(std::span<const Complex> r) const {
  ComplexVector z(n_);
  apply(r, z, nullptr);
  return z;
}

}  // namespace mpsweep
