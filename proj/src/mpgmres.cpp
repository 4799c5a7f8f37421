#include <algorithm>
#include "mpsweep/mpgmres.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>

namespace mpsweep {
namespace {

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex m;
  const std::size_t nthreads = std::min<std::size_t>(threads, count);
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < count; i += nthreads) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(m);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::size_t expected_inner_products(std::size_t k, std::size_t t) {
  // (k - 1/2) t^2 + 3t/2 = ((2k - 1) t^2 + 3t) / 2, always an integer
  return ((2 * k - 1) * t * t + 3 * t) / 2;
}

std::vector<ComplexVector> select_directions(Variant variant, std::size_t t, const KrylovBlock& vk,
                                             std::size_t k) {
  if (variant == Variant::Complete) throw std::invalid_argument("select_directions: use complete_expand");
  if (t == 0) throw std::invalid_argument("select_directions: no preconditioners");
  if (variant == Variant::Standard && t != 1) {
    throw std::invalid_argument("select_directions: standard GMRES takes one preconditioner");
  }
  if (vk.columns.empty()) throw std::invalid_argument("select_directions: empty block");
  if (k < 1) throw std::invalid_argument("select_directions: iterations count from 1");

  if (k == 1) return std::vector<ComplexVector>(t, vk.columns.front());
  if (t == 1) return {vk.columns.back()};
  if (t == 2) {
    const ComplexVector* from[2] = {nullptr, nullptr};
    for (std::size_t c = 0; c < vk.columns.size(); ++c) {
      if (vk.origin[c] < 2) from[vk.origin[c]] = &vk.columns[c];
    }
    if (from[0] && from[1]) return {*from[1], *from[0]};
    // one direction was deflated: both preconditioners take the survivor
    const ComplexVector& survivor = from[0] ? *from[0] : from[1] ? *from[1] : vk.columns.front();
    return {survivor, survivor};
  }
  ComplexVector sum(vk.columns.front().size());
  for (const auto& col : vk.columns) axpy(1.0, col, sum);
  return std::vector<ComplexVector>(t, sum);
}

std::vector<ExpandedSource> complete_expand(std::size_t t, const KrylovBlock& vk,
                                            std::size_t total_columns, std::size_t cap) {
  const std::size_t added = t * vk.columns.size();
  if (total_columns + added > cap) {
    throw CapacityError("complete_expand: " + std::to_string(total_columns) + " + " +
                        std::to_string(added) + " basis columns exceed the cap of " + std::to_string(cap));
  }
  std::vector<ExpandedSource> out;
  out.reserve(added);
  for (const auto& col : vk.columns) {
    for (std::size_t i = 0; i < t; ++i) out.push_back({i, &col});
  }
  return out;
}

SolveResult mpgmres(const LinearOperator& a, std::span<const LinearOperator* const> preconditioners,
                    std::span<const Complex> b, const SolverConfig& cfg) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t n = a.size();
  const std::size_t t = preconditioners.size();
  require_size(b.size(), n, "mpgmres rhs");
  if (t == 0) throw std::invalid_argument("mpgmres: need at least one preconditioner");
  for (const auto* m : preconditioners) require_size(m->size(), n, "mpgmres preconditioner");
  if (cfg.variant == Variant::Standard && t != 1) {
    throw std::invalid_argument("mpgmres: the standard variant takes exactly one preconditioner");
  }
  if (!(cfg.tol > 0.0 && cfg.tol < 1.0)) throw std::invalid_argument("mpgmres: tol must lie in (0, 1)");

  SolveResult result;
  SolveStats& st = result.stats;
  result.x.assign(n, Complex{});

  const double beta = norm2(b);
  st.inner_products = 1;
  if (beta == 0.0) {
    st.converged = true;
    st.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
  }

  std::vector<ComplexVector> v;  // all basis columns
  std::vector<ComplexVector> z;  // all preconditioned directions
  std::vector<ComplexVector> hcols;  // H column per z, indexed by V column
  v.emplace_back(b.begin(), b.end());
  scale(1.0 / beta, v.back());
  KrylovBlock block{{v.back()}, {KrylovBlock::kNoOrigin}};
  st.block_columns.push_back(1);

  ComplexVector y;
  for (std::size_t k = 1; k <= cfg.max_it; ++k) {
    // (1)-(2) sources and preconditioned directions
    std::vector<std::size_t> prec_of;
    std::vector<const ComplexVector*> sources;
    std::vector<ComplexVector> selected;
    if (cfg.variant == Variant::Complete) {
      for (const auto& e : complete_expand(t, block, v.size(), cfg.complete_cap)) {
        prec_of.push_back(e.preconditioner);
        sources.push_back(e.source);
      }
    } else {
      selected = select_directions(cfg.variant, t, block, k);
      for (std::size_t i = 0; i < t; ++i) {
        prec_of.push_back(i);
        sources.push_back(&selected[i]);
      }
    }
    const std::size_t m = sources.size();
    std::vector<ComplexVector> zk(m, ComplexVector(n));
    std::vector<ComplexVector> w(m, ComplexVector(n));
    parallel_for(m, cfg.threads, [&](std::size_t j) {
      preconditioners[prec_of[j]]->apply(*sources[j], zk[j]);
      a.apply(zk[j], w[j]);
    });
    st.prec_applies += m;
    st.matvecs += m;

    // (4) block MGS against every earlier column, then QR within the block
    std::size_t ip = 0;
    const std::size_t prior = v.size();
    std::vector<ComplexVector> coeff(m, ComplexVector(prior + m));
    const int passes = cfg.reorthogonalize ? 2 : 1;
    for (int pass = 0; pass < passes; ++pass) {
      for (std::size_t q = 0; q < prior; ++q) {
        for (std::size_t j = 0; j < m; ++j) {
          const Complex hq = dot(v[q], w[j]);
          axpy(-hq, v[q], w[j]);
          coeff[j][q] += hq;
          ++ip;
        }
      }
    }
    KrylovBlock next;
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t l = 0; l < next.columns.size(); ++l) {
        const Complex hl = dot(next.columns[l], w[j]);
        axpy(-hl, next.columns[l], w[j]);
        coeff[j][prior + l] = hl;
        ++ip;
      }
      const double nrm = norm2(w[j]);
      ++ip;
      // Pythagoras recovers the pre-orthogonalisation norm without another inner product.
      double before = nrm * nrm;
      for (const auto& c : coeff[j]) before += std::norm(c);
      before = std::sqrt(before);
      if (nrm > cfg.deflation_tol * before && nrm > 0.0) {
        coeff[j][prior + next.columns.size()] = nrm;
        scale(1.0 / nrm, w[j]);
        next.columns.push_back(std::move(w[j]));
        next.origin.push_back(prec_of[j]);
      }
    }
    st.inner_products += ip;
    st.inner_products_per_iteration.push_back(ip);

    for (auto& col : next.columns) v.push_back(col);
    for (std::size_t j = 0; j < m; ++j) {
      z.push_back(std::move(zk[j]));
      coeff[j].resize(v.size());
      hcols.push_back(std::move(coeff[j]));
    }
    st.block_columns.push_back(next.columns.size());

    // (6) projected least squares over all columns so far. After deflation Z
    // can outgrow V; zero rows keep H tall without changing the minimiser.
    DenseMatrix h(std::max(v.size(), z.size()), z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      for (std::size_t i = 0; i < hcols[j].size(); ++i) h(i, j) = hcols[j][i];
    }
    auto ls = hessenberg_lsq(h, beta);
    y = std::move(ls.y);
    st.iterations = k;
    st.residual_history.push_back(ls.resnorm / beta);

    if (cfg.keep_iterates) {
      ComplexVector xk(n);
      for (std::size_t j = 0; j < z.size(); ++j) axpy(y[j], z[j], xk);
      result.iterates.push_back(std::move(xk));
    }
    if (ls.resnorm / beta <= cfg.tol) {
      st.converged = true;
      break;
    }
    if (next.columns.empty()) {
      st.exhausted = true;
      break;
    }
    block = std::move(next);
  }

  for (std::size_t j = 0; j < z.size(); ++j) axpy(y[j], z[j], result.x);
  ComplexVector ax(n);
  a.apply(result.x, ax);
  for (std::size_t i = 0; i < n; ++i) ax[i] = b[i] - ax[i];
  st.final_rel_residual = norm2(ax) / beta;
  st.residual_warning = st.converged && st.final_rel_residual > 10.0 * cfg.tol;

  if (cfg.keep_basis) {
    KrylovBasis basis;
    basis.h = DenseMatrix(v.size(), z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      for (std::size_t i = 0; i < hcols[j].size(); ++i) basis.h(i, j) = hcols[j][i];
    }
    basis.v = std::move(v);
    basis.z = std::move(z);
    basis.block_columns = st.block_columns;
    result.basis = std::move(basis);
  }
  st.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace mpsweep
