#include "becload/decay.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "becload/errors.hpp"
#include "becload/parallel.hpp"
#include "becload/thermal.hpp"

namespace becload {

std::int64_t OccupationState::total() const {
  return std::accumulate(ground.begin(), ground.end(), std::int64_t{0});
}

void OccupationState::validate(std::size_t n_ground_modes, std::size_t n_excited_modes) const {
  if (ground.size() != n_ground_modes)
    throw std::invalid_argument("OccupationState: ground occupation size mismatch");
  if (excited_index >= n_excited_modes)
    throw std::invalid_argument("OccupationState: excited index out of range");
  for (auto n : ground)
    if (n < 0) throw std::invalid_argument("OccupationState: negative occupation");
}

std::string BarValidity::reason() const {
  if (!expansion_ok) return "expansion";
  if (!occupation_ok) return "occupation";
  return "";
}

double n_prime_update(double n0, double p_plus, double p_zero, std::int64_t n_atoms) {
  return (n0 + 1.0 + (p_plus - p_zero)) / static_cast<double>(n_atoms + 1);
}

BarValidity bar_validity(double p_plus, double p_zero, const std::vector<double>& emission,
                         double n0, std::int64_t n_atoms, const ValidityThresholds& thr) {
  BarValidity v;
  v.threshold = thr.expansion_threshold;
  v.margin = thr.margin;
  v.share_cutoff = thr.share_cutoff;
  v.p_max = std::max(p_plus, p_zero);
  v.expansion_ok = v.p_max < v.threshold;
  double total = 0.0;
  for (double q : emission) total += q;
  double a = 0.0;
  if (total > 0.0) {
    for (std::size_t m = 1; m < emission.size(); ++m)
      if (emission[m] >= thr.share_cutoff * total) a += 1.0;
  }
  v.a_estimate = a;
  const double thermal = static_cast<double>(n_atoms) - n0;
  v.occupation_ok = n0 > v.margin * std::max(a, thermal);
  return v;
}

// ---------------------------------------------------------------------------
// precomputed spectral tables

namespace {

const cplx kMinusI(0.0, -1.0);

struct ClusterInfo {
  std::vector<int> of;          // eigen index -> cluster id
  std::vector<cplx> value;      // representative eigenvalue per cluster
  int count = 0;
};

ClusterInfo find_clusters(const Eigen::VectorXcd& mu) {
  const double tol = 1e-8 * std::max(mu.cwiseAbs().maxCoeff(), 1e-300);
  ClusterInfo c;
  c.of.assign(static_cast<std::size_t>(mu.size()), -1);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      if (std::abs(mu(i) - mu(j)) <= tol) {
        c.of[i] = c.of[j];
        break;
      }
    }
    if (c.of[i] < 0) {
      c.of[i] = c.count++;
      c.value.push_back(mu(i));
    }
  }
  return c;
}

}  // namespace

struct DecayMachinery::Tables {
  Eigen::MatrixXcd V, W;  // right eigenvectors and their inverse
  Eigen::VectorXcd mu;    // eigenvalues of the decomposed matrix
  ClusterInfo clusters;
  std::size_t n_slots = 0;  // L + number of clusters

  kernels::NodeMatrix etilde;   // nodes x (L*M), col a*M + m = sum_l E(w,lm) V(l,a)
  kernels::PaddedWeights qw;    // pattern-weighted solid-angle weights

  // per sideband s; raising (+) feeds P_{N0+2}, lowering (-) feeds P_{N0}
  std::vector<Eigen::MatrixXcd> u_plus, u_minus;       // Rp * W
  std::vector<kernels::NodeMatrix> mm_plus, mm_minus;  // nodes x L
  std::vector<kernels::NodeMatrix> pc_plus, pc_minus;  // nodes x L
};

struct DecayMachinery::SampleContext {
  std::int64_t n0 = 0;
  double c = 0.0;                     // Gamma N0 / 2
  cplx inv_gap_scale{0.0, 0.0};       // factor turning 1/(mu_a-mu_b) into 1/(lambda_a-lambda_b)
  std::vector<cplx> exponents;        // per slot
  std::vector<int> powers;
  Eigen::MatrixXcd hover;
  std::shared_ptr<const Tables> tables;
};

namespace {

// Gram tables against the decomposition of `matrix` over the on-shell
// Franck-Condon plane.
std::shared_ptr<DecayMachinery::Tables> build_spectral_tables(
    const AlphaSlices& slices, const Basis& excited, const Basis& ground,
    const SphereQuadrature& quad, const EmissionPattern& pattern, const Eigen::MatrixXcd& matrix,
    double eta, unsigned threads) {
  auto t = std::make_shared<DecayMachinery::Tables>();
  const std::size_t L = excited.size();
  const std::size_t M = ground.size();

  BiorthoDecomp d = biortho_decompose(matrix);
  t->V = d.right;
  t->W = d.left_conj;
  t->mu = d.eigenvalues;
  t->clusters = find_clusters(t->mu);
  t->n_slots = L + static_cast<std::size_t>(t->clusters.count);

  std::vector<double> w(quad.size());
  for (std::size_t i = 0; i < quad.size(); ++i)
    w[i] = quad.weights[i] * pattern.weight(quad.nodes[i]);
  t->qw.assign(w);

  FranckCondonTable on_shell(excited, ground, quad, {1.0}, eta, threads);
  const auto& plane = on_shell.plane(0);
  t->etilde.resize(quad.size(), L * M);
  for (std::size_t wi = 0; wi < quad.size(); ++wi)
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t m = 0; m < M; ++m) {
        cplx acc(0.0, 0.0);
        for (std::size_t l = 0; l < L; ++l)
          acc += plane.get(wi, composite_index(l, m, M)) * t->V(l, a);
        t->etilde.set(wi, a * M + m, acc);
      }

  t->u_plus.resize(M);
  t->u_minus.resize(M);
  t->mm_plus.resize(M);
  t->mm_minus.resize(M);
  t->pc_plus.resize(M);
  t->pc_minus.resize(M);
  parallel_for(M - 1, threads, [&](std::size_t si) {
    const std::size_t s = si + 1;
    const Eigen::MatrixXcd bp_raw = slices.raising_block(s);
    const Eigen::MatrixXcd bp = t->W * bp_raw * t->V;            // condensate-raising
    const Eigen::MatrixXcd bm = t->W * bp_raw.adjoint() * t->V;  // condensate-lowering
    Eigen::MatrixXcd rp = Eigen::MatrixXcd::Zero(L, L), rm = Eigen::MatrixXcd::Zero(L, L);
    for (std::size_t a = 0; a < L; ++a)
      for (std::size_t b = 0; b < L; ++b) {
        if (t->clusters.of[a] == t->clusters.of[b]) continue;
        const cplx gap = t->mu(a) - t->mu(b);
        rp(a, b) = bp(a, b) / gap;
        rm(a, b) = bm(a, b) / gap;
      }
    t->u_plus[s] = rp * t->W;
    t->u_minus[s] = rm * t->W;
    auto fill_node_tables = [&](const Eigen::MatrixXcd& r, const Eigen::MatrixXcd& b_full,
                                kernels::NodeMatrix& mm, kernels::NodeMatrix& pc) {
      mm.resize(quad.size(), L);
      pc.resize(quad.size(), L);
      for (std::size_t wi = 0; wi < quad.size(); ++wi)
        for (std::size_t b = 0; b < L; ++b) {
          cplx accm(0.0, 0.0), accp(0.0, 0.0);
          for (std::size_t a = 0; a < L; ++a) {
            const cplx e0 = t->etilde.get(wi, a * M + 0);
            accm += e0 * r(a, b);
            if (t->clusters.of[a] == t->clusters.of[b]) accp += e0 * b_full(a, b);
          }
          mm.set(wi, b, accm);
          pc.set(wi, b, accp);
        }
    };
    fill_node_tables(rp, bp, t->mm_plus[s], t->pc_plus[s]);
    fill_node_tables(rm, bm, t->mm_minus[s], t->pc_minus[s]);
  });
  return t;
}

// sum_{a,b} H_ab conj(K_ab) over one diagonal block of an upper-triangular
// gram scratch; H and the block are both Hermitian, so the result is real.
double herm_contract(const Eigen::MatrixXcd& h, const std::vector<cplx>& upper, std::size_t ld,
                     std::size_t off, std::size_t n) {
  double acc = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    acc += (h(a, a) * std::conj(upper[(off + a) * ld + off + a])).real();
    for (std::size_t b = a + 1; b < n; ++b)
      acc += 2.0 * (h(a, b) * std::conj(upper[(off + a) * ld + off + b])).real();
  }
  return acc;
}

// 2 Re sum_{a,b} H_ab f_a conj(g_b) where f is the block at `off_f`, g at
// `off_g` (off_g < off_f so every needed pair sits in the upper triangle:
// K[g_b, f_a] = sum qw conj(g_b) f_a).
double cross_contract(const Eigen::MatrixXcd& h, const std::vector<cplx>& upper, std::size_t ld,
                      std::size_t off_g, std::size_t off_f, std::size_t n) {
  cplx acc(0.0, 0.0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) acc += h(a, b) * upper[(off_g + b) * ld + off_f + a];
  return 2.0 * acc.real();
}

}  // namespace

DecayMachinery::DecayMachinery(const TrapSpec& spec, const AlphaKey& key, unsigned threads,
                               bool include_excited_energies)
    : spec_(spec),
      key_(key),
      threads_(threads),
      include_excited_energies_(include_excited_energies),
      ground_(key.make_ground()),
      excited_(key.make_excited()),
      quad_(key.make_quadrature()) {
  spec_.validate();
  slices_ = build_alpha_slices(key_, threads_);
  decomp_ = biortho_decompose(slices_.condensate_block());
  if (!include_excited_energies_) {
    tables_ = build_spectral_tables(slices_, excited_, ground_, quad_, key_.make_pattern(),
                                    slices_.condensate_block(), spec_.eta(), threads_);
  }
}

DecayMachinery::SampleContext DecayMachinery::make_context(std::int64_t n0) const {
  if (n0 < 1) throw std::invalid_argument("decay channels need at least one condensed atom");
  SampleContext ctx;
  ctx.n0 = n0;
  ctx.c = spec_.gamma * static_cast<double>(n0) / 2.0;
  if (include_excited_energies_) {
    // slow path: the generator is no longer a scalar multiple of the
    // condensate block, so the whole spectral table set depends on N0
    TrapSpec s = spec_;
    s.n_condensed = n0;
    EffectiveGenerator gen = build_generator(slices_, s, true);
    ctx.tables = build_spectral_tables(slices_, excited_, ground_, quad_, key_.make_pattern(),
                                       gen.matrix, spec_.eta(), threads_);
    ctx.inv_gap_scale = cplx(1.0, 0.0);
    const auto& mu = ctx.tables->mu;
    for (Eigen::Index k = 0; k < mu.size(); ++k) ctx.exponents.push_back(kMinusI * mu(k));
    for (const auto& cm : ctx.tables->clusters.value) ctx.exponents.push_back(kMinusI * cm);
  } else {
    ctx.tables = tables_;
    // lambda = -i c mu  =>  1/(lambda_a - lambda_b) = (i/c) / (mu_a - mu_b)
    ctx.inv_gap_scale = cplx(0.0, 1.0 / ctx.c);
    const auto& mu = tables_->mu;
    for (Eigen::Index k = 0; k < mu.size(); ++k) ctx.exponents.push_back(-ctx.c * mu(k));
    for (const auto& cm : tables_->clusters.value) ctx.exponents.push_back(-ctx.c * cm);
  }
  const std::size_t L = excited_.size();
  ctx.powers.assign(ctx.tables->n_slots, 0);
  for (std::size_t k = L; k < ctx.tables->n_slots; ++k) ctx.powers[k] = 1;
  ctx.hover = overlap_cross_matrix(ctx.exponents, ctx.powers);
  return ctx;
}

// Amplitude coefficients of one (sideband s, excited j) pair over all nodes.
// dir_a1 carries the two interfering P_{N0} paths stacked side by side
// (columns [0, n_slots) = sideband emission with A0, columns
// [n_slots, 2 n_slots) = condensate emission with A1); plus carries the
// P_{N0+2} amplitude.
void DecayMachinery::channel_coeffs(const SampleContext& ctx,
                                    const std::vector<std::int64_t>& occ, std::size_t j,
                                    std::size_t s, kernels::NodeMatrix& dir_a1,
                                    kernels::NodeMatrix& plus) const {
  const Tables& t = *ctx.tables;
  const std::size_t L = excited_.size();
  const std::size_t M = ground_.size();
  const std::size_t n_slots = t.n_slots;
  const std::size_t nodes = quad_.size();

  const double ns = static_cast<double>(occ[s]);
  const double n0 = static_cast<double>(ctx.n0);
  const double sqrt_ns1 = std::sqrt(ns + 1.0);
  const cplx pf_plus = kMinusI * (spec_.gamma / 2.0) * n0 * std::sqrt(ns);
  const cplx pf_minus = kMinusI * (spec_.gamma / 2.0) * n0 * sqrt_ns1;
  const cplx mufac_plus = pf_plus * ctx.inv_gap_scale;
  const cplx mufac_minus = pf_minus * ctx.inv_gap_scale;
  const bool has_plus = occ[s] > 0;

  dir_a1.resize(nodes, 2 * n_slots);
  plus.resize(nodes, has_plus ? n_slots : 0);

  for (std::size_t k = 0; k < L; ++k) {
    const cplx dk = t.W(k, j);
    const cplx uplus = has_plus ? t.u_plus[s](k, j) : cplx(0, 0);
    const cplx uminus = t.u_minus[s](k, j);
    for (std::size_t w = 0; w < nodes; ++w) {
      const cplx e0 = t.etilde.get(w, k * M + 0);
      const cplx es = t.etilde.get(w, k * M + s);
      dir_a1.set(w, k, sqrt_ns1 * es * dk);
      dir_a1.set(w, n_slots + k, mufac_minus * (e0 * uminus - t.mm_minus[s].get(w, k) * dk));
      if (has_plus) plus.set(w, k, mufac_plus * (e0 * uplus - t.mm_plus[s].get(w, k) * dk));
    }
  }
  // confluent (t * exp) slots, one per eigenvalue cluster
  for (std::size_t b = 0; b < L; ++b) {
    const std::size_t slot = L + static_cast<std::size_t>(t.clusters.of[b]);
    const cplx dk = t.W(b, j);
    for (std::size_t w = 0; w < nodes; ++w) {
      const cplx addm = kMinusI * pf_minus * t.pc_minus[s].get(w, b) * dk;
      dir_a1.set(w, n_slots + slot, dir_a1.get(w, n_slots + slot) + addm);
      if (has_plus) {
        const cplx addp = kMinusI * pf_plus * t.pc_plus[s].get(w, b) * dk;
        plus.set(w, slot, plus.get(w, slot) + addp);
      }
    }
  }
}

DecayMachinery::ChannelSums DecayMachinery::eval_channels(const SampleContext& ctx,
                                                          const std::vector<std::int64_t>& occ,
                                                          std::size_t j) const {
  const Tables& t = *ctx.tables;
  const std::size_t L = excited_.size();
  const std::size_t M = ground_.size();
  const std::size_t n_slots = t.n_slots;
  const std::size_t nodes = quad_.size();
  const double gamma = spec_.gamma;

  ChannelSums sums;
  sums.emission.assign(M, 0.0);

  kernels::NodeMatrix dir_a1, plus, dir0;
  std::vector<cplx> scratch2(4 * n_slots * n_slots);
  std::vector<cplx> scratchp(n_slots * n_slots);

  // direct emission into the condensate (the dominant channel; recorded for
  // the effective-level count of the validity check)
  dir0.resize(nodes, n_slots);
  const double sqrt_n01 = std::sqrt(static_cast<double>(occ[0]) + 1.0);
  for (std::size_t k = 0; k < L; ++k) {
    const cplx dk = t.W(k, j);
    for (std::size_t w = 0; w < nodes; ++w)
      dir0.set(w, k, sqrt_n01 * t.etilde.get(w, k * M + 0) * dk);
  }
  std::fill(scratchp.begin(), scratchp.end(), cplx(0, 0));
  kernels::weighted_gram_upper(dir0, t.qw, scratchp.data(), n_slots);
  sums.emission[0] = gamma * herm_contract(ctx.hover, scratchp, n_slots, 0, n_slots);

  for (std::size_t s = 1; s < M; ++s) {
    channel_coeffs(ctx, occ, j, s, dir_a1, plus);

    std::fill(scratch2.begin(), scratch2.end(), cplx(0, 0));
    kernels::weighted_gram_upper(dir_a1, t.qw, scratch2.data(), 2 * n_slots);
    const double p_side = gamma * herm_contract(ctx.hover, scratch2, 2 * n_slots, 0, n_slots);
    const double p_cond =
        gamma * herm_contract(ctx.hover, scratch2, 2 * n_slots, n_slots, n_slots);
    const double p_int =
        gamma * cross_contract(ctx.hover, scratch2, 2 * n_slots, 0, n_slots, n_slots);
    sums.pz_side += p_side;
    sums.pz_cond += p_cond;
    sums.pz_int += p_int;
    sums.emission[s] = p_side;

    if (plus.cols > 0) {
      std::fill(scratchp.begin(), scratchp.end(), cplx(0, 0));
      kernels::weighted_gram_upper(plus, t.qw, scratchp.data(), n_slots);
      sums.p_plus += gamma * herm_contract(ctx.hover, scratchp, n_slots, 0, n_slots);
    }
  }
  return sums;
}

DecayMachinery::ChannelSums DecayMachinery::all_channels(const OccupationState& initial) const {
  initial.validate(ground_.size(), excited_.size());
  const SampleContext ctx = make_context(initial.ground[0]);
  return eval_channels(ctx, initial.ground, initial.excited_index);
}

std::vector<double> DecayMachinery::excited_thermal_weights(double kTe) const {
  std::vector<double> w(excited_.size(), 0.0);
  if (kTe <= 0.0) {
    w[0] = 1.0;
    return w;
  }
  double total = 0.0;
  for (std::size_t j = 0; j < excited_.size(); ++j) {
    w[j] = std::exp(-excited_.mode(j).shell() * spec_.omega / kTe);
    total += w[j];
  }
  for (auto& x : w) x /= total;
  return w;
}

DecayMachinery::ChannelSums DecayMachinery::all_channels_thermal(
    const std::vector<std::int64_t>& ground_occupations, double kTe) const {
  const std::vector<double> wj = excited_thermal_weights(kTe);
  ChannelSums acc;
  acc.emission.assign(ground_.size(), 0.0);
  const SampleContext ctx = make_context(ground_occupations[0]);
  for (std::size_t j = 0; j < wj.size(); ++j) {
    if (wj[j] < 1e-14) continue;
    const ChannelSums one = eval_channels(ctx, ground_occupations, j);
    acc.p_plus += wj[j] * one.p_plus;
    acc.pz_cond += wj[j] * one.pz_cond;
    acc.pz_side += wj[j] * one.pz_side;
    acc.pz_int += wj[j] * one.pz_int;
    for (std::size_t m = 0; m < acc.emission.size(); ++m)
      acc.emission[m] += wj[j] * one.emission[m];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// reference (per-node, per-term) evaluation of the contract operations

namespace {

void append_terms(std::vector<OverlapTerm>& terms, const kernels::NodeMatrix& coeffs,
                  std::size_t w, std::size_t col0, const DecayMachinery::SampleContext& ctx) {
  for (std::size_t k = 0; k < ctx.exponents.size(); ++k)
    terms.push_back(OverlapTerm{coeffs.get(w, col0 + k), ctx.exponents[k], ctx.powers[k]});
}

}  // namespace

double DecayMachinery::p_plus_s(const OccupationState& initial, std::size_t s) const {
  initial.validate(ground_.size(), excited_.size());
  if (s == 0 || s >= ground_.size())
    throw std::invalid_argument("p_plus_s: s must name a non-condensate ground mode");
  if (initial.ground[s] == 0) return 0.0;  // no atom available to leave level s
  const SampleContext ctx = make_context(initial.ground[0]);
  kernels::NodeMatrix dir_a1, plus;
  channel_coeffs(ctx, initial.ground, initial.excited_index, s, dir_a1, plus);
  double p = 0.0;
  std::vector<OverlapTerm> terms;
  for (std::size_t w = 0; w < quad_.size(); ++w) {
    terms.clear();
    append_terms(terms, plus, w, 0, ctx);
    p += ctx.tables->qw.w[w] * infinite_time_overlap(terms);
  }
  return spec_.gamma * p;
}

DecayMachinery::PZeroTerms DecayMachinery::p_zero_s(const OccupationState& initial,
                                                    std::size_t s) const {
  initial.validate(ground_.size(), excited_.size());
  if (s == 0 || s >= ground_.size())
    throw std::invalid_argument("p_zero_s: s must name a non-condensate ground mode");
  const SampleContext ctx = make_context(initial.ground[0]);
  const std::size_t n_slots = ctx.tables->n_slots;
  kernels::NodeMatrix dir_a1, plus;
  channel_coeffs(ctx, initial.ground, initial.excited_index, s, dir_a1, plus);
  PZeroTerms out;
  std::vector<OverlapTerm> dir_terms, a1_terms, both;
  for (std::size_t w = 0; w < quad_.size(); ++w) {
    dir_terms.clear();
    a1_terms.clear();
    both.clear();
    append_terms(dir_terms, dir_a1, w, 0, ctx);
    append_terms(a1_terms, dir_a1, w, n_slots, ctx);
    both = dir_terms;
    both.insert(both.end(), a1_terms.begin(), a1_terms.end());
    const double qw = ctx.tables->qw.w[w];
    const double pd = infinite_time_overlap(dir_terms);
    const double pa = infinite_time_overlap(a1_terms);
    const double pt = infinite_time_overlap(both);
    out.direct_sideband += qw * pd;
    out.direct_condensate += qw * pa;
    out.interference += qw * (pt - pd - pa);
  }
  out.direct_sideband *= spec_.gamma;
  out.direct_condensate *= spec_.gamma;
  out.interference *= spec_.gamma;
  return out;
}

// ---------------------------------------------------------------------------
// thermal sampling and averaging

OccupationState DecayMachinery::sample_initial(double kTg, double kTe, Rng& rng,
                                               std::int64_t n_atoms) const {
  OccupationState st;
  const std::size_t M = ground_.size();
  const std::int64_t n = n_atoms > 0 ? n_atoms : spec_.n_atoms;
  st.ground.assign(M, 0);

  if (kTg > 0.0 && M > 1) {
    const double mu = fit_chemical_potential_basis(ground_, kTg, n, spec_.omega);
    const std::vector<double> q = bose_factors(ground_, kTg, mu, spec_.omega);
    std::int64_t cap = n - 1;  // at least one condensed atom
    int attempts = 0;
    for (;;) {
      std::int64_t total = 0;
      for (std::size_t m = 1; m < M; ++m) {
        st.ground[m] = rng.geometric(q[m]);
        total += st.ground[m];
      }
      if (total <= cap) {
        st.ground[0] = n - total;
        break;
      }
      ++attempts;
      st.resamples = attempts;
      if (attempts % 50 == 0 && cap > 1)
        cap = std::max<std::int64_t>(1, static_cast<std::int64_t>(0.9 * cap));
      if (attempts >= 1000) {
        // deeply non-degenerate regime: truncate the draw at the cap so the
        // sampler still terminates; the resample count flags the distortion
        std::int64_t run = 0;
        for (std::size_t m = 1; m < M; ++m) {
          st.ground[m] = std::min(st.ground[m], cap - run);
          run += st.ground[m];
        }
        st.ground[0] = n - run;
        break;
      }
    }
  } else {
    st.ground[0] = n;
  }

  const std::vector<double> wj = excited_thermal_weights(kTe);
  st.excited_index = rng.categorical(wj, 1.0);
  return st;
}

OccupationState sample_initial(const TrapSpec& spec, double kTg, double kTe,
                               const DecayMachinery& machinery, std::uint64_t rng_seed) {
  (void)spec;
  Rng rng(rng_seed);
  return machinery.sample_initial(kTg, kTe, rng);
}

DecayOutcome averaged_outcome(const TrapSpec& spec, double kTg, double kTe, int n_samples,
                              const DecayMachinery& machinery, std::uint64_t rng_seed,
                              const ValidityThresholds& thr, unsigned threads) {
  if (n_samples < 1) throw std::invalid_argument("averaged_outcome: n_samples must be >= 1");
  const std::size_t M = machinery.ground().size();

  struct PerSample {
    double p_plus = 0, pz_cond = 0, pz_side = 0, pz_int = 0;
    double n0 = 0;
    std::vector<double> emission;
    int resamples = 0;
  };
  std::vector<PerSample> results(static_cast<std::size_t>(n_samples));

  parallel_for(static_cast<std::size_t>(n_samples), threads, [&](std::size_t i) {
    Rng rng(rng_seed + i);
    OccupationState st = machinery.sample_initial(kTg, kTe, rng, spec.n_atoms);
    const auto sums = machinery.all_channels_thermal(st.ground, kTe);
    PerSample& r = results[i];
    r.p_plus = sums.p_plus;
    r.pz_cond = sums.pz_cond;
    r.pz_side = sums.pz_side;
    r.pz_int = sums.pz_int;
    r.n0 = static_cast<double>(st.ground[0]);
    r.emission = sums.emission;
    r.resamples = st.resamples;
  });

  DecayOutcome out;
  out.n_atoms = spec.n_atoms;
  out.n_samples = n_samples;
  std::vector<double> emission(M, 0.0);
  const double inv = 1.0 / n_samples;
  for (const auto& r : results) {
    out.p_plus += r.p_plus * inv;
    out.p_zero_direct_condensate += r.pz_cond * inv;
    out.p_zero_direct_sideband += r.pz_side * inv;
    out.p_zero_interference += r.pz_int * inv;
    out.n0_mean += r.n0 * inv;
    out.resamples += r.resamples;
    for (std::size_t m = 0; m < M; ++m) emission[m] += r.emission[m] * inv;
  }
  out.p_zero =
      out.p_zero_direct_condensate + out.p_zero_direct_sideband + out.p_zero_interference;
  out.n_prime = n_prime_update(out.n0_mean, out.p_plus, out.p_zero, out.n_atoms);

  if (n_samples > 1) {
    const double mean_gain = out.n_prime - out.n0_mean / static_cast<double>(out.n_atoms);
    double vp = 0, vz = 0, vn = 0, vg = 0;
    for (const auto& r : results) {
      const double pz = r.pz_cond + r.pz_side + r.pz_int;
      const double np = n_prime_update(r.n0, r.p_plus, pz, out.n_atoms);
      const double gain = np - r.n0 / static_cast<double>(out.n_atoms);
      vp += (r.p_plus - out.p_plus) * (r.p_plus - out.p_plus);
      vz += (pz - out.p_zero) * (pz - out.p_zero);
      vn += (np - out.n_prime) * (np - out.n_prime);
      vg += (gain - mean_gain) * (gain - mean_gain);
    }
    const double norm = 1.0 / (n_samples * (n_samples - 1.0));
    out.se_p_plus = std::sqrt(vp * norm);
    out.se_p_zero = std::sqrt(vz * norm);
    out.se_n_prime = std::sqrt(vn * norm);
    out.se_gain = std::sqrt(vg * norm);
  }
  out.validity = bar_validity(out.p_plus, out.p_zero, emission, out.n0_mean, out.n_atoms, thr);
  return out;
}

}  // namespace becload
