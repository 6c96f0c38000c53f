// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <string>

#include "common.hpp"
#include "jminv/commands.hpp"

using namespace jminv;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(const std::string& id, const std::string& what, bool pass, double measured, double tol,
            const std::string& note = "") {
  char buf[320];
  std::snprintf(buf, sizeof buf, "%s  [%s] %-52s measured %.3e  tol %.1e", pass ? "PASS" : "FAIL", id.c_str(),
                what.c_str(), measured, tol);
  std::cout << buf << (note.empty() ? "" : "  (" + note + ")") << "\n";
  if (!pass) ++failures;
}

void detail(const std::string& s) { std::cout << "      " << s << "\n"; }

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

double band(const QuasiTridiagonalHamiltonian& h, int n, int c) {
  switch (c) {
    case 0: return h.a1[n];
    case 1: return h.b1[n];
    case 2: return h.a2[n];
    case 3: return h.b2[n];
    case 4: return h.u[n];
    default: return h.v[n];
  }
}

template <class Table>
std::pair<double, std::string> bands_vs(const QuasiTridiagonalHamiltonian& h, const Table& t) {
  static const char* names[] = {"a1", "b1", "a2", "b2", "u", "v"};
  double worst = 0;
  std::string where;
  for (int n = 0; n < 5; ++n)
    for (int c = 0; c < 6; ++c) {
      if (n == 0 && (c == 1 || c == 3 || c == 5)) continue;
      const double d = std::abs(band(h, n, c) - t[n][c]);
      if (d > worst) {
        worst = d;
        where = std::string(names[c]) + "[" + std::to_string(n) + "]";
      }
    }
  return {worst, where};
}

}  // namespace

int main() {
  const ChannelSet cs = fixture::channels();
  const AnalyticModel model(fixture::model(), cs);

  // 1. open region
  {
    const auto t0 = Clock::now();
    const Extraction ex = find_open_triplets(model, cs, fixture::k0());
    const double secs = seconds_since(t0);
    double dl = 0, dz = 0;
    const bool count = ex.triplets.size() == 5;
    for (std::size_t j = 0; count && j < 5; ++j) {
      const auto& g = golden::triplets_first[3 + j];
      const auto& t = ex.triplets[j];
      dl = std::max(dl, std::abs(t.lambda - g.lambda) / std::abs(g.lambda));
      dz = std::max({dz, std::abs(std::abs(t.zN) - std::abs(g.zN)), std::abs(std::abs(t.zNN) - std::abs(g.zNN))});
    }
    report("1", "open-region eigenvalues (relative)", count && dl <= 1e-6, dl, 1e-6,
           std::to_string(ex.triplets.size()) + " roots");
    report("1", "open-region |Z| components", count && dz <= 1e-5, dz, 1e-5);
    report("1", "open-region runtime [s]", secs < 10, secs, 10);
  }

  // 2. closed region
  {
    const Extraction ex = find_closed_triplets(model, cs);
    const bool count = ex.triplets.size() == 2;
    double dl = 0, dz = 0;
    for (std::size_t j = 0; count && j < 2; ++j) {
      const auto& g = golden::triplets_first[1 + j];
      const auto& t = ex.triplets[j];
      const double l = std::abs(t.lambda - g.lambda) / g.lambda, z = std::abs(std::abs(t.zN) - g.zN);
      dl = std::max(dl, l);
      dz = std::max(dz, z);
      char buf[160];
      std::snprintf(buf, sizeof buf, "j=%zu lambda %.11f (ref %.11f)  Z %.11f (ref %.11f)", j + 2, t.lambda,
                    g.lambda, t.zN, g.zN);
      detail(buf);
    }
    report("2", "closed-region eigenvalues (relative)", count && dl <= 1e-6, dl, 1e-6);
    report("2", "closed-region Z components", count && dz <= 1e-5, dz, 1e-5);
  }

  // 3. iteration trace
  const auto t0 = Clock::now();
  const IterationResult& run = fixture::model_run();
  const double run_secs = seconds_since(t0);
  {
    double worst[3] = {0, 0, 0};
    for (int i = 0; i < 6 && i < static_cast<int>(run.history.size()); ++i)
      for (int c = 0; c < 3; ++c)
        worst[c] = std::max(worst[c], std::abs(run.history[i].targets[c] - golden::trace[i][c]));
    const int iters = static_cast<int>(run.history.size()) - 1;
    report("3", "trace a1 (i = 0..5)", worst[0] <= 1e-5, worst[0], 1e-5);
    report("3", "trace a2 (i = 0..5)", worst[1] <= 1e-5, worst[1], 1e-5);
    report("3", "trace u (i = 0..5)", worst[2] <= 1e-5, worst[2], 1e-5);
    report("3", "iterations to converge", run.converged && iters <= 8, iters, 8);
    report("3", "reconstruction runtime [s]", run_secs < 300, run_secs, 300);
  }

  // 4. Hamiltonian bands and external/bound triplets
  {
    const auto [wa, pa] = bands_vs(run.history.front().h, golden::bands_first);
    const auto [wb, pb] = bands_vs(run.final_h(), golden::bands_final);
    report("4", "first-pass bands", wa <= 1e-4, wa, 1e-4, "worst " + pa);
    report("4", "final bands", wb <= 1e-4, wb, 1e-4, "worst " + pb);
    double last = 0;
    for (int c = 0; c < 6; ++c) last = std::max(last, std::abs(band(run.final_h(), 4, c) - golden::bands_final[4][c]));
    detail("final bands, last row only: max deviation " + fmt(last));
    auto trip = [](const SpectralTriplet& t, const golden::Triplet& g) {
      return std::max({std::abs(t.lambda - g.lambda), std::abs(std::abs(t.zN) - std::abs(g.zN)),
                       std::abs(std::abs(t.zNN) - std::abs(g.zNN))});
    };
    const auto& fa = run.history.front().triplets;
    const auto& fb = run.history.back().triplets;
    double da = 0, db = 0;
    for (int j : {0, 8, 9}) da = std::max(da, trip(fa[j], golden::triplets_first[j]));
    db = std::max({trip(fb[0], golden::triplets_final_changed[0]), trip(fb[8], golden::triplets_final_changed[1]),
                   trip(fb[9], golden::triplets_final_changed[2])});
    report("4", "first-pass external/bound triplets", da <= 1e-5, da, 1e-5);
    report("4", "final external/bound triplets", db <= 1e-5, db, 1e-5);
  }

  // 5. bound-state closure
  {
    const auto b = bound_states_from_h(run.final_h());
    const bool one = b.size() == 1;
    const double dk = one ? std::abs(b[0].kappa - golden::kappa) : 1e300;
    const double dr = one ? std::max(std::abs(b[0].res11.imag() / golden::res11_im - 1),
                                     std::abs(b[0].res12.imag() / golden::res12_im - 1))
                          : 1e300;
    report("5", "bound-state kappa", one && dk <= 1e-5, dk, 1e-5, std::to_string(b.size()) + " found");
    report("5", "bound-state residues (relative)", one && dr <= 1e-3, dr, 1e-3);
  }

  // 6. property suite
  {
    std::mt19937_64 rng(20261016);
    double w = 0;
    for (int i = 0; i < 1000; ++i) {
      ChannelSet c = cs;
      c.N = 2 + i % 9;
      const auto h = random_hamiltonian(c, rng);
      w = std::max(w, fixture::max_band_diff(lanczos_reconstruct(spectral_data(h), c), h));
    }
    report("6(i)", "Lanczos roundtrip, 1000 random H", w <= 1e-10, w, 1e-10);

    const auto h0 = free_hamiltonian(cs);
    const HamiltonianProvider fp(h0);
    const auto Qf = reconstruction_kernel(fp, cs, fixture::k0(), {}, {}, {});
    const double wf = fixture::max_band_diff(full_marchenko_h(Qf, cs), h0);
    report("6(ii)", "free-case Marchenko chain", wf <= 1e-7, wf, 1e-7);

    double wu = 0;
    const double sd = std::sqrt(cs.delta);
    for (int i = 0; i < 100; ++i) {
      const auto tr = spectral_data(random_hamiltonian(cs, rng));
      for (int j = 1; j <= 100; ++j) {
        const double k = sd + (fixture::k0() - sd) * j / 100.0;
        wu = std::max(wu, unitarity_defect(smatrix_from_triplets(tr, cs, k).S));
      }
    }
    report("6(iii)", "forward unitarity, 100 random H", wu <= 1e-8, wu, 1e-8);

    const auto Q = reconstruction_kernel(model, cs, fixture::k0(), model.bound_states(), {}, {});
    const auto hm = full_marchenko_h(Q, cs);
    const auto& hl = run.history.front().h;
    const double two = fixture::max_band_diff(hm, hl);
    double lastrow = 0;
    for (int c : {0, 2, 4}) lastrow = std::max(lastrow, std::abs(band(hm, 4, c) - band(hl, 4, c)));
    report("6(iv)", "two-path agreement (Marchenko vs Lanczos)", two <= 1e-4, two, 1e-4);
    detail("last row (a1, a2, u) only: " + fmt(lastrow));
  }

  // 7. eigenphase fidelity
  {
    const auto grid = k_grid(0.2, 6.0, 600, cs.delta);
    const HamiltonianProvider fin(run.final_h());
    const auto a = phase_curve([&](double k) { return model.smatrix(k); }, grid, cs.delta);
    const auto b = phase_curve([&](double k) { return fin.smatrix(k); }, grid, cs.delta);
    const double sd = std::sqrt(cs.delta);
    const auto d = phase_deviation(a, b, [&](double k) { return std::abs(k - sd) >= 0.05; });
    report("7", "eigenphase deviation on [0.2, 6]", d.eigenphase <= 2e-2, d.eigenphase, 2e-2,
           "max at k = " + fmt(d.at_k));
    const HamiltonianProvider pub(fixture::from_bands(golden::bands_final));
    const auto c = phase_curve([&](double k) { return pub.smatrix(k); }, grid, cs.delta);
    const auto dp = phase_deviation(a, c, [&](double k) { return std::abs(k - sd) >= 0.05; });
    detail("same measure for the published final bands: " + fmt(dp.eigenphase) + " at k = " + fmt(dp.at_k));
  }

  std::cout << (failures ? std::to_string(failures) + " criterion line(s) failed\n" : "all criteria passed\n");
  return failures ? 1 : 0;
}
