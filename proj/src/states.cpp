#include "uncertainty/states.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "uncertainty/error.hpp"

namespace uncertainty {

bool operator==(const Superposition& a, const Superposition& b) {
  return a.coefficients == b.coefficients && a.terms == b.terms;
}

WaveFunction gaussian_packet(double x0, double p0, double sigma, const Grid& grid, const UnitSystem& units) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "gaussian packet requires sigma > 0");
  const double hbar = units.hbar();
  std::vector<Complex> raw(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double x = grid.point(k);
    const double d = x - x0;
    const double envelope = std::exp(-d * d / (4.0 * sigma * sigma));
    raw[k] = std::polar(envelope, p0 * x / hbar);
  }
  WaveFunction psi = normalize(raw, grid);
  psi.require_boundary_decay();
  return psi;
}

WaveFunction ho_eigenstate(int n, double mass, double omega, const Grid& grid, const UnitSystem& units) {
  if (n < 0) throw Error(ErrorCode::NegativeQuantumNumber, "quantum number must be >= 0, got " + std::to_string(n));
  if (!(mass > 0.0) || !(omega > 0.0)) throw Error(ErrorCode::InvalidParameter, "mass and omega must be positive");

  const double scale = std::sqrt(mass * omega / units.hbar());
  const double prefactor = std::sqrt(scale);  // (m omega / hbar)^{1/4}
  const double h0_norm = 1.0 / std::sqrt(std::sqrt(std::numbers::pi));

  std::vector<Complex> raw(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double xi = scale * grid.point(k);
    double previous = 0.0;
    double current = h0_norm * std::exp(-0.5 * xi * xi);
    for (int level = 0; level < n; ++level) {
      const double next = std::sqrt(2.0 / (level + 1)) * xi * current - std::sqrt(double(level) / (level + 1)) * previous;
      previous = current;
      current = next;
    }
    raw[k] = prefactor * current;
  }
  WaveFunction psi = normalize(raw, grid);
  psi.require_boundary_decay();
  return psi;
}

WaveFunction superpose(std::span<const std::pair<Complex, WaveFunction>> terms) {
  if (terms.empty()) throw Error(ErrorCode::EmptyTermList, "superposition needs at least one term");
  const Grid& grid = terms.front().second.grid();
  std::vector<Complex> sum(grid.size(), Complex{});
  for (const auto& [coefficient, state] : terms) {
    if (!(state.grid() == grid)) throw Error(ErrorCode::GridMismatch, "superposition terms live on different grids");
    for (std::size_t k = 0; k < grid.size(); ++k) sum[k] += coefficient * state[k];
  }
  return normalize(sum, grid);
}

WaveFunction build_state(const StateRecipe& recipe, const Grid& grid, const UnitSystem& units) {
  struct Visitor {
    const Grid& grid;
    const UnitSystem& units;
    WaveFunction operator()(const GaussianPacket& g) const { return gaussian_packet(g.x0, g.p0, g.sigma, grid, units); }
    WaveFunction operator()(const HarmonicEigenstate& h) const { return ho_eigenstate(h.n, h.mass, h.omega, grid, units); }
    WaveFunction operator()(const Superposition& s) const {
      if (s.terms.empty()) throw Error(ErrorCode::EmptyTermList, "superposition needs at least one term");
      if (s.terms.size() != s.coefficients.size()) {
        throw Error(ErrorCode::InvalidParameter, "superposition coefficient count does not match term count");
      }
      std::vector<std::pair<Complex, WaveFunction>> built;
      built.reserve(s.terms.size());
      for (std::size_t t = 0; t < s.terms.size(); ++t) {
        built.emplace_back(s.coefficients[t], build_state(s.terms[t], grid, units));
      }
      return superpose(built);
    }
  };
  return std::visit(Visitor{grid, units}, recipe.variant);
}

}  // namespace uncertainty
