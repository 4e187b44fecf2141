#include "rwn/spacetime.hpp"

#include <cmath>

#include "rwn/numerics.hpp"

namespace rwn {

void ConstantsLedger::validate() const {
  if (!(alpha_s > 0.0) || !(eps_g > 0.0) || !(mass_ratio > 0.0)) {
    throw DomainError("ConstantsLedger: all constants must be positive");
  }
}

void Nucleus::validate() const {
  if (Z < 1) throw DomainError("Nucleus: Z must be >= 1");
  if (!(A >= 1.0) || !std::isfinite(A)) throw DomainError("Nucleus: A must be finite and >= 1");
}

std::string_view to_string(Sector s) {
  switch (s) {
    case Sector::Naked: return "naked";
    case Sector::Subextremal: return "subextremal";
    case Sector::Extremal: return "extremal";
  }
  return "unknown";
}

double Spacetime::charge_term() const {
  const double z = nucleus.Z;
  return z * z * constants.alpha_s * constants.eps_g;
}

std::optional<double> Spacetime::r0() const {
  if (sector == Sector::Extremal) return r_star;
  return std::nullopt;
}

double Spacetime::rho() const {
  if (!is_black_hole()) throw DomainError("rho: naked sector has no horizons");
  return sector == Sector::Extremal ? 1.0 : *r_plus / *r_minus;
}

double Spacetime::kappa_hat() const {
  if (!is_black_hole()) throw DomainError("kappa_hat: naked sector has no horizons");
  if (sector == Sector::Extremal) return 0.0;
  return 2.0 * mu * std::sqrt(discriminant) / *r_minus;
}

namespace {

// Z^2 alpha_s / (A^2 eps_pp) = Z^2 e^2 / (G M^2).
double charge_to_mass(const Nucleus& n, const ConstantsLedger& c) {
  const double z = n.Z;
  return z * z * c.alpha_s / (n.A * n.A * c.eps_pp());
}

}  // namespace

Sector classify_sector(const Nucleus& nucleus, const ConstantsLedger& constants) {
  nucleus.validate();
  constants.validate();
  const double disc = 1.0 - charge_to_mass(nucleus, constants);
  if (std::abs(disc) < kExtremalTolerance) return Sector::Extremal;
  return disc > 0.0 ? Sector::Subextremal : Sector::Naked;
}

Spacetime build_spacetime(const Nucleus& nucleus, const ConstantsLedger& constants) {
  Spacetime st;
  st.nucleus = nucleus;
  st.constants = constants;
  st.sector = classify_sector(nucleus, constants);
  st.mu = nucleus.A * constants.eps_pe();
  const double ratio = charge_to_mass(nucleus, constants);
  st.discriminant = 1.0 - ratio;

  switch (st.sector) {
    case Sector::Naked:
      break;
    case Sector::Extremal:
      st.r_minus = st.mu;
      st.r_plus = st.mu;
      st.q = st.mu;
      st.r_star = st.mu;
      break;
    case Sector::Subextremal: {
      const double root = std::sqrt(st.discriminant);
      st.r_plus = st.mu * (1.0 + root);
      // mu (1 - root) rewritten to avoid cancellation for heavy nuclei.
      st.r_minus = st.mu * ratio / (1.0 + root);
      st.q = std::sqrt(*st.r_plus * *st.r_minus);
      st.kappa = 2.0 * st.mu * root / (*st.r_minus * *st.r_minus);
      st.r_star = st.r_minus;
      break;
    }
  }
  return st;
}

double f_squared(const Spacetime& st, double r) {
  if (!(r > 0.0)) throw DomainError("f_squared: r must be positive");
  return 1.0 - 2.0 * st.mu / r + st.charge_term() / (r * r);
}

double f_squared_factored(const Spacetime& st, double r) {
  if (!(r > 0.0)) throw DomainError("f_squared_factored: r must be positive");
  if (!st.is_black_hole()) throw DomainError("f_squared_factored: naked sector has no horizons");
  return (r - *st.r_plus) * (r - *st.r_minus) / (r * r);
}

bool hyper_heavy(const Nucleus& nucleus, const ConstantsLedger& constants) {
  nucleus.validate();
  constants.validate();
  return nucleus.A > nucleus.Z * constants.alpha_s / constants.eps_pe();
}

double extremal_mass_number(int Z, const ConstantsLedger& constants) {
  if (Z < 1) throw DomainError("extremal_mass_number: Z must be >= 1");
  constants.validate();
  return Z * std::sqrt(constants.alpha_s / constants.eps_pp());
}

}  // namespace rwn
