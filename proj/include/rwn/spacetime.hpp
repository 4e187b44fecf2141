#pragma once

#include <optional>
#include <string_view>

namespace rwn {

// Dimensionless physical constants. Lengths are in electron reduced Compton
// wavelengths, so every gravitational coupling enters through G m^2 / (hbar c).
struct ConstantsLedger {
  double alpha_s = 1.0 / 137.036;  // e^2 / (hbar c)
  double eps_g = 1.79e-45;         // G m_e^2 / (hbar c)
  double mass_ratio = 1836.0;      // m_p / m_e

  [[nodiscard]] double eps_pe() const { return mass_ratio * eps_g; }
  [[nodiscard]] double eps_pp() const { return mass_ratio * eps_pe(); }

  void validate() const;
};

struct Nucleus {
  int Z = 1;       // elementary charges
  double A = 1.0;  // mass number, M = A m_p

  void validate() const;
};

enum class Sector { Naked, Subextremal, Extremal };

std::string_view to_string(Sector s);

struct Spacetime {
  Nucleus nucleus;
  ConstantsLedger constants;
  double mu = 0.0;  // G M m_e / (hbar c)
  Sector sector = Sector::Naked;
  double discriminant = 0.0;  // 1 - Z^2 e^2 / (G M^2)

  // Black-hole sectors only.
  std::optional<double> r_minus;
  std::optional<double> r_plus;
  std::optional<double> q;  // sqrt(r_+ r_-)
  std::optional<double> kappa;  // (r_+ - r_-) / r_-^2, subextremal only
  std::optional<double> r_star;  // r_- (subextremal) or r_0 (extremal)

  [[nodiscard]] bool is_black_hole() const { return sector != Sector::Naked; }
  [[nodiscard]] double charge_term() const;  // Z^2 alpha_s eps_g
  [[nodiscard]] std::optional<double> r0() const;
  // r_+/r_- and (r_+ - r_-)/r_-, computed without cancellation.
  [[nodiscard]] double rho() const;
  [[nodiscard]] double kappa_hat() const;
};

inline constexpr double kExtremalTolerance = 1e-12;

Spacetime build_spacetime(const Nucleus& nucleus, const ConstantsLedger& constants = {});

// 1 - 2 mu / r + Z^2 alpha_s eps_g / r^2.
double f_squared(const Spacetime& st, double r);

// (r - r_+)(r - r_-) / r^2, black-hole sectors only.
double f_squared_factored(const Spacetime& st, double r);

Sector classify_sector(const Nucleus& nucleus, const ConstantsLedger& constants = {});

// G M m_e > Z e^2.
bool hyper_heavy(const Nucleus& nucleus, const ConstantsLedger& constants = {});

// A with G M^2 = Z^2 e^2.
double extremal_mass_number(int Z, const ConstantsLedger& constants = {});

}  // namespace rwn
