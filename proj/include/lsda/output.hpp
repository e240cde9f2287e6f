#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lsda/scf.hpp"
#include "lsda/verify.hpp"

namespace lsda {

/// Fixed 17-significant-digit rendering used for every energy in every file.
std::string format_real(double v);

/// part,value_hartree rows for kinetic, hartree, v_ext, zeeman, xc, total.
std::string energies_csv(const EnergyBreakdown& e);

/// Header with grid dimensions, spacing and origin, then one row per node in
/// storage order: ruu rdd rud_re rud_im rho_plus rho_minus m_x m_y m_z.
std::string density_dump(const SpinDensityField& r);

/// index,energy_hartree,occupation
std::string orbitals_csv(const ScfState& s);

/// iteration,total,delta_rho,delta_e,fermi,min_occupation,max_occupation,trace,orthonormality
std::string history_csv(const ScfState& s);

/// One row per requested lambda:
/// lambda,I_lambda,I_inf,converged,converged_inf,binding_margin,subadditivity_margin
std::string sweep_csv(const SweepReport& r);

/// Plain-text report of `key: value` lines grouped in titled blocks.
class Report {
public:
  void begin(const std::string& title);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const CheckResult& c);
  std::string str() const;

private:
  struct Block {
    std::string title;
    std::vector<std::pair<std::string, std::string>> entries;
  };
  std::vector<Block> blocks_;
};

}  // namespace lsda
