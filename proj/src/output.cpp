#include "lsda/output.hpp"

#include <fmt/format.h>

#include "lsda/error.hpp"

namespace lsda {

std::string format_real(double v) { return fmt::format("{:.16e}", v + 0.0); }  // no negative zero

std::string energies_csv(const EnergyBreakdown& e) {
  std::string out = "part,value_hartree\n";
  const std::pair<const char*, double> rows[] = {{"kinetic", e.kinetic}, {"hartree", e.hartree}, {"v_ext", e.v_ext},
                                                 {"zeeman", e.zeeman},   {"xc", e.xc},           {"total", e.total}};
  for (const auto& [name, value] : rows) out += fmt::format("{},{}\n", name, format_real(value));
  return out;
}

std::string density_dump(const SpinDensityField& r) {
  const Grid& g = r.grid;
  const EigenvaluesPM pm = eigenvalues_pm(r);
  const VectorField m = magnetization(r);
  std::string out;
  out += fmt::format("# dims {} {} {}\n", g.n(), g.n(), g.n());
  out += fmt::format("# spacing {}\n", format_real(g.spacing()));
  out += fmt::format("# origin {} {} {}\n", format_real(g.origin()[0]), format_real(g.origin()[1]),
                     format_real(g.origin()[2]));
  out += "# ruu rdd rud_re rud_im rho_plus rho_minus m_x m_y m_z\n";
  for (std::size_t p = 0; p < g.size(); ++p)
    out += fmt::format("{} {} {} {} {} {} {} {} {}\n", format_real(r.uu[p]), format_real(r.dd[p]),
                       format_real(r.ud_re[p]), format_real(r.ud_im[p]), format_real(pm.plus[p]),
                       format_real(pm.minus[p]), format_real(m.x[p]), format_real(m.y[p]), format_real(m.z[p]));
  return out;
}

std::string orbitals_csv(const ScfState& s) {
  std::string out = "index,energy_hartree,occupation\n";
  for (std::size_t k = 0; k < s.orbital_energies.size(); ++k)
    out += fmt::format("{},{},{}\n", k, format_real(s.orbital_energies[k]), format_real(s.occupied.occupations[k]));
  return out;
}

std::string history_csv(const ScfState& s) {
  std::string out = "iteration,total,delta_rho,delta_e,fermi,min_occupation,max_occupation,trace,orthonormality\n";
  for (const auto& h : s.history)
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", h.iteration, format_real(h.total), format_real(h.delta_rho),
                       format_real(h.delta_e), format_real(h.fermi), format_real(h.coleman.min_occupation),
                       format_real(h.coleman.max_occupation), format_real(h.coleman.trace),
                       format_real(h.coleman.max_orthonormality_error));
  return out;
}

std::string sweep_csv(const SweepReport& r) {
  std::string out = "lambda,I_lambda,I_inf,converged,converged_inf,binding_margin,subadditivity_margin\n";
  for (double l : r.lambdas) {
    const SweepPoint* found = find_point(r, l);
    if (!found) continue;
    const SweepPoint& p = *found;
    const SweepPoint* half = find_point(r, 0.5 * p.lambda);
    std::string sub = "nan";
    if (half && p.converged && half->converged && half->converged_inf)
      sub = format_real(half->energy + half->energy_inf - p.energy);
    const std::string bind = p.converged && p.converged_inf ? format_real(p.energy_inf - p.energy) : "nan";
    out += fmt::format("{},{},{},{},{},{},{}\n", format_real(p.lambda), p.converged ? format_real(p.energy) : "nan",
                       p.converged_inf ? format_real(p.energy_inf) : "nan", p.converged ? 1 : 0,
                       p.converged_inf ? 1 : 0, bind, sub);
  }
  return out;
}

void Report::begin(const std::string& title) { blocks_.push_back({title, {}}); }

void Report::add(const std::string& key, const std::string& value) {
  if (blocks_.empty()) begin("report");
  blocks_.back().entries.emplace_back(key, value);
}

void Report::add(const std::string& key, double value) { add(key, format_real(value)); }

void Report::add(const std::string& key, long long value) { add(key, std::to_string(value)); }

void Report::add(const CheckResult& c) {
  begin("check " + c.name);
  add("class", to_string(c.kind));
  add("verdict", to_string(c.verdict));
  add("value", c.value);
  add("threshold", c.threshold);
  if (!c.detail.empty()) add("detail", c.detail);
}

std::string Report::str() const {
  std::string out;
  for (const auto& b : blocks_) {
    if (!out.empty()) out += "\n";
    out += "[" + b.title + "]\n";
    for (const auto& [k, v] : b.entries) out += k + ": " + v + "\n";
  }
  return out;
}

}  // namespace lsda
