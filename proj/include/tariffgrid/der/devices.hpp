#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tariffgrid/convex/program.hpp"
#include "tariffgrid/units.hpp"

namespace tariffgrid::der {

struct PvSpec {
    std::string bus;
    double rating_kw = 5.0;
    std::vector<double> forecast_kw;  // available generation per step
};

struct BessSpec {
    std::string bus;
    double e_min_kwh = 2.7;
    double e_max_kwh = 10.8;
    double p_ch_max_kw = 5.0;
    double p_dis_max_kw = 5.0;
    double eta_ch = 0.95;
    double eta_dis = 0.95;
    double e_init_kwh = 6.75;
    double end_value_slope = 0.2;  // marginal value of stored energy at empty, $/kWh
    double r_conv_ohm = 0.529;
    double p_conv_max_kw = 5.0;
};

// throws Error(ValidationError) when a spec invariant fails
void validate(const PvSpec& spec);
void validate(const BessSpec& spec);

struct BessTrajectory {
    std::vector<double> p_ch_kw, p_dis_kw, e_kwh, p_conv_kw, ell_conv_a2;

    bool empty() const { return e_kwh.empty(); }
};

// Terminal stored-energy value M * (e - e^2 / (2 emax)): concave, increasing
// on [0, emax], keeps the horizon end from draining the battery. Throws
// Error(OutOfRangeEnergy) outside [0, emax].
double end_value(const BessSpec& spec, double e_final_kwh);
double end_value_marginal(const BessSpec& spec, double e_kwh);

struct BatteryVars {
    std::vector<convex::VarId> p_ch, p_dis, e;
};

struct ConverterVars {
    std::vector<convex::VarId> p_conv;      // kW, grid side
    std::vector<convex::VarId> ell_conv;    // squared converter current, p.u.
};

struct PvVars {
    std::vector<convex::VarId> p_out, p_curtail;
};

// Convex-hull battery block: energy recursion with charge/discharge
// efficiencies, power and energy boxes, the charge/discharge simplex, and the
// four headroom rows that keep one-sided operation optimal without integers.
BatteryVars battery_constraints(convex::ConicProgram& prog, const BessSpec& spec, int T,
                                double dt_h, int tag = 0);

// Lossy converter block between the battery terminals and the home bus:
// p_conv^2 <= v * ell, the resistive loss balance against charge/discharge,
// and the converter power limit. The bus voltage enters either as a fixed
// parameter (p.u.^2, must be positive) or as a program variable.
ConverterVars converter_constraints(convex::ConicProgram& prog, const BessSpec& spec,
                                    const BatteryVars& batt, int T, const PuBase& base,
                                    double bus_v_pu2, int tag = 0);
ConverterVars converter_constraints(convex::ConicProgram& prog, const BessSpec& spec,
                                    const BatteryVars& batt, int T, const PuBase& base,
                                    const std::vector<convex::VarId>& bus_v_pu2, int tag = 0);

// PV with curtailment: output = forecast - curtailed, both nonnegative.
PvVars pv_constraints(convex::ConicProgram& prog, const PvSpec& spec, int T, int tag = 0);

// adds -end_value(e_final) to a minimization objective (exact quadratic)
void end_value_objective(convex::ConicProgram& prog, const BessSpec& spec,
                         convex::VarId e_final);

} // namespace tariffgrid::der
