#pragma once

namespace tariffgrid {

// Single-phase per-unit system. Defaults put a 230 V LV feeder on a 100 kVA
// base, which makes Z_base = 0.529 ohm.
struct PuBase {
    double base_kva = 100.0;
    double base_kv = 0.23;

    double z_base_ohm() const { return 1000.0 * base_kv * base_kv / base_kva; }
    double i_base_a() const { return base_kva / base_kv; }

    double kw_to_pu(double kw) const { return kw / base_kva; }
    double pu_to_kw(double pu) const { return pu * base_kva; }
    double ohm_to_pu(double ohm) const { return ohm / z_base_ohm(); }
    double pu_to_ohm(double pu) const { return pu * z_base_ohm(); }
    double a2_to_pu(double a2) const { return a2 / (i_base_a() * i_base_a()); }
    double pu_to_a2(double pu) const { return pu * i_base_a() * i_base_a(); }
};

// reactive power drawn by a load at the given lagging power factor
double reactive_for_pf(double p_kw, double power_factor);

} // namespace tariffgrid
