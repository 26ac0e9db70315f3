#pragma once

#include <span>

namespace txlife::thermal {

// Lumped thermal model of a mineral-oil-immersed transformer per
// IEEE Std C57.91-2011, single cooling mode:
//   per-unit life    = A * exp(B / (theta_H + 273))
//   F_AA(theta_H)    = exp(rate/ref_K - rate/(theta_H + 273))
//   F_EQA            = sum(F_AA,n * dt_n) / sum(dt_n)
//   LOL%             = F_EQA * t * 100 / normal insulation life
//   theta_H          = theta_A + dtheta_TO + dtheta_H
//   rise transients  = (ultimate - initial) * (1 - exp(-t/tau)) + initial
//   ultimate dtheta_TO = dtheta_TO,R * ((K^2 R + 1)/(R + 1))^n
//   ultimate dtheta_H  = dtheta_H,R * K^(2m)
// Temperatures travel in deg C; kelvin appears only inside the two
// Arrhenius-style expressions.

/// Nameplate and insulation-life constants. Defaults describe a unit whose
/// rated condition is theta_H = 110 C at K = 1 and 30 C ambient.
struct TransformerParams {
    double delta_theta_to_rated = 55.0;   ///< rated top-oil rise over ambient, C
    double delta_theta_h_rated = 25.0;    ///< rated hottest-spot rise over top oil, C
    double loss_ratio_r = 4.5;            ///< load loss at rated load / no-load loss
    double exp_n = 0.8;                   ///< top-oil exponent
    double exp_m = 0.8;                   ///< winding exponent
    double tau_to = 3.0;                  ///< oil time constant, h
    double tau_w = 0.08;                  ///< winding time constant, h
    double life_const_a = 9.8e-18;        ///< per-unit life constant A
    double life_const_b = 15000.0;        ///< aging rate B, kelvin
    double ref_hotspot_kelvin = 383.0;    ///< F_AA reference temperature, kelvin
    double aging_rate_kelvin = 15000.0;   ///< F_AA aging rate, kelvin
    double normal_insulation_life = 180000.0;  ///< hours
};

/// Throws InvalidInputError unless all rises, time constants, life constants
/// and the loss ratio are strictly positive. With standard_exponent_range
/// (the default) the exponents must also lie in (0, 1].
void validate(const TransformerParams& params, bool standard_exponent_range = true);

/// Rises carried between hourly steps; both over the respective reference.
struct ThermalState {
    double delta_theta_to = 0.0;  ///< current top-oil rise over ambient, C
    double delta_theta_h = 0.0;   ///< current hottest-spot rise over top oil, C
};

/// One interval of the stepping recursion.
struct ThermalStepInput {
    double load_prev_pu = 0.0;  ///< per-unit load at the start of the interval
    double load_now_pu = 0.0;   ///< per-unit load during the interval
    double ambient_c = 0.0;     ///< ambient temperature, C
    double dt_hours = 1.0;      ///< interval length, h
};

/// Aging acceleration factor at a hottest-spot temperature; equals 1 at the
/// reference (110 C with defaults) and is strictly increasing.
double aging_acceleration_factor(double theta_h_c, const TransformerParams& params);

/// Per-unit insulation life at a hottest-spot temperature.
double per_unit_life(double theta_h_c, const TransformerParams& params);

/// Time-weighted mean of aging acceleration factors over intervals dt.
double equivalent_aging_factor(std::span<const double> faa_series,
                               std::span<const double> dt_hours);

/// Percent of normal insulation life consumed over elapsed_hours at a given
/// equivalent aging factor.
double percent_loss_of_life(double feqa, double elapsed_hours,
                            const TransformerParams& params);

/// Steady-state top-oil rise at a per-unit load.
double ultimate_top_oil_rise(double load_pu, const TransformerParams& params);

/// Steady-state hottest-spot rise over top oil at a per-unit load.
double ultimate_hotspot_rise(double load_pu, const TransformerParams& params);

/// First-order exponential approach from initial toward ultimate after time t.
double exponential_rise(double initial, double ultimate, double tau_hours,
                        double t_hours);

/// theta_H = ambient + top-oil rise + hottest-spot rise.
double hotspot_temperature(double ambient_c, double delta_theta_to,
                           double delta_theta_h);

/// State with both rises settled at their ultimate values for a load.
ThermalState steady_state(double load_pu, const TransformerParams& params);

struct ThermalStepResult {
    ThermalState state;  ///< rises at the end of the interval
    double theta_h;      ///< hottest-spot temperature at the end of the interval, C
    double faa;          ///< aging acceleration factor at theta_h
};

/// Advances the rises over one interval: ultimate values come from
/// load_now_pu, the incoming state supplies the initial values, and theta_H /
/// F_AA are evaluated at the end-of-interval rises. Pure and deterministic.
ThermalStepResult step_thermal(const ThermalState& state, const ThermalStepInput& input,
                               const TransformerParams& params);

}  // namespace txlife::thermal
